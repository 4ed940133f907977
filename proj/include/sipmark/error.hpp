#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sipmark {

enum class ErrorCode {
  invalid_watermark,
  not_a_watermark,
  invalid_permutation,
  malformed_graph,
  parse_error,
  malformed_document,
  unsupported_feature,
  serialization_error,
  capacity_error,
  unsupported_layout,
  embedding_error,
  config_error,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_watermark: return "invalid-watermark";
    case ErrorCode::not_a_watermark: return "not-a-watermark";
    case ErrorCode::invalid_permutation: return "invalid-permutation";
    case ErrorCode::malformed_graph: return "malformed-graph";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::malformed_document: return "malformed-document";
    case ErrorCode::unsupported_feature: return "unsupported-feature";
    case ErrorCode::serialization_error: return "serialization-error";
    case ErrorCode::capacity_error: return "capacity-error";
    case ErrorCode::unsupported_layout: return "unsupported-layout";
    case ErrorCode::embedding_error: return "embedding-error";
    case ErrorCode::config_error: return "config-error";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// that front ends can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sipmark
