#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sipmark/error.hpp"
#include "sipmark/pdf/document.hpp"
#include "sipmark/sip/permutation.hpp"

namespace sipmark::watermark {

using json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

enum class Scheme { spacing, grid, structure };

constexpr std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::spacing: return "spacing";
    case Scheme::grid: return "grid";
    case Scheme::structure: return "structure";
  }
  return "unknown";
}

inline std::optional<Scheme> parse_scheme(std::string_view s) {
  if (s == "spacing") return Scheme::spacing;
  if (s == "grid") return Scheme::grid;
  if (s == "structure") return Scheme::structure;
  return std::nullopt;
}

enum class Status {
  ok,
  capacity_error,
  extraction_failed,
  not_watermarked,
  verify_mismatch,
  unsupported,
  parse_error,
  embedding_error,
  usage_error,
};

constexpr std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::ok: return "ok";
    case Status::capacity_error: return "capacity-error";
    case Status::extraction_failed: return "extraction-failed";
    case Status::not_watermarked: return "not-watermarked";
    case Status::verify_mismatch: return "verify-mismatch";
    case Status::unsupported: return "unsupported-feature";
    case Status::parse_error: return "parse-error";
    case Status::embedding_error: return "embedding-error";
    case Status::usage_error: return "usage-error";
  }
  return "unknown";
}

constexpr Status status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parse_error:
    case ErrorCode::malformed_document:
    case ErrorCode::serialization_error: return Status::parse_error;
    case ErrorCode::capacity_error: return Status::capacity_error;
    case ErrorCode::embedding_error: return Status::embedding_error;
    case ErrorCode::unsupported_feature:
    case ErrorCode::unsupported_layout: return Status::unsupported;
    case ErrorCode::not_a_watermark:
    case ErrorCode::invalid_permutation:
    case ErrorCode::malformed_graph: return Status::extraction_failed;
    case ErrorCode::invalid_watermark:
    case ErrorCode::config_error: return Status::usage_error;
  }
  return Status::parse_error;
}

struct WatermarkReport {
  Scheme scheme = Scheme::grid;
  Status status = Status::ok;
  std::optional<std::uint64_t> w;
  std::optional<SelfInvertingPermutation> sip;
  std::size_t n_star = 0;
  json locations = json::object();
  std::vector<std::string> diagnostics;

  void fail(Status s, std::string note) {
    status = s;
    diagnostics.push_back(std::move(note));
  }
};

inline json to_json(const WatermarkReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["scheme"] = to_string(r.scheme);
  j["status"] = to_string(r.status);
  j["w"] = r.w ? json(*r.w) : json(nullptr);
  if (r.sip) {
    const auto e = r.sip->elements();
    j["sip"] = std::vector<std::uint32_t>(e.begin(), e.end());
  } else {
    j["sip"] = nullptr;
  }
  j["n_star"] = r.n_star;
  j["locations"] = r.locations;
  j["diagnostics"] = r.diagnostics;
  return j;
}

struct Embedding {
  pdf::PdfDocument doc;
  WatermarkReport report;
};

struct Extraction {
  std::optional<SelfInvertingPermutation> sip;
  WatermarkReport report;

  bool ok() const { return sip.has_value(); }
};

/// Fills in w from the recovered permutation; a permutation outside the
/// codec's image turns the extraction into a failure rather than a guess.
inline void attach_watermark(Extraction& ex) {
  if (!ex.sip) return;
  ex.report.sip = ex.sip;
  ex.report.n_star = ex.sip->size();
  try {
    ex.report.w = decode_sip_to_w(*ex.sip);
  } catch (const Error& e) {
    ex.report.fail(Status::extraction_failed, e.what());
    ex.sip.reset();
  }
}

}  // namespace sipmark::watermark
