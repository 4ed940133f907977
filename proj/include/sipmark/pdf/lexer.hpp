#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "sipmark/error.hpp"
#include "sipmark/pdf/object.hpp"

namespace sipmark::pdf {

constexpr bool is_whitespace(char c) noexcept {
  return c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\f' || c == '\0';
}

constexpr bool is_delimiter(char c) noexcept {
  return c == '(' || c == ')' || c == '<' || c == '>' || c == '[' || c == ']' || c == '{' ||
         c == '}' || c == '/' || c == '%';
}

constexpr bool is_regular(char c) noexcept { return !is_whitespace(c) && !is_delimiter(c); }

/// Cursor over PDF bytes that reads tokens and direct objects. Shared by the
/// file parser and the content-stream tokenizer.
class Lexer {
 public:
  explicit Lexer(std::string_view data, std::size_t pos = 0) : data_(data), pos_(pos) {}

  std::size_t pos() const noexcept { return pos_; }
  void seek(std::size_t pos) noexcept { pos_ = pos; }
  bool at_end() const noexcept { return pos_ >= data_.size(); }
  std::string_view data() const noexcept { return data_; }

  /// Reference detection ("N G R") is only meaningful outside content streams.
  void set_allow_refs(bool allow) noexcept { allow_refs_ = allow; }

  void skip_whitespace() {
    while (pos_ < data_.size()) {
      const char c = data_[pos_];
      if (is_whitespace(c)) {
        ++pos_;
      } else if (c == '%') {
        while (pos_ < data_.size() && data_[pos_] != '\n' && data_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  char peek() const noexcept { return pos_ < data_.size() ? data_[pos_] : '\0'; }

  /// Reads a run of regular characters after skipping whitespace.
  std::string_view read_keyword() {
    skip_whitespace();
    const auto start = pos_;
    while (pos_ < data_.size() && is_regular(data_[pos_])) ++pos_;
    return data_.substr(start, pos_ - start);
  }

  std::string_view peek_keyword() {
    const auto saved = pos_;
    auto kw = read_keyword();
    pos_ = saved;
    return kw;
  }

  bool expect_keyword(std::string_view kw) {
    const auto saved = pos_;
    if (read_keyword() == kw) return true;
    pos_ = saved;
    return false;
  }

  std::optional<std::int64_t> read_integer() {
    const auto saved = pos_;
    auto tok = read_keyword();
    std::int64_t v = 0;
    auto first = tok.data();
    const auto last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (tok.empty() || ec != std::errc{} || ptr != last) {
      pos_ = saved;
      return std::nullopt;
    }
    return v;
  }

  /// Parses the next direct object. Returns nullopt, leaving the cursor in
  /// place, when the next token is a keyword that is not an object.
  std::optional<Object> try_parse_object() {
    skip_whitespace();
    if (at_end()) return std::nullopt;
    const char c = data_[pos_];
    if (c == '/') return Object(parse_name());
    if (c == '(') return Object(parse_literal_string());
    if (c == '<') {
      if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '<') return Object(parse_dictionary());
      return Object(parse_hex_string());
    }
    if (c == '[') return Object(parse_array());
    if (c == '+' || c == '-' || c == '.' || (c >= '0' && c <= '9')) return parse_number_or_ref();
    if (c == ')' || c == '>' || c == ']' || c == '{' || c == '}') return std::nullopt;

    const auto saved = pos_;
    auto kw = read_keyword();
    if (kw == "true") return Object(Boolean{true});
    if (kw == "false") return Object(Boolean{false});
    if (kw == "null") return Object(Null{});
    pos_ = saved;
    return std::nullopt;
  }

  Object parse_object() {
    const auto at = pos_;
    auto obj = try_parse_object();
    if (!obj) fail("expected an object", at);
    return std::move(*obj);
  }

  Name parse_name() {
    ++pos_;  // '/'
    std::string out;
    while (pos_ < data_.size() && is_regular(data_[pos_])) {
      const char c = data_[pos_];
      if (c == '#' && pos_ + 2 < data_.size() && is_hex(data_[pos_ + 1]) &&
          is_hex(data_[pos_ + 2])) {
        out.push_back(static_cast<char>(hex_value(data_[pos_ + 1]) * 16 +
                                        hex_value(data_[pos_ + 2])));
        pos_ += 3;
      } else {
        out.push_back(c);
        ++pos_;
      }
    }
    return Name{std::move(out)};
  }

  String parse_literal_string() {
    const auto start = pos_;
    ++pos_;  // '('
    std::string out;
    int depth = 1;
    while (pos_ < data_.size()) {
      char c = data_[pos_++];
      if (c == '\\') {
        if (pos_ >= data_.size()) break;
        c = data_[pos_++];
        switch (c) {
          case 'n': out.push_back('\n'); break;
          case 'r': out.push_back('\r'); break;
          case 't': out.push_back('\t'); break;
          case 'b': out.push_back('\b'); break;
          case 'f': out.push_back('\f'); break;
          case '\r':
            if (pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
            break;
          case '\n': break;
          default:
            if (c >= '0' && c <= '7') {
              int v = c - '0';
              for (int k = 0; k < 2 && pos_ < data_.size() && data_[pos_] >= '0' &&
                              data_[pos_] <= '7';
                   ++k) {
                v = v * 8 + (data_[pos_++] - '0');
              }
              out.push_back(static_cast<char>(v & 0xFF));
            } else {
              out.push_back(c);  // \( \) \\ and unknown escapes
            }
        }
      } else if (c == '(') {
        ++depth;
        out.push_back(c);
      } else if (c == ')') {
        if (--depth == 0) return String{std::move(out)};
        out.push_back(c);
      } else if (c == '\r') {
        if (pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
        out.push_back('\n');
      } else {
        out.push_back(c);
      }
    }
    fail("unterminated literal string", start);
  }

  String parse_hex_string() {
    const auto start = pos_;
    ++pos_;  // '<'
    std::string out;
    int pending = -1;
    while (pos_ < data_.size()) {
      const char c = data_[pos_++];
      if (c == '>') {
        if (pending >= 0) out.push_back(static_cast<char>(pending * 16));
        return String{std::move(out)};
      }
      if (is_whitespace(c)) continue;
      if (!is_hex(c)) fail("invalid hex digit", pos_ - 1);
      if (pending < 0) {
        pending = hex_value(c);
      } else {
        out.push_back(static_cast<char>(pending * 16 + hex_value(c)));
        pending = -1;
      }
    }
    fail("unterminated hex string", start);
  }

  Array parse_array() {
    const auto start = pos_;
    ++pos_;  // '['
    Array out;
    for (;;) {
      skip_whitespace();
      if (at_end()) fail("unterminated array", start);
      if (data_[pos_] == ']') {
        ++pos_;
        return out;
      }
      auto item = try_parse_object();
      if (!item) fail("unexpected token in array", pos_);
      out.items.push_back(std::move(*item));
    }
  }

  Dictionary parse_dictionary() {
    const auto start = pos_;
    pos_ += 2;  // '<<'
    Dictionary out;
    for (;;) {
      skip_whitespace();
      if (at_end()) fail("unterminated dictionary", start);
      if (data_[pos_] == '>' && pos_ + 1 < data_.size() && data_[pos_ + 1] == '>') {
        pos_ += 2;
        return out;
      }
      if (data_[pos_] != '/') fail("dictionary key is not a name", pos_);
      auto key = parse_name();
      skip_whitespace();
      if (peek() == '>' && pos_ + 1 < data_.size() && data_[pos_ + 1] == '>') {
        fail("dictionary key without value", pos_);
      }
      // A later duplicate replaces the earlier value but keeps its position.
      out.set(std::move(key.value), parse_object());
    }
  }

  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw Error(ErrorCode::parse_error, what + " at byte " + std::to_string(at));
  }

 private:
  static constexpr bool is_hex(char c) noexcept {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
  }
  static constexpr int hex_value(char c) noexcept {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return c - 'A' + 10;
  }

  Object parse_number_or_ref() {
    const auto start = pos_;
    auto tok = read_keyword();
    std::string_view body = tok;
    if (!body.empty() && body.front() == '+') body.remove_prefix(1);
    const bool is_real = body.find('.') != std::string_view::npos;
    if (!is_real) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
      if (ec != std::errc{} || ptr != body.data() + body.size()) {
        fail("malformed number '" + std::string(tok) + "'", start);
      }
      if (allow_refs_ && v >= 0) {
        const auto after = pos_;
        auto gen = read_integer();
        if (gen && *gen >= 0 && *gen <= 65535 && read_keyword() == "R") {
          return Ref{static_cast<std::uint32_t>(v), static_cast<std::uint16_t>(*gen)};
        }
        pos_ = after;
      }
      return Integer{v};
    }
    // from_chars rejects a leading '-' before '.', e.g. "-.5"
    std::string text(body);
    bool negative = false;
    if (!text.empty() && text.front() == '-') {
      negative = true;
      text.erase(0, 1);
    }
    if (!text.empty() && text.front() == '.') text.insert(0, "0");
    if (!text.empty() && text.back() == '.') text.push_back('0');
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v,
                                     std::chars_format::fixed);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
      fail("malformed number '" + std::string(tok) + "'", start);
    }
    return Real{negative ? -v : v};
  }

  std::string_view data_;
  std::size_t pos_ = 0;
  bool allow_refs_ = true;
};

}  // namespace sipmark::pdf
