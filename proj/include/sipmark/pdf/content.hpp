#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sipmark/error.hpp"
#include "sipmark/pdf/filters.hpp"
#include "sipmark/pdf/lexer.hpp"
#include "sipmark/pdf/object.hpp"
#include "sipmark/pdf/writer.hpp"

namespace sipmark::pdf {

enum class OpKind { text_show, text_state, text_object, graphics, path, color, other };

/// One content-stream operator with its operands. Inline images ("BI")
/// carry their key/value pairs as operands and the raw bytes in
/// `inline_data`.
struct ContentOp {
  std::string op;
  std::vector<Object> operands;
  std::string inline_data;

  OpKind kind() const noexcept {
    if (op == "Tj" || op == "TJ" || op == "'" || op == "\"") return OpKind::text_show;
    if (op == "BT" || op == "ET") return OpKind::text_object;
    if (op == "Tf" || op == "Td" || op == "TD" || op == "Tm" || op == "T*" || op == "Tc" ||
        op == "Tw" || op == "Tz" || op == "TL" || op == "Tr" || op == "Ts") {
      return OpKind::text_state;
    }
    if (op == "q" || op == "Q" || op == "cm" || op == "w" || op == "gs" || op == "Do") {
      return OpKind::graphics;
    }
    if (op == "re" || op == "m" || op == "l" || op == "c" || op == "v" || op == "y" ||
        op == "h" || op == "f" || op == "F" || op == "f*" || op == "S" || op == "s" ||
        op == "B" || op == "B*" || op == "b" || op == "b*" || op == "n" || op == "W" ||
        op == "W*") {
      return OpKind::path;
    }
    if (op == "rg" || op == "RG" || op == "g" || op == "G" || op == "k" || op == "K" ||
        op == "sc" || op == "scn" || op == "SC" || op == "SCN" || op == "cs" || op == "CS") {
      return OpKind::color;
    }
    return OpKind::other;
  }

  friend bool operator==(const ContentOp&, const ContentOp&) = default;
};

inline std::vector<ContentOp> parse_content(std::string_view data) {
  Lexer lex(data);
  lex.set_allow_refs(false);
  std::vector<ContentOp> ops;
  std::vector<Object> operands;
  for (;;) {
    lex.skip_whitespace();
    if (lex.at_end()) break;
    if (auto obj = lex.try_parse_object()) {
      operands.push_back(std::move(*obj));
      continue;
    }
    const auto at = lex.pos();
    auto kw = lex.read_keyword();
    if (kw.empty()) lex.fail("unexpected delimiter in content stream", at);
    ContentOp op{std::string(kw), std::move(operands), {}};
    operands.clear();
    if (op.op == "BI") {
      for (;;) {
        if (auto obj = lex.try_parse_object()) {
          op.operands.push_back(std::move(*obj));
          continue;
        }
        if (lex.read_keyword() != "ID") lex.fail("inline image without ID", lex.pos());
        break;
      }
      std::size_t start = lex.pos();
      if (start < data.size() && is_whitespace(data[start])) ++start;
      std::size_t end = start;
      for (;;) {
        end = data.find("EI", end);
        if (end == std::string_view::npos) lex.fail("inline image without EI", start);
        const bool before_ok = end > start && is_whitespace(data[end - 1]);
        const bool after_ok = end + 2 >= data.size() || !is_regular(data[end + 2]);
        if (before_ok && after_ok) break;
        end += 2;
      }
      op.inline_data = std::string(data.substr(start, end - 1 - start));
      lex.seek(end + 2);
    }
    ops.push_back(std::move(op));
  }
  if (!operands.empty()) lex.fail("operands without operator at end of stream", lex.pos());
  return ops;
}

/// Decodes (none or Flate) and tokenizes a content stream.
inline std::vector<ContentOp> content_stream_tokens(const Stream& stream) {
  return parse_content(decode_stream(stream));
}

/// One operator per line, operands in PDF syntax.
inline std::string write_content_stream(const std::vector<ContentOp>& ops) {
  std::string out;
  for (const auto& op : ops) {
    for (const auto& operand : op.operands) {
      write_object(out, operand);
      out.push_back(' ');
    }
    out += op.op;
    if (op.op == "BI") {
      out += "\nID ";
      out += op.inline_data;
      out += "\nEI";
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace sipmark::pdf
