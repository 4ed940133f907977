#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "sipmark/error.hpp"
#include "sipmark/pdf/document.hpp"
#include "sipmark/pdf/lexer.hpp"
#include "sipmark/pdf/object.hpp"

namespace sipmark::pdf {

namespace detail {

struct ParsedIndirect {
  Ref ref;
  Object body;
  std::size_t end = 0;
};

class FileParser {
 public:
  explicit FileParser(std::string_view data) : data_(data) {}

  PdfDocument run() {
    read_header();
    bool table_ok = false;
    try {
      table_ok = read_xref_chain();
      if (table_ok) table_ok = load_from_table();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::unsupported_feature) throw;
      table_ok = false;
    }
    if (!table_ok) recover();
    return finish();
  }

 private:
  void read_header() {
    const auto head = data_.substr(0, 1024);
    const auto at = head.find("%PDF-");
    if (at == std::string_view::npos) {
      throw Error(ErrorCode::parse_error, "missing %PDF- header");
    }
    std::size_t end = at + 5;
    while (end < data_.size() && is_regular(data_[end])) ++end;
    doc_.header_version = std::string(data_.substr(at + 5, end - at - 5));
    if (doc_.header_version.empty()) {
      throw Error(ErrorCode::parse_error, "empty version in header");
    }
  }

  // Reads the newest xref section and every /Prev predecessor. Returns
  // false when the table cannot be located.
  bool read_xref_chain() {
    const auto sx = data_.rfind("startxref");
    if (sx == std::string_view::npos) return false;
    Lexer lex(data_, sx + 9);
    auto offset = lex.read_integer();
    if (!offset || *offset < 0 || static_cast<std::size_t>(*offset) >= data_.size()) {
      return false;
    }
    std::set<std::size_t> visited;
    std::optional<std::size_t> next = static_cast<std::size_t>(*offset);
    bool newest = true;
    while (next) {
      if (!visited.insert(*next).second) break;
      Lexer at(data_, *next);
      if (!at.expect_keyword("xref")) {
        at.seek(*next);
        if (looks_like_object_header(at)) {
          throw Error(ErrorCode::unsupported_feature, "cross-reference streams");
        }
        return false;
      }
      read_xref_entries(at);
      if (!at.expect_keyword("trailer")) return false;
      auto trailer = at.parse_dictionary();
      if (trailer.contains("XRefStm")) {
        throw Error(ErrorCode::unsupported_feature, "hybrid cross-reference streams");
      }
      next.reset();
      if (auto* prev = trailer.find("Prev"); prev && prev->integer() && *prev->integer() >= 0) {
        next = static_cast<std::size_t>(*prev->integer());
      }
      if (newest) {
        doc_.trailer = std::move(trailer);
        newest = false;
      }
    }
    return !table_.empty();
  }

  void read_xref_entries(Lexer& lex) {
    for (;;) {
      auto start = lex.read_integer();
      if (!start) return;
      auto count = lex.read_integer();
      if (!count || *start < 0 || *count < 0) lex.fail("bad xref subsection", lex.pos());
      for (std::int64_t k = 0; k < *count; ++k) {
        auto off = lex.read_integer();
        auto gen = lex.read_integer();
        auto type = lex.read_keyword();
        if (!off || !gen || (type != "n" && type != "f")) {
          lex.fail("bad xref entry", lex.pos());
        }
        const auto number = static_cast<std::uint32_t>(*start + k);
        if (!seen_numbers_.insert(number).second) continue;  // newer section wins
        if (type == "n" && number != 0) {
          table_[Ref{number, static_cast<std::uint16_t>(*gen)}] = static_cast<std::size_t>(*off);
        }
      }
    }
  }

  bool load_from_table() {
    for (const auto& [ref, offset] : table_) {
      if (offset >= data_.size()) return false;
      Lexer lex(data_, offset);
      auto parsed = parse_indirect(lex, /*use_table_lengths=*/true);
      if (!parsed || parsed->ref != ref) return false;
      doc_.objects[ref] = std::move(parsed->body);
      doc_.xref[ref] = offset;
    }
    return true;
  }

  // Linear scan for "N G obj" spans; later definitions override earlier.
  void recover() {
    doc_.objects.clear();
    doc_.xref.clear();
    table_.clear();
    std::size_t pos = 0;
    while ((pos = data_.find("obj", pos)) != std::string_view::npos) {
      const std::size_t after = pos + 3;
      if ((after < data_.size() && is_regular(data_[after])) || pos == 0 ||
          !is_whitespace(data_[pos - 1])) {
        pos = after;
        continue;
      }
      auto start = find_header_start(pos);
      if (!start) {
        pos = after;
        continue;
      }
      try {
        Lexer lex(data_, *start);
        auto parsed = parse_indirect(lex, /*use_table_lengths=*/false);
        if (parsed) {
          doc_.objects[parsed->ref] = std::move(parsed->body);
          doc_.xref[parsed->ref] = *start;
          pos = parsed->end;
          continue;
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::unsupported_feature) throw;
      }
      pos = after;
    }
    if (doc_.objects.empty()) throw Error(ErrorCode::parse_error, "no objects found");

    if (!doc_.trailer.contains("Root")) {
      doc_.trailer = Dictionary{};
      auto t = data_.rfind("trailer");
      if (t != std::string_view::npos) {
        try {
          Lexer lex(data_, t + 7);
          lex.skip_whitespace();
          if (data_.substr(lex.pos(), 2) == "<<") doc_.trailer = lex.parse_dictionary();
        } catch (const Error&) {
          doc_.trailer = Dictionary{};
        }
      }
    }
    if (!doc_.trailer.contains("Root")) {
      for (const auto& [ref, body] : doc_.objects) {
        auto* d = body.dict();
        if (d && d->find("Type") && d->find("Type")->name() == "Catalog") {
          doc_.trailer.set("Root", ref);
          break;
        }
      }
    }
  }

  // Walks back from "obj" over "<num> <gen> ". Returns the offset of <num>.
  std::optional<std::size_t> find_header_start(std::size_t obj_pos) const {
    std::size_t i = obj_pos;
    auto skip_ws_back = [&] {
      while (i > 0 && is_whitespace(data_[i - 1])) --i;
    };
    auto skip_digits_back = [&]() -> bool {
      const auto end = i;
      while (i > 0 && data_[i - 1] >= '0' && data_[i - 1] <= '9') --i;
      return i != end;
    };
    skip_ws_back();
    if (!skip_digits_back()) return std::nullopt;
    const auto gen_start = i;
    skip_ws_back();
    if (i == gen_start) return std::nullopt;
    if (!skip_digits_back()) return std::nullopt;
    if (i > 0 && is_regular(data_[i - 1])) return std::nullopt;
    return i;
  }

  bool looks_like_object_header(Lexer& lex) const {
    auto a = lex.read_integer();
    auto b = lex.read_integer();
    return a && b && lex.read_keyword() == "obj";
  }

  std::optional<ParsedIndirect> parse_indirect(Lexer& lex, bool use_table_lengths) {
    auto num = lex.read_integer();
    auto gen = lex.read_integer();
    if (!num || !gen || *num < 0 || *gen < 0 || *gen > 65535) return std::nullopt;
    if (!lex.expect_keyword("obj")) return std::nullopt;
    ParsedIndirect out;
    out.ref = Ref{static_cast<std::uint32_t>(*num), static_cast<std::uint16_t>(*gen)};
    auto body = lex.try_parse_object();
    if (!body) {
      // "N G obj endobj" is tolerated as a null body.
      body = Object(Null{});
    }
    if (body->is<Dictionary>() && lex.peek_keyword() == "stream") {
      lex.read_keyword();
      Stream s;
      s.dict = std::move(*body->get_if<Dictionary>());
      s.data = read_stream_data(lex, s.dict, use_table_lengths);
      body = Object(std::move(s));
    }
    lex.expect_keyword("endobj");
    out.body = std::move(*body);
    out.end = lex.pos();
    return out;
  }

  std::string read_stream_data(Lexer& lex, const Dictionary& dict, bool use_table_lengths) {
    std::size_t p = lex.pos();
    if (p < data_.size() && data_[p] == '\r') ++p;
    if (p < data_.size() && data_[p] == '\n') ++p;
    const std::size_t start = p;

    std::optional<std::int64_t> length;
    if (auto* len = dict.find("Length")) {
      if (len->integer()) {
        length = len->integer();
      } else if (auto* r = len->get_if<Ref>(); r && use_table_lengths) {
        length = indirect_length(*r);
      }
    }
    if (length && *length >= 0 && start + static_cast<std::size_t>(*length) <= data_.size()) {
      Lexer probe(data_, start + static_cast<std::size_t>(*length));
      if (probe.expect_keyword("endstream")) {
        lex.seek(probe.pos());
        return std::string(data_.substr(start, static_cast<std::size_t>(*length)));
      }
    }
    const auto end = data_.find("endstream", start);
    if (end == std::string_view::npos) lex.fail("unterminated stream", start);
    std::size_t data_end = end;
    if (data_end > start && data_[data_end - 1] == '\n') --data_end;
    if (data_end > start && data_[data_end - 1] == '\r') --data_end;
    lex.seek(end + 9);
    return std::string(data_.substr(start, data_end - start));
  }

  std::optional<std::int64_t> indirect_length(Ref r) {
    auto it = table_.find(r);
    if (it == table_.end() || it->second >= data_.size()) return std::nullopt;
    Lexer lex(data_, it->second);
    auto num = lex.read_integer();
    auto gen = lex.read_integer();
    if (!num || !gen || !lex.expect_keyword("obj")) return std::nullopt;
    return lex.read_integer();
  }

  PdfDocument finish() {
    if (doc_.trailer.contains("Encrypt")) {
      throw Error(ErrorCode::unsupported_feature, "encrypted documents");
    }
    for (auto& [ref, body] : doc_.objects) {
      if (auto* s = body.get_if<Stream>()) {
        const auto type = s->dict.find("Type") ? s->dict.find("Type")->name() : "";
        if (type == "ObjStm" || type == "XRef") {
          throw Error(ErrorCode::unsupported_feature,
                      "object or cross-reference streams (object " +
                          std::to_string(ref.number) + ")");
        }
        s->dict.set("Length", Integer{static_cast<std::int64_t>(s->data.size())});
      }
    }
    auto* root = doc_.trailer.find("Root");
    if (!root || !root->is<Ref>() || !doc_.contains(*root->get_if<Ref>()) ||
        !doc_.get(*root->get_if<Ref>()).dict()) {
      throw Error(ErrorCode::parse_error, "unreadable trailer: /Root does not resolve");
    }
    doc_.trailer.erase("Prev");
    doc_.trailer.erase("XRefStm");
    doc_.trailer.set("Size", Integer{static_cast<std::int64_t>(doc_.max_object_number()) + 1});
    return std::move(doc_);
  }

  std::string_view data_;
  PdfDocument doc_;
  std::map<Ref, std::size_t> table_;
  std::set<std::uint32_t> seen_numbers_;
};

}  // namespace detail

/// Parses a complete PDF 1.x file with a classic xref table. Falls back to a
/// linear object scan when the table is missing or its offsets are stale.
inline PdfDocument parse_pdf(std::string_view bytes) {
  return detail::FileParser(bytes).run();
}

}  // namespace sipmark::pdf
