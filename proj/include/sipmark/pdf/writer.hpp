#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "sipmark/pdf/lexer.hpp"
#include "sipmark/pdf/object.hpp"

namespace sipmark::pdf {

/// Shortest fixed-notation spelling that reads back to the same double.
/// Always contains a '.', so a Real never reparses as an Integer.
inline std::string format_real(double v) {
  if (!std::isfinite(v)) v = 0.0;
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  std::array<char, 400> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
  std::string out(buf.data(), ptr);
  if (out.find('.') == std::string::npos) out += ".0";
  return out;
}

/// Number for content streams: integers without a fraction, others shortest.
inline std::string format_number(double v) {
  if (std::isfinite(v) && v == std::trunc(v) && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  return format_real(v);
}

inline void write_name(std::string& out, std::string_view name) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  out.push_back('/');
  for (unsigned char c : name) {
    if (c < 0x21 || c > 0x7E || c == '#' || is_delimiter(static_cast<char>(c))) {
      out.push_back('#');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
}

inline void write_string(std::string& out, std::string_view bytes) {
  out.push_back('(');
  for (unsigned char c : bytes) {
    switch (c) {
      case '(': out += "\\("; break;
      case ')': out += "\\)"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20 || c >= 0x7F) {
          out.push_back('\\');
          out.push_back(static_cast<char>('0' + ((c >> 6) & 7)));
          out.push_back(static_cast<char>('0' + ((c >> 3) & 7)));
          out.push_back(static_cast<char>('0' + (c & 7)));
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back(')');
}

inline void write_object(std::string& out, const Object& obj);

inline void write_dictionary(std::string& out, const Dictionary& dict) {
  out += "<<";
  for (const auto& e : dict) {
    write_name(out, e.key);
    out.push_back(' ');
    write_object(out, e.value);
  }
  out += ">>";
}

/// Direct-object serialization. Streams write their dictionary followed by
/// the stream/endstream framing; /Length is emitted from the payload size.
inline void write_object(std::string& out, const Object& obj) {
  struct Visitor {
    std::string& out;
    void operator()(Null) const { out += "null"; }
    void operator()(Boolean b) const { out += b.value ? "true" : "false"; }
    void operator()(Integer i) const { out += std::to_string(i.value); }
    void operator()(Real r) const { out += format_real(r.value); }
    void operator()(const String& s) const { write_string(out, s.bytes); }
    void operator()(const Name& n) const { write_name(out, n.value); }
    void operator()(const Array& a) const {
      out.push_back('[');
      bool first = true;
      for (const auto& item : a.items) {
        if (!first) out.push_back(' ');
        first = false;
        write_object(out, item);
      }
      out.push_back(']');
    }
    void operator()(const Dictionary& d) const { write_dictionary(out, d); }
    void operator()(const Stream& s) const {
      Dictionary dict = s.dict;
      dict.set("Length", Integer{static_cast<std::int64_t>(s.data.size())});
      write_dictionary(out, dict);
      out += "\nstream\n";
      out += s.data;
      out += "\nendstream";
    }
    void operator()(Ref r) const { out += to_string(r); }
  };
  std::visit(Visitor{out}, obj.value());
}

inline std::string to_pdf_string(const Object& obj) {
  std::string out;
  write_object(out, obj);
  return out;
}

}  // namespace sipmark::pdf
