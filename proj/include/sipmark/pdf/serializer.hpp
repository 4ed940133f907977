#pragma once

#include <cstdio>
#include <map>
#include <set>
#include <string>

#include "sipmark/error.hpp"
#include "sipmark/pdf/document.hpp"
#include "sipmark/pdf/writer.hpp"

namespace sipmark::pdf {

/// Full rewrite of `doc`: header, objects in ascending number order, a fresh
/// xref table with byte-exact offsets, and the trailer with a correct /Size.
inline std::string serialize_pdf(const PdfDocument& doc) {
  std::set<std::uint32_t> numbers;
  for (const auto& [ref, body] : doc.objects) {
    if (ref.number == 0) throw Error(ErrorCode::serialization_error, "object number 0");
    if (!numbers.insert(ref.number).second) {
      throw Error(ErrorCode::serialization_error,
                  "object number " + std::to_string(ref.number) + " has two generations");
    }
  }
  auto check_refs = [&](const Object& obj) {
    for_each_ref(obj, [&](Ref r) {
      if (!doc.contains(r)) {
        throw Error(ErrorCode::serialization_error, "dangling reference " + to_string(r));
      }
    });
  };
  for (const auto& [ref, body] : doc.objects) check_refs(body);
  check_refs(Object(doc.trailer));

  std::string out;
  out += "%PDF-" + doc.header_version + "\n%\xE2\xE3\xCF\xD3\n";

  std::map<std::uint32_t, std::pair<std::size_t, std::uint16_t>> offsets;
  for (const auto& [ref, body] : doc.objects) {
    offsets[ref.number] = {out.size(), ref.generation};
    out += std::to_string(ref.number) + " " + std::to_string(ref.generation) + " obj\n";
    write_object(out, body);
    out += "\nendobj\n";
  }

  const std::size_t xref_at = out.size();
  const std::uint32_t size = doc.max_object_number() + 1;
  out += "xref\n0 " + std::to_string(size) + "\n";
  char entry[32];
  for (std::uint32_t n = 0; n < size; ++n) {
    auto it = offsets.find(n);
    if (it == offsets.end()) {
      out += "0000000000 65535 f\r\n";
    } else {
      std::snprintf(entry, sizeof entry, "%010zu %05u n\r\n", it->second.first,
                    static_cast<unsigned>(it->second.second));
      out += entry;
    }
  }

  Dictionary trailer = doc.trailer;
  trailer.erase("Prev");
  trailer.erase("XRefStm");
  trailer.set("Size", Integer{static_cast<std::int64_t>(size)});
  out += "trailer\n";
  write_dictionary(out, trailer);
  out += "\nstartxref\n" + std::to_string(xref_at) + "\n%%EOF\n";
  return out;
}

}  // namespace sipmark::pdf
