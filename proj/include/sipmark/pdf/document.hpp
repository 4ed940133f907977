#pragma once

#include <cstddef>
#include <map>
#include <sstream>
#include <string>

#include "sipmark/error.hpp"
#include "sipmark/pdf/object.hpp"

namespace sipmark::pdf {

/// A parsed PDF file: header version, the indirect-object table, trailer,
/// and the xref offsets recorded when the file was read.
///
/// Single-owner mutable value. Parsing normalizes two things so that
/// parse -> serialize -> parse is a fixpoint: every stream's /Length becomes
/// a direct integer equal to its payload size, and the trailer loses /Prev
/// and /XRefStm and gets /Size = highest object number + 1.
class PdfDocument {
 public:
  std::string header_version = "1.4";
  std::map<Ref, Object> objects;
  Dictionary trailer;
  std::map<Ref, std::size_t> xref;

  bool contains(Ref r) const { return objects.contains(r); }

  const Object& get(Ref r) const {
    auto it = objects.find(r);
    if (it == objects.end()) {
      throw Error(ErrorCode::malformed_document, "unresolved reference " + to_string(r));
    }
    return it->second;
  }

  Object& get(Ref r) {
    auto it = objects.find(r);
    if (it == objects.end()) {
      throw Error(ErrorCode::malformed_document, "unresolved reference " + to_string(r));
    }
    return it->second;
  }

  std::uint32_t max_object_number() const {
    return objects.empty() ? 0 : objects.rbegin()->first.number;
  }

  /// New objects always get generation 0 and the next free number.
  Ref add(Object body) {
    const Ref r{max_object_number() + 1, 0};
    objects.emplace(r, std::move(body));
    return r;
  }

  /// Object-model equality: version, objects and trailer (xref offsets are
  /// a property of one particular byte layout and are not compared).
  friend bool same_object_model(const PdfDocument& a, const PdfDocument& b) {
    return a.header_version == b.header_version && a.objects == b.objects &&
           a.trailer == b.trailer;
  }
};

/// Follows "N G R" to the object body.
inline const Object& resolve_ref(const PdfDocument& doc, Ref r) { return doc.get(r); }

/// Returns `obj` itself, or its target when it is a reference. Chains of
/// references are followed up to a small bound.
inline const Object& resolve(const PdfDocument& doc, const Object& obj) {
  const Object* cur = &obj;
  for (int hops = 0; hops < 32; ++hops) {
    auto* r = cur->get_if<Ref>();
    if (!r) return *cur;
    cur = &doc.get(*r);
  }
  throw Error(ErrorCode::malformed_document, "reference chain too long");
}

/// Looks up `key` in a dictionary and resolves the value; nullptr if absent.
inline const Object* lookup(const PdfDocument& doc, const Dictionary& dict,
                            std::string_view key) {
  auto* v = dict.find(key);
  return v ? &resolve(doc, *v) : nullptr;
}

inline const Dictionary& catalog(const PdfDocument& doc) {
  auto* root = doc.trailer.find("Root");
  if (!root) throw Error(ErrorCode::malformed_document, "trailer has no /Root");
  auto* dict = resolve(doc, *root).dict();
  if (!dict) throw Error(ErrorCode::malformed_document, "/Root is not a dictionary");
  return *dict;
}

/// Canonical text dump of the object table: one line per object with its
/// number, generation, kind and top-level keys, then the trailer keys.
inline std::string dump_objects(const PdfDocument& doc) {
  std::ostringstream os;
  os << "pdf " << doc.header_version << " objects=" << doc.objects.size() << '\n';
  for (const auto& [ref, body] : doc.objects) {
    os << ref.number << ' ' << ref.generation << ' ' << to_string(body.kind());
    if (auto* d = body.dict()) {
      for (const auto& e : *d) os << " /" << e.key;
    }
    os << '\n';
  }
  os << "trailer";
  for (const auto& e : doc.trailer) os << " /" << e.key;
  os << '\n';
  return os.str();
}

}  // namespace sipmark::pdf
