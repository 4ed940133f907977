#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sipmark/error.hpp"

namespace sipmark::pdf {

struct Null {
  friend bool operator==(Null, Null) = default;
};

struct Boolean {
  bool value = false;
  friend bool operator==(Boolean, Boolean) = default;
};

struct Integer {
  std::int64_t value = 0;
  friend bool operator==(Integer, Integer) = default;
};

struct Real {
  double value = 0.0;
  friend bool operator==(Real, Real) = default;
};

/// Raw string bytes. Literal and hex spellings parse to the same value.
struct String {
  std::string bytes;
  friend bool operator==(const String&, const String&) = default;
};

/// Decoded name, without the leading slash and with #xx escapes resolved.
struct Name {
  std::string value;
  friend bool operator==(const Name&, const Name&) = default;
};

/// "N G R". Also used as the key of the document object table.
struct Ref {
  std::uint32_t number = 0;
  std::uint16_t generation = 0;
  friend auto operator<=>(const Ref&, const Ref&) = default;
};

inline std::string to_string(Ref r) {
  return std::to_string(r.number) + " " + std::to_string(r.generation) + " R";
}

class Object;
struct DictEntry;

struct Array {
  std::vector<Object> items;

  friend bool operator==(const Array&, const Array&);
};

/// Name -> Object map that keeps insertion order. Keys are unique.
class Dictionary {
 public:
  using iterator = std::vector<DictEntry>::iterator;
  using const_iterator = std::vector<DictEntry>::const_iterator;

  const Object* find(std::string_view key) const;
  Object* find(std::string_view key);
  bool contains(std::string_view key) const { return find(key) != nullptr; }

  /// Replaces the value in place when the key exists, appends otherwise.
  void set(std::string key, Object value);
  bool erase(std::string_view key);

  std::size_t size() const noexcept;
  bool empty() const noexcept;
  const_iterator begin() const;
  const_iterator end() const;
  iterator begin();
  iterator end();

  friend bool operator==(const Dictionary&, const Dictionary&);

 private:
  std::vector<DictEntry> entries_;
};

/// A stream keeps its payload exactly as stored in the file (still filtered).
struct Stream {
  Dictionary dict;
  std::string data;

  friend bool operator==(const Stream&, const Stream&) = default;
};

enum class ObjectKind { boolean, numeric, string, name, array, null, dictionary, stream, reference };

constexpr std::string_view to_string(ObjectKind kind) noexcept {
  switch (kind) {
    case ObjectKind::boolean: return "boolean";
    case ObjectKind::numeric: return "numeric";
    case ObjectKind::string: return "string";
    case ObjectKind::name: return "name";
    case ObjectKind::array: return "array";
    case ObjectKind::null: return "null";
    case ObjectKind::dictionary: return "dictionary";
    case ObjectKind::stream: return "stream";
    case ObjectKind::reference: return "reference";
  }
  return "unknown";
}

class Object {
 public:
  using Value =
      std::variant<Null, Boolean, Integer, Real, String, Name, Array, Dictionary, Stream, Ref>;

  Object() = default;
  Object(Null v) : value_(v) {}
  Object(Boolean v) : value_(v) {}
  Object(Integer v) : value_(v) {}
  Object(Real v) : value_(v) {}
  Object(String v) : value_(std::move(v)) {}
  Object(Name v) : value_(std::move(v)) {}
  Object(Array v) : value_(std::move(v)) {}
  Object(Dictionary v) : value_(std::move(v)) {}
  Object(Stream v) : value_(std::move(v)) {}
  Object(Ref v) : value_(v) {}

  ObjectKind kind() const noexcept {
    switch (value_.index()) {
      case 0: return ObjectKind::null;
      case 1: return ObjectKind::boolean;
      case 2:
      case 3: return ObjectKind::numeric;
      case 4: return ObjectKind::string;
      case 5: return ObjectKind::name;
      case 6: return ObjectKind::array;
      case 7: return ObjectKind::dictionary;
      case 8: return ObjectKind::stream;
      default: return ObjectKind::reference;
    }
  }

  template <typename T>
  bool is() const noexcept {
    return std::holds_alternative<T>(value_);
  }
  template <typename T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&value_);
  }
  template <typename T>
  T* get_if() noexcept {
    return std::get_if<T>(&value_);
  }

  bool is_number() const noexcept { return is<Integer>() || is<Real>(); }

  std::optional<double> number() const noexcept {
    if (auto* i = get_if<Integer>()) return static_cast<double>(i->value);
    if (auto* r = get_if<Real>()) return r->value;
    return std::nullopt;
  }

  std::optional<std::int64_t> integer() const noexcept {
    if (auto* i = get_if<Integer>()) return i->value;
    return std::nullopt;
  }

  /// Name value or empty view.
  std::string_view name() const noexcept {
    if (auto* n = get_if<Name>()) return n->value;
    return {};
  }

  /// The dictionary of a Dictionary or of a Stream.
  const Dictionary* dict() const noexcept {
    if (auto* d = get_if<Dictionary>()) return d;
    if (auto* s = get_if<Stream>()) return &s->dict;
    return nullptr;
  }
  Dictionary* dict() noexcept {
    if (auto* d = get_if<Dictionary>()) return d;
    if (auto* s = get_if<Stream>()) return &s->dict;
    return nullptr;
  }

  const Value& value() const noexcept { return value_; }

  friend bool operator==(const Object&, const Object&) = default;

 private:
  Value value_;
};

struct DictEntry {
  std::string key;
  Object value;

  friend bool operator==(const DictEntry&, const DictEntry&) = default;
};

inline bool operator==(const Array& a, const Array& b) { return a.items == b.items; }
inline bool operator==(const Dictionary& a, const Dictionary& b) {
  return a.entries_ == b.entries_;
}

inline const Object* Dictionary::find(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return &e.value;
  }
  return nullptr;
}

inline Object* Dictionary::find(std::string_view key) {
  for (auto& e : entries_) {
    if (e.key == key) return &e.value;
  }
  return nullptr;
}

inline void Dictionary::set(std::string key, Object value) {
  if (auto* existing = find(key)) {
    *existing = std::move(value);
    return;
  }
  entries_.push_back(DictEntry{std::move(key), std::move(value)});
}

inline bool Dictionary::erase(std::string_view key) {
  for (auto it = entries_.begin(); it != entries_.end(); ++it) {
    if (it->key == key) {
      entries_.erase(it);
      return true;
    }
  }
  return false;
}

inline std::size_t Dictionary::size() const noexcept { return entries_.size(); }
inline bool Dictionary::empty() const noexcept { return entries_.empty(); }
inline Dictionary::const_iterator Dictionary::begin() const { return entries_.begin(); }
inline Dictionary::const_iterator Dictionary::end() const { return entries_.end(); }
inline Dictionary::iterator Dictionary::begin() { return entries_.begin(); }
inline Dictionary::iterator Dictionary::end() { return entries_.end(); }

// Small constructors that keep call sites readable.
inline Object make_name(std::string v) { return Name{std::move(v)}; }
inline Object make_int(std::int64_t v) { return Integer{v}; }
inline Object make_real(double v) { return Real{v}; }
inline Object make_string(std::string v) { return String{std::move(v)}; }

/// Visits every Ref reachable inside `obj` without following references.
/// `skip_key` names a dictionary key whose subtree is ignored (e.g. "Parent").
template <typename Fn>
void for_each_ref(const Object& obj, Fn&& fn, std::string_view skip_key = {}) {
  if (auto* r = obj.get_if<Ref>()) {
    fn(*r);
  } else if (auto* a = obj.get_if<Array>()) {
    for (const auto& item : a->items) for_each_ref(item, fn, skip_key);
  } else if (auto* d = obj.dict()) {
    for (const auto& e : *d) {
      if (!skip_key.empty() && e.key == skip_key) continue;
      for_each_ref(e.value, fn, skip_key);
    }
  }
}

}  // namespace sipmark::pdf
