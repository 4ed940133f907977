#pragma once

#include <zlib.h>

#include <string>
#include <string_view>
#include <vector>

#include "sipmark/error.hpp"
#include "sipmark/pdf/object.hpp"

namespace sipmark::pdf {

inline std::string flate_decode(std::string_view data) {
  z_stream strm{};
  if (inflateInit(&strm) != Z_OK) {
    throw Error(ErrorCode::parse_error, "inflateInit failed");
  }
  std::string out;
  char buffer[16384];
  strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  strm.avail_in = static_cast<uInt>(data.size());
  int ret = Z_OK;
  do {
    strm.next_out = reinterpret_cast<Bytef*>(buffer);
    strm.avail_out = sizeof buffer;
    ret = inflate(&strm, Z_NO_FLUSH);
    if (ret == Z_NEED_DICT || ret == Z_DATA_ERROR || ret == Z_MEM_ERROR ||
        ret == Z_STREAM_ERROR) {
      inflateEnd(&strm);
      throw Error(ErrorCode::parse_error, "corrupt Flate data");
    }
    out.append(buffer, sizeof buffer - strm.avail_out);
    // Truncated input: keep what inflated so far.
    if (ret == Z_BUF_ERROR) break;
  } while (ret != Z_STREAM_END);
  inflateEnd(&strm);
  return out;
}

inline std::string flate_encode(std::string_view data) {
  uLongf bound = compressBound(static_cast<uLong>(data.size()));
  std::string out(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                reinterpret_cast<const Bytef*>(data.data()), static_cast<uLong>(data.size()),
                Z_BEST_COMPRESSION) != Z_OK) {
    throw Error(ErrorCode::serialization_error, "Flate compression failed");
  }
  out.resize(bound);
  return out;
}

inline std::vector<std::string> stream_filters(const Stream& s) {
  std::vector<std::string> out;
  auto* f = s.dict.find("Filter");
  if (!f) return out;
  if (auto* n = f->get_if<Name>()) {
    out.push_back(n->value);
  } else if (auto* a = f->get_if<Array>()) {
    for (const auto& item : a->items) out.emplace_back(item.name());
  }
  return out;
}

/// Decoded payload of a stream. Only unfiltered and FlateDecode streams
/// (without predictors) are supported.
inline std::string decode_stream(const Stream& s) {
  const auto filters = stream_filters(s);
  if (filters.empty()) return s.data;
  if (filters.size() == 1 && (filters.front() == "FlateDecode" || filters.front() == "Fl")) {
    if (auto* parms = s.dict.find("DecodeParms"); parms && parms->dict()) {
      auto* predictor = parms->dict()->find("Predictor");
      if (predictor && predictor->integer().value_or(1) > 1) {
        throw Error(ErrorCode::unsupported_feature, "Flate predictors");
      }
    }
    return flate_decode(s.data);
  }
  std::string names;
  for (const auto& f : filters) names += (names.empty() ? "" : ",") + f;
  throw Error(ErrorCode::unsupported_feature, "stream filter " + names);
}

/// Replaces the payload with unfiltered `data` and drops filter entries.
inline void set_stream_plain(Stream& s, std::string data) {
  s.dict.erase("Filter");
  s.dict.erase("DecodeParms");
  s.data = std::move(data);
  s.dict.set("Length", Integer{static_cast<std::int64_t>(s.data.size())});
}

}  // namespace sipmark::pdf
