#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "sipmark/error.hpp"

namespace sipmark {

/// Outcome of validate_sip. `diagnostic` names the first violated property
/// and is empty when the sequence is a valid self-inverting permutation.
struct SipVerdict {
  bool valid = false;
  std::string diagnostic;

  explicit operator bool() const noexcept { return valid; }
};

inline SipVerdict validate_sip(std::span<const std::int64_t> seq) {
  const auto n = static_cast<std::int64_t>(seq.size());
  if (n == 0) return {false, "empty sequence"};
  std::vector<bool> seen(seq.size() + 1, false);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto v = seq[i];
    if (v < 1 || v > n) {
      return {false, "not a permutation: element " + std::to_string(v) + " at position " +
                         std::to_string(i + 1) + " is outside [1, " + std::to_string(n) + "]"};
    }
    if (seen[static_cast<std::size_t>(v)]) {
      return {false, "not a permutation: value " + std::to_string(v) + " occurs twice"};
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto image = seq[i];
    const auto back = seq[static_cast<std::size_t>(image - 1)];
    if (back != static_cast<std::int64_t>(i + 1)) {
      return {false, "not an involution: pi(pi(" + std::to_string(i + 1) + ")) = " +
                         std::to_string(back)};
    }
  }
  return {true, {}};
}

inline SipVerdict validate_sip(std::initializer_list<std::int64_t> seq) {
  return validate_sip(std::span<const std::int64_t>(seq.begin(), seq.size()));
}

/// An involution over {1..n}. Construction validates; instances are immutable.
class SelfInvertingPermutation {
 public:
  using value_type = std::uint32_t;

  explicit SelfInvertingPermutation(std::vector<value_type> elements)
      : elements_(std::move(elements)) {
    std::vector<std::int64_t> wide(elements_.begin(), elements_.end());
    if (auto verdict = validate_sip(wide); !verdict) {
      throw Error(ErrorCode::invalid_permutation, verdict.diagnostic);
    }
  }

  SelfInvertingPermutation(std::initializer_list<value_type> elements)
      : SelfInvertingPermutation(std::vector<value_type>(elements)) {}

  std::size_t size() const noexcept { return elements_.size(); }

  /// 1-based access: pi(i) for i in [1, size()].
  value_type operator()(std::size_t i) const { return elements_.at(i - 1); }

  std::span<const value_type> elements() const noexcept { return elements_; }

  std::vector<value_type> fixed_points() const {
    std::vector<value_type> out;
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      if (elements_[i] == i + 1) out.push_back(static_cast<value_type>(i + 1));
    }
    return out;
  }

  friend bool operator==(const SelfInvertingPermutation&,
                         const SelfInvertingPermutation&) = default;
  friend auto operator<=>(const SelfInvertingPermutation&,
                          const SelfInvertingPermutation&) = default;

 private:
  std::vector<value_type> elements_;
};

inline std::string to_string(const SelfInvertingPermutation& pi) {
  std::string out = "(";
  for (std::size_t i = 1; i <= pi.size(); ++i) {
    if (i > 1) out += ',';
    out += std::to_string(pi(i));
  }
  out += ')';
  return out;
}

/// Intermediate of the watermark codec: the bit string b* = 0^n | bin(w) | 1,
/// its ascending 1-indices X, descending 0-indices Y, and the bitonic X|Y.
struct BitonicIntermediate {
  std::size_t half = 0;  // n, the bit length of w
  std::vector<bool> bits;  // b*, 1-based view via bit(i)
  std::vector<std::uint32_t> ones;
  std::vector<std::uint32_t> zeros;
  std::vector<std::uint32_t> bitonic;

  std::size_t length() const noexcept { return bits.size(); }
  bool bit(std::size_t i) const { return bits.at(i - 1); }
};

inline constexpr std::uint64_t kMaxWatermark = ~std::uint64_t{0};

inline BitonicIntermediate make_bitonic(std::uint64_t w) {
  if (w == 0) throw Error(ErrorCode::invalid_watermark, "watermark must be >= 1");
  BitonicIntermediate out;
  out.half = static_cast<std::size_t>(std::bit_width(w));
  const std::size_t n = out.half;
  out.bits.assign(2 * n + 1, false);
  for (std::size_t k = 0; k < n; ++k) {
    // most significant bit of w lands at position n+1
    out.bits[n + k] = ((w >> (n - 1 - k)) & 1u) != 0;
  }
  out.bits[2 * n] = true;
  for (std::size_t i = 1; i <= out.bits.size(); ++i) {
    if (out.bit(i)) out.ones.push_back(static_cast<std::uint32_t>(i));
  }
  for (std::size_t i = out.bits.size(); i >= 1; --i) {
    if (!out.bit(i)) out.zeros.push_back(static_cast<std::uint32_t>(i));
  }
  out.bitonic = out.ones;
  out.bitonic.insert(out.bitonic.end(), out.zeros.begin(), out.zeros.end());
  return out;
}

/// Watermark integer -> SiP of odd length 2n+1 with a single fixed point.
inline SelfInvertingPermutation encode_w_to_sip(std::uint64_t w) {
  const auto b = make_bitonic(w);
  const std::size_t n_star = b.length();
  std::vector<std::uint32_t> pi(n_star, 0);
  for (std::size_t i = 0; i < b.half; ++i) {
    const auto a = b.bitonic[i];
    const auto c = b.bitonic[n_star - 1 - i];
    pi[a - 1] = c;
    pi[c - 1] = a;
  }
  const auto middle = b.bitonic[b.half];
  pi[middle - 1] = middle;
  return SelfInvertingPermutation(std::move(pi));
}

/// Inverse of encode_w_to_sip. Throws not_a_watermark for any SiP outside
/// the encoder's image.
inline std::uint64_t decode_sip_to_w(const SelfInvertingPermutation& pi) {
  const std::size_t n_star = pi.size();
  if (n_star < 3 || n_star % 2 == 0) {
    throw Error(ErrorCode::not_a_watermark,
                "length " + std::to_string(n_star) + " is not odd and >= 3");
  }
  const auto fixed = pi.fixed_points();
  if (fixed.size() != 1) {
    throw Error(ErrorCode::not_a_watermark,
                std::to_string(fixed.size()) + " fixed points, expected exactly one");
  }
  const std::size_t n = (n_star - 1) / 2;
  if (n > 64) throw Error(ErrorCode::not_a_watermark, "watermark wider than 64 bits");

  std::vector<std::uint32_t> ones;
  for (std::size_t i = 1; i <= n; ++i) {
    if (!ones.empty() && pi(i) <= ones.back()) break;
    ones.push_back(pi(i));
  }
  if (ones.size() == n && fixed.front() > ones.back()) ones.push_back(fixed.front());

  std::vector<bool> bits(n_star, false);
  for (auto x : ones) bits[x - 1] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (bits[i]) throw Error(ErrorCode::not_a_watermark, "b* has a 1 in its zero prefix");
  }
  if (!bits[n]) throw Error(ErrorCode::not_a_watermark, "b* lacks the leading 1 at n+1");
  if (!bits[2 * n]) throw Error(ErrorCode::not_a_watermark, "b* lacks the trailing 1");

  std::uint64_t w = 0;
  for (std::size_t i = n; i < 2 * n; ++i) w = (w << 1) | (bits[i] ? 1u : 0u);
  if (encode_w_to_sip(w) != pi) {
    throw Error(ErrorCode::not_a_watermark, to_string(pi) + " is not in the encoder image");
  }
  return w;
}

}  // namespace sipmark
