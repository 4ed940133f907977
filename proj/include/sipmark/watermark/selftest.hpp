#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "sipmark/error.hpp"
#include "sipmark/sip.hpp"

namespace sipmark {

/// All involutions of {1..n} in lexicographic order.
inline std::vector<SelfInvertingPermutation> enumerate_involutions(std::size_t n) {
  std::vector<SelfInvertingPermutation> out;
  std::vector<std::uint32_t> cur(n, 0);
  std::function<void(std::size_t)> fill = [&](std::size_t i) {
    while (i < n && cur[i] != 0) ++i;
    if (i == n) {
      out.emplace_back(cur);
      return;
    }
    cur[i] = static_cast<std::uint32_t>(i + 1);
    fill(i + 1);
    cur[i] = 0;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (cur[j] != 0) continue;
      cur[i] = static_cast<std::uint32_t>(j + 1);
      cur[j] = static_cast<std::uint32_t>(i + 1);
      fill(i + 1);
      cur[i] = cur[j] = 0;
    }
  };
  if (n > 0) fill(0);
  std::sort(out.begin(), out.end());
  return out;
}

/// I(n) = I(n-1) + (n-1) I(n-2), I(0) = I(1) = 1.
inline std::uint64_t involution_count(std::size_t n) {
  std::uint64_t a = 1, b = 1;
  for (std::size_t k = 2; k <= n; ++k) {
    const std::uint64_t c = b + (k - 1) * a;
    a = b;
    b = c;
  }
  return b;
}

/// The codec entry points under test; a caller may swap any of them.
struct CodecFunctions {
  std::function<MarkedArray1D(const SelfInvertingPermutation&)> to_1dm = sip_to_1dm;
  std::function<SelfInvertingPermutation(const MarkedArray1D&)> from_1dm = onedm_to_sip;
  std::function<MarkedMatrix2D(const SelfInvertingPermutation&)> to_2dm = sip_to_2dm;
  std::function<SelfInvertingPermutation(const MarkedMatrix2D&)> from_2dm = twodm_to_sip;
  std::function<ReduciblePermutationGraph(const SelfInvertingPermutation&)> to_rpg =
      encode_sip_to_rpg;
  std::function<SelfInvertingPermutation(const ReduciblePermutationGraph&)> from_rpg =
      decode_rpg_to_sip;
  std::function<SelfInvertingPermutation(std::uint64_t)> encode_w = encode_w_to_sip;
  std::function<std::uint64_t(const SelfInvertingPermutation&)> decode_w = decode_sip_to_w;
};

struct SelftestLength {
  std::size_t n = 0;
  std::uint64_t involutions = 0;
  std::uint64_t expected = 0;
  std::uint64_t failures = 0;
};

struct SelftestReport {
  std::vector<SelftestLength> lengths;
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  std::vector<std::string> notes;  // first few failures

  bool passed() const { return failures == 0 && checks > 0; }
};

/// Exhaustive codec suite: every involution up to `max_n` through the three
/// representations, injectivity of the graph encoding, and the watermark
/// round trip for 1..`max_w`.
inline SelftestReport run_selftest(const CodecFunctions& fns = {}, std::size_t max_n = 9,
                                   std::uint64_t max_w = 4096) {
  SelftestReport report;
  auto record = [&](bool ok, const std::string& what) {
    ++report.checks;
    if (ok) return true;
    ++report.failures;
    if (report.notes.size() < 10) report.notes.push_back(what);
    return false;
  };
  auto guarded = [&](const std::string& what, auto&& fn) {
    try {
      return record(fn(), what);
    } catch (const std::exception& e) {
      return record(false, what + ": " + e.what());
    }
  };

  std::set<std::set<ReduciblePermutationGraph::Edge>> edge_sets;
  for (std::size_t n = 1; n <= max_n; ++n) {
    SelftestLength len{n, 0, involution_count(n), 0};
    const auto before = report.failures;
    const auto all = enumerate_involutions(n);
    len.involutions = all.size();
    record(len.involutions == len.expected, "involution count at n=" + std::to_string(n));
    for (const auto& pi : all) {
      const auto name = to_string(pi);
      guarded("1dm " + name, [&] { return fns.from_1dm(fns.to_1dm(pi)) == pi; });
      guarded("2dm " + name, [&] { return fns.from_2dm(fns.to_2dm(pi)) == pi; });
      guarded("rpg " + name, [&] {
        const auto g = fns.to_rpg(pi);
        const bool fresh = edge_sets.insert(g.back_edges).second;
        return fresh && fns.from_rpg(g) == pi;
      });
    }
    len.failures = report.failures - before;
    report.lengths.push_back(len);
  }
  for (std::uint64_t w = 1; w <= max_w; ++w) {
    guarded("w=" + std::to_string(w), [&] { return fns.decode_w(fns.encode_w(w)) == w; });
  }
  return report;
}

}  // namespace sipmark
