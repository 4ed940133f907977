#pragma once

#include <sstream>
#include <string>

#include "sipmark/sip/permutation.hpp"
#include "sipmark/sip/representations.hpp"
#include "sipmark/sip/rpg.hpp"

// Line-oriented text dumps of each representation, used for golden files.
namespace sipmark {

inline std::string dump(const SelfInvertingPermutation& pi) {
  std::ostringstream os;
  os << "sip n*=" << pi.size() << '\n';
  for (std::size_t i = 1; i <= pi.size(); ++i) os << "map " << i << ' ' << pi(i) << '\n';
  return os.str();
}

inline std::string dump(const MarkedArray1D& arr) {
  std::ostringstream os;
  std::size_t n = 0;
  while (n * n < arr.length) ++n;
  os << "1dm length=" << arr.length << '\n';
  for (std::size_t k = 0; k < arr.marked_positions.size(); ++k) {
    const auto p = arr.marked_positions[k];
    os << "mark " << p << " label " << (n == 0 ? 0 : p - k * n) << '\n';
  }
  return os.str();
}

inline std::string dump(const MarkedMatrix2D& mat) {
  std::ostringstream os;
  os << "2dm size=" << mat.size << '\n';
  for (const auto& [r, c] : mat.marked_cells) os << "cell " << r << ' ' << c << '\n';
  return os.str();
}

inline std::string dump(const ReduciblePermutationGraph& g) {
  std::ostringstream os;
  os << "rpg nodes=" << g.node_count() << '\n';
  for (const auto& [a, b] : g.path_edges()) os << "path u" << a << " u" << b << '\n';
  for (const auto& [a, b] : g.back_edges) os << "back u" << a << " u" << b << '\n';
  if (g.has_closing_edge) os << "closing u0 u" << g.order + 1 << '\n';
  return os.str();
}

}  // namespace sipmark
