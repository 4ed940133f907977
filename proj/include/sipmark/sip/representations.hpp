#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sipmark/error.hpp"
#include "sipmark/sip/permutation.hpp"

namespace sipmark {

/// 1DM form: an array of n*^2 cells with cell (i-1)n* + pi_i marked.
/// Positions are 1-based and kept in ascending order.
struct MarkedArray1D {
  std::size_t length = 0;
  std::vector<std::size_t> marked_positions;

  friend bool operator==(const MarkedArray1D&, const MarkedArray1D&) = default;
};

/// 2DM form: an n* x n* matrix with cell (i, pi_i) marked. 1-based cells.
struct MarkedMatrix2D {
  using Cell = std::pair<std::size_t, std::size_t>;

  std::size_t size = 0;
  std::set<Cell> marked_cells;

  bool is_marked(std::size_t row, std::size_t col) const {
    return marked_cells.contains({row, col});
  }

  friend bool operator==(const MarkedMatrix2D&, const MarkedMatrix2D&) = default;
};

inline MarkedArray1D sip_to_1dm(const SelfInvertingPermutation& pi) {
  const std::size_t n = pi.size();
  MarkedArray1D out;
  out.length = n * n;
  out.marked_positions.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) out.marked_positions.push_back((i - 1) * n + pi(i));
  return out;
}

inline SelfInvertingPermutation onedm_to_sip(const MarkedArray1D& arr) {
  std::size_t n = 0;
  while ((n + 1) * (n + 1) <= arr.length) ++n;
  if (n == 0 || n * n != arr.length) {
    throw Error(ErrorCode::invalid_permutation,
                "array length " + std::to_string(arr.length) + " is not a positive square");
  }
  if (arr.marked_positions.size() != n) {
    throw Error(ErrorCode::invalid_permutation,
                "expected " + std::to_string(n) + " marks, found " +
                    std::to_string(arr.marked_positions.size()));
  }
  std::vector<std::uint32_t> elements;
  elements.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const auto p = arr.marked_positions[i - 1];
    const auto lo = (i - 1) * n;
    if (p <= lo || p > i * n) {
      throw Error(ErrorCode::invalid_permutation,
                  "mark " + std::to_string(p) + " lies outside block " + std::to_string(i) +
                      " = (" + std::to_string(lo) + ", " + std::to_string(i * n) + "]");
    }
    elements.push_back(static_cast<std::uint32_t>(p - lo));
  }
  return SelfInvertingPermutation(std::move(elements));
}

inline MarkedMatrix2D sip_to_2dm(const SelfInvertingPermutation& pi) {
  MarkedMatrix2D out;
  out.size = pi.size();
  for (std::size_t i = 1; i <= pi.size(); ++i) out.marked_cells.insert({i, pi(i)});
  return out;
}

/// Checks the structural properties every SiP matrix has: one mark per row
/// and column, symmetry. Returns an empty string when they hold.
inline std::string check_matrix_structure(const MarkedMatrix2D& mat) {
  std::vector<std::size_t> per_row(mat.size + 1, 0), per_col(mat.size + 1, 0);
  for (const auto& [r, c] : mat.marked_cells) {
    if (r < 1 || r > mat.size || c < 1 || c > mat.size) {
      return "cell (" + std::to_string(r) + "," + std::to_string(c) + ") outside the matrix";
    }
    ++per_row[r];
    ++per_col[c];
  }
  for (std::size_t i = 1; i <= mat.size; ++i) {
    if (per_row[i] != 1) {
      return "row " + std::to_string(i) + " has " + std::to_string(per_row[i]) + " marks";
    }
    if (per_col[i] != 1) {
      return "column " + std::to_string(i) + " has " + std::to_string(per_col[i]) + " marks";
    }
  }
  for (const auto& [r, c] : mat.marked_cells) {
    if (!mat.is_marked(c, r)) {
      return "asymmetric: (" + std::to_string(r) + "," + std::to_string(c) +
             ") marked but its mirror is not";
    }
  }
  return {};
}

/// The diagonal properties that matrices of encoded watermarks have: one
/// marked diagonal cell (i, i) with ceil(n*/2)+1 <= i <= n*.
inline std::string check_watermark_diagonal(const MarkedMatrix2D& mat) {
  std::vector<std::size_t> diagonal;
  for (const auto& [r, c] : mat.marked_cells) {
    if (r == c) diagonal.push_back(r);
  }
  if (diagonal.size() != 1) {
    return std::to_string(diagonal.size()) + " marked diagonal cells, expected one";
  }
  const std::size_t lo = (mat.size + 1) / 2 + 1;
  if (diagonal.front() < lo || diagonal.front() > mat.size) {
    return "diagonal mark (" + std::to_string(diagonal.front()) + "," +
           std::to_string(diagonal.front()) + ") outside [" + std::to_string(lo) + ", " +
           std::to_string(mat.size) + "]";
  }
  return {};
}

inline SelfInvertingPermutation twodm_to_sip(const MarkedMatrix2D& mat) {
  if (mat.size == 0) throw Error(ErrorCode::invalid_permutation, "empty matrix");
  if (auto problem = check_matrix_structure(mat); !problem.empty()) {
    throw Error(ErrorCode::invalid_permutation, problem);
  }
  std::vector<std::uint32_t> elements(mat.size, 0);
  for (const auto& [r, c] : mat.marked_cells) elements[r - 1] = static_cast<std::uint32_t>(c);
  return SelfInvertingPermutation(std::move(elements));
}

}  // namespace sipmark
