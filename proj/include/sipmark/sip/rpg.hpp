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

/// Reducible permutation graph over nodes u_{n+1}, u_n, ..., u_0.
///
/// The forward path u_{n+1} -> u_n -> ... -> u_0 is implicit in `order`;
/// only back-edges (u_i, u_j), j > i, are stored. Each interior node u_1..u_n
/// owns exactly one back-edge. The optional closing edge (u_0, u_{n+1}) is
/// tracked separately because it is an embedding aid, not part of F[pi].
struct ReduciblePermutationGraph {
  using Edge = std::pair<std::size_t, std::size_t>;  // (source index, target index)

  std::size_t order = 0;  // n, the SiP length
  std::set<Edge> back_edges;
  bool has_closing_edge = false;

  std::size_t node_count() const noexcept { return order + 2; }

  std::vector<Edge> path_edges() const {
    std::vector<Edge> out;
    for (std::size_t i = order + 1; i >= 1; --i) out.emplace_back(i, i - 1);
    return out;
  }

  friend bool operator==(const ReduciblePermutationGraph&,
                         const ReduciblePermutationGraph&) = default;
};

/// Returns an empty string when the graph satisfies its structural
/// invariants, otherwise a description of the first violation.
inline std::string check_rpg(const ReduciblePermutationGraph& g) {
  const std::size_t n = g.order;
  std::vector<std::size_t> out_degree(n + 2, 0);
  for (const auto& [src, dst] : g.back_edges) {
    if (src < 1 || src > n) {
      return "back-edge source u" + std::to_string(src) + " is not an interior node";
    }
    if (dst <= src || dst > n + 1) {
      return "back-edge (u" + std::to_string(src) + ",u" + std::to_string(dst) +
             ") does not point up the path";
    }
    ++out_degree[src];
  }
  for (std::size_t i = 1; i <= n; ++i) {
    if (out_degree[i] != 1) {
      return "u" + std::to_string(i) + " has " + std::to_string(out_degree[i]) +
             " back-edges, expected one";
    }
  }
  return {};
}

/// Back-edge target of u_i: pi(i) when pi(i) > i, otherwise the header u_{n+1}.
inline ReduciblePermutationGraph encode_sip_to_rpg(const SelfInvertingPermutation& pi) {
  ReduciblePermutationGraph g;
  g.order = pi.size();
  for (std::size_t i = 1; i <= g.order; ++i) {
    const std::size_t image = pi(i);
    g.back_edges.insert({i, image > i ? image : g.order + 1});
  }
  return g;
}

inline SelfInvertingPermutation decode_rpg_to_sip(const ReduciblePermutationGraph& g) {
  if (g.order == 0) throw Error(ErrorCode::malformed_graph, "graph has no interior nodes");
  if (auto problem = check_rpg(g); !problem.empty()) {
    throw Error(ErrorCode::malformed_graph, problem);
  }
  const std::size_t n = g.order;
  std::vector<std::uint32_t> partner(n + 1, 0);
  for (const auto& [i, j] : g.back_edges) {
    if (j > n) continue;
    if ((partner[i] != 0 && partner[i] != j) || (partner[j] != 0 && partner[j] != i)) {
      throw Error(ErrorCode::malformed_graph,
                  "conflicting partners for u" + std::to_string(i) + " and u" +
                      std::to_string(j));
    }
    partner[i] = static_cast<std::uint32_t>(j);
    partner[j] = static_cast<std::uint32_t>(i);
  }
  std::vector<std::uint32_t> elements(n, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    elements[i - 1] = partner[i] != 0 ? partner[i] : static_cast<std::uint32_t>(i);
  }
  SelfInvertingPermutation pi(std::move(elements));
  // u_j partnered from below must itself point at the header.
  auto expected = encode_sip_to_rpg(pi);
  if (expected.back_edges != g.back_edges) {
    throw Error(ErrorCode::malformed_graph,
                "back-edge set is not the encoding of " + to_string(pi));
  }
  return pi;
}

}  // namespace sipmark
