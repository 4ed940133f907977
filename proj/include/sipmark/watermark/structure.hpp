#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sipmark/error.hpp"
#include "sipmark/pdf.hpp"
#include "sipmark/sip.hpp"
#include "sipmark/watermark/report.hpp"

namespace sipmark::watermark {

struct StructureConfig {
  std::size_t max_depth = 4096;  // bound on the traversal depth
  std::size_t max_attempts = 64;  // candidate chains tried before giving up
};

/// Nodes v_{n+1}, v_n, ..., v_0: nodes.front() is the page-tree root,
/// nodes.back() is v_0.
struct EmbeddingPath {
  std::vector<pdf::Ref> nodes;

  std::size_t order() const { return nodes.size() - 2; }
  pdf::Ref v(std::size_t i) const { return nodes[nodes.size() - 1 - i]; }
};

struct KeyEntry {
  pdf::Ref source;
  std::string key;
  pdf::Ref target;
  std::size_t from = 0;  // j of v_j
  std::size_t to = 0;    // i of v_i
};

struct KeyEntryPlan {
  EmbeddingPath path;
  std::vector<KeyEntry> entries;
};

namespace structure_detail {

/// Outgoing references of an object in traversal order: /Kids entries first,
/// then every other reference in the order it appears. /Parent is ignored
/// throughout.
inline std::vector<pdf::Ref> children(const pdf::PdfDocument& doc, pdf::Ref ref) {
  std::vector<pdf::Ref> out;
  const auto& body = doc.get(ref);
  auto keep = [&](pdf::Ref r) {
    if (doc.contains(r)) out.push_back(r);
  };
  auto* d = body.dict();
  if (!d) {
    pdf::for_each_ref(body, keep, "Parent");
    return out;
  }
  if (auto* kids = d->find("Kids")) pdf::for_each_ref(*kids, keep, "Parent");
  for (const auto& e : *d) {
    if (e.key == "Kids" || e.key == "Parent") continue;
    pdf::for_each_ref(e.value, keep, "Parent");
  }
  return out;
}

struct DfsTree {
  std::map<pdf::Ref, pdf::Ref> parent;
  std::map<pdf::Ref, std::size_t> depth;
  std::vector<pdf::Ref> preorder;

  std::vector<pdf::Ref> path_to(pdf::Ref node) const {
    std::vector<pdf::Ref> out{node};
    for (auto it = parent.find(node); it != parent.end(); it = parent.find(it->second)) {
      out.push_back(it->second);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }
};

inline DfsTree dfs_tree(const pdf::PdfDocument& doc, pdf::Ref root, std::size_t max_depth) {
  DfsTree tree;
  struct Frame {
    pdf::Ref ref;
    std::vector<pdf::Ref> next;
    std::size_t pos = 0;
  };
  tree.depth[root] = 0;
  tree.preorder.push_back(root);
  std::vector<Frame> stack;
  stack.push_back({root, children(doc, root), 0});
  while (!stack.empty()) {
    auto& top = stack.back();
    if (top.pos == top.next.size()) {
      stack.pop_back();
      continue;
    }
    const pdf::Ref child = top.next[top.pos++];
    if (tree.depth.contains(child)) continue;
    const std::size_t d = tree.depth[top.ref] + 1;
    tree.parent[child] = top.ref;
    tree.depth[child] = d;
    tree.preorder.push_back(child);
    if (d < max_depth) stack.push_back({child, children(doc, child), 0});
  }
  return tree;
}

/// Number of references from `from` to each object, /Parent excluded.
inline std::map<pdf::Ref, std::size_t> reference_counts(const pdf::PdfDocument& doc,
                                                        pdf::Ref from) {
  std::map<pdf::Ref, std::size_t> out;
  pdf::for_each_ref(doc.get(from), [&](pdf::Ref r) { ++out[r]; }, "Parent");
  return out;
}

/// First-occurrence structural /Kids entries of the root.
inline std::set<pdf::Ref> structural_kids(const pdf::PdfDocument& doc, pdf::Ref root) {
  std::set<pdf::Ref> out;
  auto* kids = doc.get(root).dict()->find("Kids");
  if (!kids) return out;
  const auto& arr = pdf::resolve(doc, *kids);
  if (auto* a = arr.get_if<pdf::Array>()) {
    for (const auto& item : a->items) {
      auto* r = item.get_if<pdf::Ref>();
      if (r && pdf::is_structural_kid(doc, root, *r)) out.insert(*r);
    }
  }
  return out;
}

/// Whether a tree path can carry the watermark: it starts with a real page
/// tree child, every node that may receive a key is a dictionary, and no
/// reference along the path skips ahead or repeats.
inline bool usable_path(const pdf::PdfDocument& doc, const std::vector<pdf::Ref>& nodes,
                        const std::set<pdf::Ref>& kids) {
  if (nodes.size() < 3 || !kids.contains(nodes[1])) return false;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    if (!doc.get(nodes[k]).dict()) return false;
  }
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const auto counts = reference_counts(doc, nodes[k]);
    for (std::size_t l = k + 1; l < nodes.size(); ++l) {
      auto it = counts.find(nodes[l]);
      const std::size_t c = it == counts.end() ? 0 : it->second;
      if (c != (l == k + 1 ? 1u : 0u)) return false;
    }
  }
  return true;
}

inline std::vector<EmbeddingPath> candidates(const pdf::PdfDocument& doc, const DfsTree& tree,
                                             pdf::Ref root, std::size_t n, std::size_t limit) {
  std::vector<EmbeddingPath> out;
  const auto kids = structural_kids(doc, root);
  for (auto node : tree.preorder) {
    if (tree.depth.at(node) != n + 1) continue;
    auto nodes = tree.path_to(node);
    if (!usable_path(doc, nodes, kids)) continue;
    out.push_back({std::move(nodes)});
    if (out.size() >= limit) break;
  }
  return out;
}

inline bool reserved_key(std::string_view key) {
  static constexpr std::array<std::string_view, 26> kReserved = {
      "Type",     "Subtype", "Parent",   "Kids",      "Count",  "Length", "Filter",
      "DecodeParms", "F",    "FFilter",  "FDecodeParms", "DL", "Resources", "Contents",
      "Shading",  "Function", "Functions", "Annots",  "Metadata", "Group", "OC",
      "Next",     "Prev",    "First",    "Last",      "Dest"};
  return std::find(kReserved.begin(), kReserved.end(), key) != kReserved.end();
}

inline KeyEntryPlan make_plan(const pdf::PdfDocument& doc, const EmbeddingPath& path,
                              const ReduciblePermutationGraph& g) {
  KeyEntryPlan plan{path, {}};
  const std::size_t n = g.order;
  std::map<pdf::Ref, std::set<std::string>> planned;
  auto key_for = [&](pdf::Ref source, pdf::Ref target) -> std::string {
    const auto& dict = *doc.get(source).dict();
    auto& used = planned[source];
    auto free = [&](const std::string& k) {
      return !k.empty() && !reserved_key(k) && !dict.contains(k) && !used.contains(k);
    };
    std::string key(pdf::dict_type(doc, target));
    if (!free(key)) {
      for (std::size_t k = 1;; ++k) {
        key = "R" + std::to_string(k);
        if (free(key)) break;
      }
    }
    used.insert(key);
    return key;
  };
  for (const auto& [i, j] : g.back_edges) {
    const auto source = path.v(j);
    const auto target = path.v(i);
    plan.entries.push_back({source, j == n + 1 ? "Kids" : key_for(source, target), target, j, i});
  }
  plan.entries.push_back({path.v(n + 1), "Kids", path.v(0), n + 1, 0});
  return plan;
}

inline void apply_plan(pdf::PdfDocument& doc, const KeyEntryPlan& plan) {
  for (const auto& e : plan.entries) {
    auto& dict = *doc.get(e.source).dict();
    if (e.key == "Kids") {
      auto* kids = dict.find("Kids");
      auto* arr = kids ? kids->get_if<pdf::Array>() : nullptr;
      if (!arr) throw Error(ErrorCode::embedding_error, "root /Kids is not a direct array");
      arr->items.push_back(e.target);
    } else {
      dict.set(e.key, e.target);
    }
  }
}

inline json plan_json(const KeyEntryPlan& plan) {
  json path = json::array();
  for (auto r : plan.path.nodes) path.push_back(r.number);
  json entries = json::array();
  for (const auto& e : plan.entries) {
    entries.push_back({{"source", e.source.number},
                       {"key", e.key},
                       {"target", e.target.number},
                       {"edge", {e.to, e.from}}});
  }
  return {{"path", std::move(path)}, {"added", std::move(entries)}};
}

}  // namespace structure_detail

/// The first usable chain of n+2 nodes in traversal order.
inline EmbeddingPath plan_path(const pdf::PdfDocument& doc, std::size_t n,
                               const StructureConfig& cfg = {}) {
  using namespace structure_detail;
  if (n == 0) throw Error(ErrorCode::capacity_error, "path order must be positive");
  if (n + 1 > cfg.max_depth) {
    throw Error(ErrorCode::capacity_error, "path of " + std::to_string(n + 2) +
                                               " nodes exceeds the depth bound");
  }
  const auto root = pdf::page_tree_root(doc);
  const auto tree = dfs_tree(doc, root, cfg.max_depth);
  auto found = candidates(doc, tree, root, n, 1);
  if (found.empty()) {
    throw Error(ErrorCode::capacity_error,
                "no usable reference chain of " + std::to_string(n + 2) + " nodes");
  }
  return found.front();
}

/// Longest path order the document can carry.
inline std::size_t structure_capacity(const pdf::PdfDocument& doc,
                                      const StructureConfig& cfg = {}) {
  using namespace structure_detail;
  const auto root = pdf::page_tree_root(doc);
  const auto tree = dfs_tree(doc, root, cfg.max_depth);
  std::size_t deepest = 0;
  for (const auto& [ref, d] : tree.depth) deepest = std::max(deepest, d);
  for (std::size_t n = deepest; n >= 2; --n) {
    if (!candidates(doc, tree, root, n - 1, 1).empty()) return n - 1;
  }
  return 0;
}

struct GraphExtraction {
  std::optional<ReduciblePermutationGraph> graph;
  WatermarkReport report;
};

inline GraphExtraction extract_structure(const pdf::PdfDocument& doc,
                                         const StructureConfig& cfg = {}) {
  using namespace structure_detail;
  GraphExtraction out;
  out.report.scheme = Scheme::structure;
  const auto tree = pdf::get_page_tree(doc);
  const auto root = tree.root_ref;
  std::optional<pdf::Ref> v0;
  for (const auto& extra : tree.extra_kids) {
    if (extra.owner == root) v0 = extra.target;
  }
  if (!v0) {
    out.report.fail(Status::not_watermarked, "page-tree root has no extra /Kids entry");
    return out;
  }
  if (!doc.contains(*v0)) {
    out.report.fail(Status::extraction_failed,
                    "closing /Kids entry " + pdf::to_string(*v0) + " does not resolve");
    return out;
  }
  const auto dfs = dfs_tree(doc, root, cfg.max_depth);
  auto depth = dfs.depth.find(*v0);
  if (depth == dfs.depth.end() || depth->second < 2) {
    out.report.fail(Status::extraction_failed,
                    "closing target " + pdf::to_string(*v0) + " does not end a usable path");
    return out;
  }
  const auto nodes = dfs.path_to(*v0);
  const std::size_t n = nodes.size() - 2;
  ReduciblePermutationGraph g;
  g.order = n;
  json path = json::array();
  for (auto r : nodes) path.push_back(r.number);
  json edges = json::array();
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const auto counts = reference_counts(doc, nodes[k]);
    const std::size_t j = n + 1 - k;
    for (std::size_t l = k + 1; l < nodes.size(); ++l) {
      const std::size_t i = n + 1 - l;
      auto it = counts.find(nodes[l]);
      std::size_t c = it == counts.end() ? 0 : it->second;
      if (k == 0 && l + 1 == nodes.size() && c > 0) --c;  // closing entry
      if (l == k + 1) c = c > 0 ? c - 1 : 0;      // the path edge itself
      if (c == 0) continue;
      g.back_edges.insert({i, j});
      edges.push_back({{"edge", {i, j}},
                       {"source", nodes[k].number},
                       {"target", nodes[l].number},
                       {"references", c}});
    }
  }
  out.report.locations = {{"path", std::move(path)}, {"edges", std::move(edges)}};
  if (auto problem = check_rpg(g); !problem.empty()) {
    out.report.fail(Status::extraction_failed, "recovered graph is malformed: " + problem);
    out.report.diagnostics.push_back(dump(g));
    return out;
  }
  out.report.n_star = n;
  out.graph = std::move(g);
  return out;
}

/// Graph extraction followed by decoding into a permutation.
inline Extraction extract_structure_sip(const pdf::PdfDocument& doc,
                                        const StructureConfig& cfg = {}) {
  auto ge = extract_structure(doc, cfg);
  Extraction ex{std::nullopt, std::move(ge.report)};
  if (!ge.graph) return ex;
  try {
    ex.sip = decode_rpg_to_sip(*ge.graph);
    ex.report.sip = ex.sip;
  } catch (const Error& e) {
    ex.report.fail(Status::extraction_failed, e.what());
    ex.report.diagnostics.push_back(dump(*ge.graph));
  }
  return ex;
}

inline Embedding embed_structure(pdf::PdfDocument doc, const ReduciblePermutationGraph& g,
                                 const StructureConfig& cfg = {}) {
  using namespace structure_detail;
  if (auto problem = check_rpg(g); !problem.empty()) {
    throw Error(ErrorCode::malformed_graph, problem);
  }
  const std::size_t n = g.order;
  if (n + 1 > cfg.max_depth) {
    throw Error(ErrorCode::capacity_error, "path of " + std::to_string(n + 2) +
                                               " nodes exceeds the depth bound");
  }
  const auto root = pdf::page_tree_root(doc);
  const auto leaves = pdf::get_page_tree(doc).pages;
  const auto tree = dfs_tree(doc, root, cfg.max_depth);
  const auto paths = candidates(doc, tree, root, n, cfg.max_attempts);
  if (paths.empty()) {
    throw Error(ErrorCode::capacity_error,
                "no usable reference chain of " + std::to_string(n + 2) + " nodes");
  }

  WatermarkReport report;
  report.scheme = Scheme::structure;
  report.n_star = n;
  for (const auto& path : paths) {
    const auto plan = make_plan(doc, path, g);
    pdf::PdfDocument out = doc;
    apply_plan(out, plan);
    const auto check = extract_structure(out, cfg);
    std::string problem;
    if (!check.graph || check.graph->back_edges != g.back_edges) {
      problem = "re-extraction disagrees";
    } else if (pdf::get_page_tree(out).pages != leaves) {
      problem = "page leaf set changed";
    }
    if (!problem.empty()) {
      report.diagnostics.push_back("path from " + pdf::to_string(path.nodes.back()) + ": " +
                                   problem);
      continue;
    }
    report.locations = plan_json(plan);
    return {std::move(out), std::move(report)};
  }
  throw Error(ErrorCode::embedding_error, "no candidate path survived verification");
}

inline Embedding embed_structure(pdf::PdfDocument doc, const SelfInvertingPermutation& pi,
                                 const StructureConfig& cfg = {}) {
  auto result = embed_structure(std::move(doc), encode_sip_to_rpg(pi), cfg);
  result.report.sip = pi;
  return result;
}

}  // namespace sipmark::watermark
