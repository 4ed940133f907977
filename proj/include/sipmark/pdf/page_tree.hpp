#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sipmark/error.hpp"
#include "sipmark/pdf/document.hpp"
#include "sipmark/pdf/object.hpp"

namespace sipmark::pdf {

enum class NodeKind { pages, page, resource };

struct PageTreeNode {
  Ref ref;
  NodeKind kind = NodeKind::page;
  std::string type;  // /Type of Pages/Page nodes, resource category otherwise
  std::optional<std::size_t> parent;
  std::size_t depth = 0;
  std::vector<std::size_t> children;
};

/// A /Kids entry that is not a structural child: a repeated reference, a
/// target that is not a Page/Pages node, or one whose /Parent points
/// elsewhere. Watermarking may add such entries.
struct ExtraKid {
  Ref owner;
  Ref target;
  std::size_t position = 0;  // index within the owner's /Kids array
};

struct PageTree {
  Ref root_ref;
  std::vector<PageTreeNode> nodes;  // nodes[0] is the root
  std::vector<Ref> pages;           // leaves in document order
  std::vector<ExtraKid> extra_kids;
  std::int64_t declared_count = 0;

  bool count_consistent() const {
    return declared_count == static_cast<std::int64_t>(pages.size());
  }

  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& n : nodes) {
      if (n.kind != NodeKind::resource) d = std::max(d, n.depth);
    }
    return d;
  }
};

inline constexpr std::array<std::string_view, 8> kResourceCategories = {
    "Font", "XObject", "ColorSpace", "ExtGState", "Pattern", "Shading", "ProcSet", "Properties"};

inline std::string_view dict_type(const PdfDocument& doc, Ref r) {
  auto* d = doc.get(r).dict();
  if (!d) return {};
  auto* t = d->find("Type");
  return t ? resolve(doc, *t).name() : std::string_view{};
}

inline Ref page_tree_root(const PdfDocument& doc) {
  const auto& cat = catalog(doc);
  auto* pages = cat.find("Pages");
  if (!pages || pages->is<Null>()) {
    throw Error(ErrorCode::malformed_document, "catalog has no /Pages");
  }
  auto* r = pages->get_if<Ref>();
  if (!r || !doc.contains(*r) || !doc.get(*r).dict()) {
    throw Error(ErrorCode::malformed_document, "/Pages does not resolve to a dictionary");
  }
  return *r;
}

/// Whether /Kids entry `kid` of `owner` is a structural child.
inline bool is_structural_kid(const PdfDocument& doc, Ref owner, Ref kid) {
  if (!doc.contains(kid)) return false;
  auto* d = doc.get(kid).get_if<Dictionary>();
  if (!d) return false;
  const auto type = dict_type(doc, kid);
  if (type != "Page" && type != "Pages") return false;
  auto* parent = d->find("Parent");
  return parent && parent->is<Ref>() && *parent->get_if<Ref>() == owner;
}

inline PageTree get_page_tree(const PdfDocument& doc) {
  PageTree tree;
  tree.root_ref = page_tree_root(doc);
  if (auto* count = doc.get(tree.root_ref).dict()->find("Count")) {
    tree.declared_count = resolve(doc, *count).integer().value_or(0);
  }

  std::set<Ref> seen;
  auto add_node = [&](Ref r, NodeKind kind, std::string type,
                      std::optional<std::size_t> parent) -> std::size_t {
    PageTreeNode node{r, kind, std::move(type), parent,
                      parent ? tree.nodes[*parent].depth + 1 : 0, {}};
    tree.nodes.push_back(std::move(node));
    const auto idx = tree.nodes.size() - 1;
    if (parent) tree.nodes[*parent].children.push_back(idx);
    return idx;
  };

  auto add_resources = [&](std::size_t owner_idx) {
    const auto& owner = *doc.get(tree.nodes[owner_idx].ref).dict();
    auto* res = lookup(doc, owner, "Resources");
    if (!res || !res->dict()) return;
    for (auto category : kResourceCategories) {
      auto* sub = lookup(doc, *res->dict(), category);
      if (!sub) continue;
      auto visit = [&](const Object& v) {
        if (auto* r = v.get_if<Ref>(); r && doc.contains(*r) && seen.insert(*r).second) {
          add_node(*r, NodeKind::resource, std::string(category), owner_idx);
        }
      };
      if (auto* d = sub->dict()) {
        for (const auto& e : *d) visit(e.value);
      } else if (auto* a = sub->get_if<Array>()) {
        for (const auto& item : a->items) visit(item);
      }
    }
  };

  seen.insert(tree.root_ref);
  std::vector<std::size_t> stack{add_node(tree.root_ref, NodeKind::pages, "Pages", std::nullopt)};
  // Pre-order with children pushed in reverse so leaves come out in order.
  std::vector<std::size_t> order;
  while (!stack.empty()) {
    const auto idx = stack.back();
    stack.pop_back();
    order.push_back(idx);
    const Ref ref = tree.nodes[idx].ref;
    if (tree.nodes[idx].kind == NodeKind::page) {
      tree.pages.push_back(ref);
      add_resources(idx);
      continue;
    }
    add_resources(idx);
    auto* kids = lookup(doc, *doc.get(ref).dict(), "Kids");
    if (!kids || !kids->get_if<Array>()) continue;
    std::vector<std::size_t> fresh;
    const auto& items = kids->get_if<Array>()->items;
    for (std::size_t pos = 0; pos < items.size(); ++pos) {
      auto* kid = items[pos].get_if<Ref>();
      if (!kid) continue;
      if (!is_structural_kid(doc, ref, *kid) || seen.contains(*kid)) {
        tree.extra_kids.push_back({ref, *kid, pos});
        continue;
      }
      seen.insert(*kid);
      const bool is_page = dict_type(doc, *kid) == "Page";
      fresh.push_back(add_node(*kid, is_page ? NodeKind::page : NodeKind::pages,
                               is_page ? "Page" : "Pages", idx));
    }
    for (auto it = fresh.rbegin(); it != fresh.rend(); ++it) stack.push_back(*it);
  }
  return tree;
}

/// Page attribute lookup through the /Parent chain (MediaBox, Resources...).
inline const Object* inherited_attribute(const PdfDocument& doc, Ref page, std::string_view key) {
  std::optional<Ref> cur = page;
  for (int hops = 0; cur && hops < 64; ++hops) {
    auto* d = doc.get(*cur).dict();
    if (!d) return nullptr;
    if (auto* v = lookup(doc, *d, key)) return v;
    auto* parent = d->find("Parent");
    cur = parent && parent->is<Ref>() && doc.contains(*parent->get_if<Ref>())
              ? std::optional<Ref>(*parent->get_if<Ref>())
              : std::nullopt;
  }
  return nullptr;
}

/// References of the page's content streams, in drawing order.
inline std::vector<Ref> page_content_refs(const PdfDocument& doc, Ref page) {
  std::vector<Ref> out;
  auto* contents = doc.get(page).dict()->find("Contents");
  if (!contents) return out;
  if (auto* r = contents->get_if<Ref>()) {
    const auto& target = doc.get(*r);
    if (target.is<Stream>()) {
      out.push_back(*r);
      return out;
    }
    contents = &target;
  }
  if (auto* a = contents->get_if<Array>()) {
    for (const auto& item : a->items) {
      if (auto* r = item.get_if<Ref>(); r && doc.contains(*r) && doc.get(*r).is<Stream>()) {
        out.push_back(*r);
      }
    }
  }
  return out;
}

}  // namespace sipmark::pdf
