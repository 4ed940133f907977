#include <gtest/gtest.h>

#include <regex>

#include "sipmark/watermark.hpp"
#include "sipmark/watermark/selftest.hpp"
#include "test_support.hpp"

namespace sipmark::watermark {
namespace {

using Sip = SelfInvertingPermutation;
using Edge = ReduciblePermutationGraph::Edge;

// References "T 0 R" written in the dictionary of object `num`, counted
// straight from serialized bytes. /Parent values are not counted.
std::map<std::uint32_t, std::size_t> raw_refs(const std::string& bytes, std::uint32_t num) {
  const std::string head = "\n" + std::to_string(num) + " 0 obj\n";
  const auto start = bytes.find(head);
  if (start == std::string::npos) throw std::runtime_error("object not found");
  auto end = bytes.find("endobj", start);
  end = std::min(end, bytes.find("\nstream\n", start));
  const std::string body = bytes.substr(start + head.size(), end - start - head.size());
  std::map<std::uint32_t, std::size_t> out;
  static const std::regex ref(R"((/Parent\s+)?(\d+) 0 R)");
  for (auto it = std::sregex_iterator(body.begin(), body.end(), ref); it != std::sregex_iterator();
       ++it) {
    if ((*it)[1].matched) continue;
    ++out[static_cast<std::uint32_t>(std::stoul((*it)[2]))];
  }
  return out;
}

// Back-edges read from the bytes along a known path, closing entry excluded.
std::set<Edge> raw_back_edges(const std::string& bytes, const std::vector<std::uint32_t>& path) {
  const std::size_t n = path.size() - 2;
  std::set<Edge> out;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    auto refs = raw_refs(bytes, path[k]);
    for (std::size_t l = k + 1; l < path.size(); ++l) {
      std::size_t c = refs[path[l]];
      if (k == 0 && l + 1 == path.size()) --c;
      if (l == k + 1) --c;
      if (c > 0) out.insert({n + 1 - l, n + 1 - k});
    }
  }
  return out;
}

std::vector<std::uint32_t> numbers(const std::vector<pdf::Ref>& refs) {
  std::vector<std::uint32_t> out;
  for (auto r : refs) out.push_back(r.number);
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::config_error;
}

TEST(Structure, PlanPath) {
  EXPECT_EQ(numbers(plan_path(test::fixture("shading_chain"), 5).nodes),
            (std::vector<std::uint32_t>{29, 3, 13, 6, 5, 24, 25}));
  EXPECT_EQ(numbers(plan_path(test::fixture("hello_world"), 1).nodes),
            (std::vector<std::uint32_t>{3, 4, 5}));
  EXPECT_EQ(code_of([] { plan_path(test::fixture("hello_world"), 20); }),
            ErrorCode::capacity_error);
  EXPECT_EQ(code_of([] { plan_path(test::fixture("deep_xobjects"), 30, {10, 64}); }),
            ErrorCode::capacity_error);
}

TEST(Structure, Capacity) {
  EXPECT_EQ(structure_capacity(test::fixture("hello_world")), 1u);
  EXPECT_EQ(structure_capacity(test::fixture("shading_chain")), 5u);
  EXPECT_EQ(structure_capacity(test::fixture("deep_xobjects")), 40u);
}

TEST(Structure, FiveNodeExample) {
  const Sip pi{4, 5, 3, 1, 2};
  const auto e = embed_structure(test::fixture("shading_chain"), pi);
  const std::vector<std::uint32_t> path{29, 3, 13, 6, 5, 24, 25};
  EXPECT_EQ(e.report.locations["path"], json(path));

  const auto bytes = pdf::serialize_pdf(e.doc);
  const std::set<Edge> expected{{1, 4}, {2, 5}, {3, 6}, {4, 6}, {5, 6}};
  EXPECT_EQ(raw_back_edges(bytes, path), expected);
  EXPECT_EQ(raw_refs(bytes, 13)[24], 1u);
  EXPECT_EQ(raw_refs(bytes, 3)[5], 1u);

  const auto& added = e.report.locations["added"];
  ASSERT_EQ(added.size(), 6u);
  EXPECT_EQ(added[0], json({{"source", 13}, {"key", "R1"}, {"target", 24}, {"edge", {1, 4}}}));
  EXPECT_EQ(added[1], json({{"source", 3}, {"key", "R1"}, {"target", 5}, {"edge", {2, 5}}}));
  EXPECT_EQ(added[5], json({{"source", 29}, {"key", "Kids"}, {"target", 25}, {"edge", {0, 6}}}));

  const auto& kids = *e.doc.get({29, 0}).dict()->find("Kids")->get_if<pdf::Array>();
  std::vector<std::uint32_t> kid_numbers;
  for (const auto& k : kids.items) kid_numbers.push_back(k.get_if<pdf::Ref>()->number);
  EXPECT_EQ(kid_numbers, (std::vector<std::uint32_t>{3, 6, 13, 3, 25}));

  const auto back = test::reparse(e.doc);
  const auto ge = extract_structure(back);
  ASSERT_TRUE(ge.graph.has_value());
  EXPECT_EQ(ge.graph->back_edges, expected);
  const auto ex = extract_structure_sip(back);
  ASSERT_TRUE(ex.ok());
  EXPECT_EQ(*ex.sip, pi);
}

TEST(Structure, PageTreeUnchanged) {
  for (const auto& name : {"shading_chain", "deep_xobjects", "nested_pages", "hello_world"}) {
    const auto doc = test::fixture(name);
    const auto n = std::min<std::size_t>(structure_capacity(doc), 3);
    Sip pi = n == 3 ? Sip{2, 1, 3} : Sip{1};
    const auto e = embed_structure(doc, pi);
    const auto before = pdf::get_page_tree(doc);
    const auto after = pdf::get_page_tree(test::reparse(e.doc));
    EXPECT_EQ(after.pages, before.pages) << name;
    EXPECT_EQ(after.declared_count, before.declared_count) << name;
    EXPECT_TRUE(after.count_consistent()) << name;
    const auto& root_before = *doc.get(before.root_ref).dict();
    const auto& root_after = *e.doc.get(before.root_ref).dict();
    for (const auto& entry : root_before) EXPECT_TRUE(root_after.contains(entry.key)) << name;
  }
}

TEST(Structure, SingletonPermutation) {
  const auto e = embed_structure(test::fixture("hello_world"), Sip{1});
  const auto back = test::reparse(e.doc);
  const auto ge = extract_structure(back);
  ASSERT_TRUE(ge.graph.has_value());
  EXPECT_EQ(ge.graph->back_edges, (std::set<Edge>{{1, 2}}));
  auto ex = extract_structure_sip(back);
  ASSERT_TRUE(ex.ok());
  attach_watermark(ex);
  EXPECT_FALSE(ex.ok());
  EXPECT_FALSE(ex.report.w.has_value());
}

TEST(Structure, BackEdgeOverPathEdgeDoublesReference) {
  const Sip pi{2, 1, 3};
  const auto e = embed_structure(test::fixture("deep_xobjects"), pi);
  std::vector<std::uint32_t> path;
  for (const auto& v : e.report.locations["path"]) path.push_back(v.get<std::uint32_t>());
  ASSERT_EQ(path.size(), 5u);
  const auto bytes = pdf::serialize_pdf(e.doc);
  // v_2 -> v_1 carries both the path edge and the back-edge (1,2).
  EXPECT_EQ(raw_refs(bytes, path[2])[path[3]], 2u);
  EXPECT_EQ(raw_back_edges(bytes, path), (std::set<Edge>{{1, 2}, {2, 4}, {3, 4}}));
  EXPECT_EQ(*extract_structure_sip(test::reparse(e.doc)).sip, pi);
}

TEST(Structure, EveryInvolutionUpToSeven) {
  const auto doc = test::fixture("deep_xobjects");
  for (std::size_t n = 1; n <= 7; ++n) {
    for (const auto& pi : enumerate_involutions(n)) {
      const auto e = embed_structure(doc, pi);
      std::vector<std::uint32_t> path;
      for (const auto& v : e.report.locations["path"]) path.push_back(v.get<std::uint32_t>());
      const auto bytes = pdf::serialize_pdf(e.doc);
      ASSERT_EQ(raw_back_edges(bytes, path), encode_sip_to_rpg(pi).back_edges) << to_string(pi);
      const auto ex = extract_structure_sip(pdf::parse_pdf(bytes));
      ASSERT_TRUE(ex.ok()) << to_string(pi);
      ASSERT_EQ(*ex.sip, pi);
    }
  }
}

TEST(Structure, WatermarkRoundTrip) {
  const auto doc = test::fixture("deep_xobjects");
  for (std::uint64_t w : {1ull, 4ull, 5ull, 7ull, 255ull, 65537ull}) {
    auto ex = extract_structure_sip(test::reparse(embed_structure(doc, encode_w_to_sip(w)).doc));
    attach_watermark(ex);
    EXPECT_EQ(ex.report.w, w);
  }
}

TEST(Structure, InsufficientDepth) {
  EXPECT_EQ(code_of([] { embed_structure(test::fixture("shading_chain"), encode_w_to_sip(5)); }),
            ErrorCode::capacity_error);
}

TEST(Structure, MalformedGraphRejected) {
  ReduciblePermutationGraph g{2, {{1, 2}}, false};
  EXPECT_EQ(code_of([&] { embed_structure(test::fixture("deep_xobjects"), g); }),
            ErrorCode::malformed_graph);
}

TEST(Structure, CleanFilesAreNotWatermarked) {
  for (const auto& name : test::clean_fixtures()) {
    auto ex = extract_structure_sip(test::fixture(name));
    attach_watermark(ex);
    EXPECT_EQ(ex.report.status, Status::not_watermarked) << name;
    EXPECT_FALSE(ex.report.w.has_value()) << name;
  }
}

TEST(Structure, RemovedKeyIsDetected) {
  auto e = embed_structure(test::fixture("shading_chain"), Sip{4, 5, 3, 1, 2});
  e.doc.get({13, 0}).dict()->erase("R1");
  auto ex = extract_structure_sip(test::reparse(e.doc));
  EXPECT_FALSE(ex.ok());
  EXPECT_EQ(ex.report.status, Status::extraction_failed);
}

TEST(Structure, ReservedKeys) {
  EXPECT_TRUE(structure_detail::reserved_key("Kids"));
  EXPECT_TRUE(structure_detail::reserved_key("Resources"));
  EXPECT_FALSE(structure_detail::reserved_key("Pattern"));
}

}  // namespace
}  // namespace sipmark::watermark
