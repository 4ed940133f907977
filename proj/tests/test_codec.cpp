#include <gtest/gtest.h>

#include "sipmark/sip.hpp"
#include "test_support.hpp"

namespace sipmark {
namespace {

using Sip = SelfInvertingPermutation;

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::config_error;
}

TEST(Validate, AcceptsInvolutions) {
  EXPECT_TRUE(validate_sip({1}));
  EXPECT_TRUE(validate_sip({2, 1, 3}));
  EXPECT_TRUE(validate_sip({4, 7, 6, 1, 5, 3, 2}));
}

TEST(Validate, RejectsWithDiagnostic) {
  auto v = validate_sip({2, 3, 1});
  EXPECT_FALSE(v);
  EXPECT_NE(v.diagnostic.find("involution"), std::string::npos);
  EXPECT_FALSE(validate_sip({1, 1}));
  EXPECT_FALSE(validate_sip({0, 1}));
  EXPECT_FALSE(validate_sip({1, 3}));
  EXPECT_FALSE(validate_sip(std::span<const std::int64_t>{}));
}

TEST(Validate, ConstructorThrows) {
  EXPECT_EQ(code_of([] { Sip({3, 1, 2}); }), ErrorCode::invalid_permutation);
}

TEST(Encode, W4) {
  const auto b = make_bitonic(4);
  EXPECT_EQ(b.half, 3u);
  EXPECT_EQ(b.bits, (std::vector<bool>{0, 0, 0, 1, 0, 0, 1}));
  EXPECT_EQ(b.bitonic, (std::vector<std::uint32_t>{4, 7, 6, 5, 3, 2, 1}));
  EXPECT_EQ(encode_w_to_sip(4), Sip({4, 7, 6, 1, 5, 3, 2}));
}

TEST(Encode, SmallValues) {
  EXPECT_EQ(encode_w_to_sip(1), Sip({2, 1, 3}));
  EXPECT_EQ(encode_w_to_sip(5), Sip({4, 6, 7, 1, 5, 2, 3}));
  EXPECT_EQ(encode_w_to_sip(7), Sip({4, 5, 6, 1, 2, 3, 7}));
}

TEST(Encode, ZeroRejected) {
  EXPECT_EQ(code_of([] { encode_w_to_sip(0); }), ErrorCode::invalid_watermark);
}

TEST(Encode, Largest) {
  const auto pi = encode_w_to_sip(kMaxWatermark);
  EXPECT_EQ(pi.size(), 129u);
  EXPECT_EQ(decode_sip_to_w(pi), kMaxWatermark);
}

TEST(Decode, Examples) {
  EXPECT_EQ(decode_sip_to_w(Sip({4, 7, 6, 1, 5, 3, 2})), 4u);
  EXPECT_EQ(decode_sip_to_w(Sip({3, 5, 1, 4, 2})), 2u);
  EXPECT_EQ(decode_sip_to_w(Sip({2, 1, 3})), 1u);
}

TEST(Decode, RejectsOutsideImage) {
  EXPECT_EQ(code_of([] { decode_sip_to_w(Sip({1})); }), ErrorCode::not_a_watermark);
  EXPECT_EQ(code_of([] { decode_sip_to_w(Sip({2, 1})); }), ErrorCode::not_a_watermark);
  EXPECT_EQ(code_of([] { decode_sip_to_w(Sip({1, 2, 3})); }), ErrorCode::not_a_watermark);
  EXPECT_EQ(code_of([] { decode_sip_to_w(Sip({1, 2, 3, 4, 5})); }), ErrorCode::not_a_watermark);
  EXPECT_EQ(code_of([] { decode_sip_to_w(Sip({5, 2, 3, 4, 1})); }), ErrorCode::not_a_watermark);
}

TEST(OneDM, W4Positions) {
  const auto arr = sip_to_1dm(encode_w_to_sip(4));
  EXPECT_EQ(arr.length, 49u);
  EXPECT_EQ(arr.marked_positions, (std::vector<std::size_t>{4, 14, 20, 22, 33, 38, 44}));
}

TEST(OneDM, FiveElementPositions) {
  const auto arr = sip_to_1dm(Sip({3, 5, 1, 4, 2}));
  EXPECT_EQ(arr.marked_positions, (std::vector<std::size_t>{3, 10, 11, 19, 22}));
  EXPECT_EQ(onedm_to_sip(arr), Sip({3, 5, 1, 4, 2}));
}

TEST(OneDM, RejectsMalformed) {
  EXPECT_EQ(code_of([] { onedm_to_sip({48, {4, 14, 20, 22, 33, 38, 44}}); }),
            ErrorCode::invalid_permutation);
  EXPECT_EQ(code_of([] { onedm_to_sip({9, {1, 2, 9}}); }), ErrorCode::invalid_permutation);
  EXPECT_EQ(code_of([] { onedm_to_sip({9, {1, 5}}); }), ErrorCode::invalid_permutation);
}

TEST(TwoDM, W4Cells) {
  const auto mat = sip_to_2dm(encode_w_to_sip(4));
  EXPECT_EQ(mat.size, 7u);
  EXPECT_TRUE(mat.is_marked(1, 4));
  EXPECT_TRUE(mat.is_marked(4, 1));
  EXPECT_TRUE(mat.is_marked(5, 5));
  EXPECT_EQ(check_matrix_structure(mat), "");
  EXPECT_EQ(check_watermark_diagonal(mat), "");
  EXPECT_EQ(twodm_to_sip(mat), encode_w_to_sip(4));
}

TEST(TwoDM, StructureViolations) {
  MarkedMatrix2D asym{3, {{1, 2}, {2, 3}, {3, 1}}};
  EXPECT_NE(check_matrix_structure(asym), "");
  EXPECT_EQ(code_of([&] { twodm_to_sip(asym); }), ErrorCode::invalid_permutation);
  MarkedMatrix2D two_diag{3, {{1, 1}, {2, 2}, {3, 3}}};
  EXPECT_EQ(check_matrix_structure(two_diag), "");
  EXPECT_NE(check_watermark_diagonal(two_diag), "");
  MarkedMatrix2D low_diag{3, {{1, 1}, {2, 3}, {3, 2}}};
  EXPECT_NE(check_watermark_diagonal(low_diag), "");
}

TEST(Rpg, W4Edges) {
  const auto g = encode_sip_to_rpg(encode_w_to_sip(4));
  EXPECT_EQ(g.order, 7u);
  using E = ReduciblePermutationGraph::Edge;
  EXPECT_EQ(g.back_edges, (std::set<E>{{1, 4}, {2, 7}, {3, 6}, {4, 8}, {5, 8}, {6, 8}, {7, 8}}));
  EXPECT_EQ(decode_rpg_to_sip(g), encode_w_to_sip(4));
}

TEST(Rpg, RejectsMalformed) {
  ReduciblePermutationGraph g{3, {{1, 2}, {2, 4}}, false};
  EXPECT_NE(check_rpg(g), "");
  EXPECT_EQ(code_of([&] { decode_rpg_to_sip(g); }), ErrorCode::malformed_graph);
  ReduciblePermutationGraph backwards{3, {{1, 2}, {2, 1}, {3, 4}}, false};
  EXPECT_NE(check_rpg(backwards), "");
  // Well formed, but pi(1)=2 and pi(2)=3 cannot both hold.
  ReduciblePermutationGraph inconsistent{3, {{1, 2}, {2, 3}, {3, 4}}, false};
  EXPECT_EQ(code_of([&] { decode_rpg_to_sip(inconsistent); }), ErrorCode::malformed_graph);
}

TEST(Golden, W4Dumps) {
  const auto pi = encode_w_to_sip(4);
  EXPECT_EQ(dump(pi), test::golden("sip_w4.txt"));
  EXPECT_EQ(dump(sip_to_1dm(pi)), test::golden("onedm_w4.txt"));
  EXPECT_EQ(dump(sip_to_2dm(pi)), test::golden("twodm_w4.txt"));
  EXPECT_EQ(dump(encode_sip_to_rpg(pi)), test::golden("rpg_w4.txt"));
}

TEST(Golden, FiveElementGraph) {
  EXPECT_EQ(dump(encode_sip_to_rpg(Sip({4, 5, 3, 1, 2}))), test::golden("rpg_45312.txt"));
}

TEST(ToString, Format) { EXPECT_EQ(to_string(Sip({2, 1, 3})), "(2,1,3)"); }

}  // namespace
}  // namespace sipmark
