// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "sipmark/pdf.hpp"
#include "sipmark/sip.hpp"
#include "sipmark/watermark.hpp"
#include "sipmark/watermark/selftest.hpp"
#include "test_support.hpp"

namespace {

using namespace sipmark;
using namespace sipmark::watermark;
using Clock = std::chrono::steady_clock;

constexpr double kAc1LimitMs = 1.0;
constexpr double kAc2LimitMs = 5000.0;
constexpr double kAc3LimitMs = 30000.0;
constexpr double kAc4LimitMs = 2000.0;
constexpr double kAc5LimitMs = 10000.0;
constexpr std::uint64_t kAc3Exhaustive = 1u << 20;
constexpr int kAc3Random = 10000;
constexpr std::size_t kAc4MinFiles = 10;
constexpr std::size_t kAc6MinFiles = 10;
const std::uint64_t kAc5Values[] = {1, 4, 5, 7, 255, (1u << 16) + 1};

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (cond || !ok) {
      ok = ok && cond;
      return;
    }
    ok = false;
    detail = what;
  }
};

int failures = 0;

void criterion(const char* id, const char* title, double limit_ms,
               const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  if (limit_ms > 0 && ms > limit_ms) {
    o.require(false, "took " + std::to_string(ms) + " ms, limit " + std::to_string(limit_ms));
  }
  if (!o.ok) ++failures;
  std::printf("%s %s: %s (%.1f ms%s%s)%s%s\n", o.ok ? "PASS" : "FAIL", id, title, ms,
              limit_ms > 0 ? ", limit " : "",
              limit_ms > 0 ? (std::to_string(static_cast<long>(limit_ms)) + " ms").c_str() : "",
              o.detail.empty() ? "" : " - ", o.detail.c_str());
  std::fflush(stdout);
}

std::optional<std::uint64_t> recovered(Extraction ex) {
  attach_watermark(ex);
  return ex.report.w;
}

void ac1(Outcome& o) {
  const auto pi = encode_w_to_sip(4);
  o.require(pi == SelfInvertingPermutation{4, 7, 6, 1, 5, 3, 2}, "w=4 gives " + to_string(pi));
  const auto mat = sip_to_2dm(pi);
  for (const auto& [r, c] : mat.marked_cells) o.require(mat.is_marked(c, r), "2DM not symmetric");
  std::vector<std::size_t> diagonal;
  for (const auto& [r, c] : mat.marked_cells) {
    if (r == c) diagonal.push_back(r);
  }
  o.require(diagonal == std::vector<std::size_t>{5}, "diagonal mark is not (5,5)");
  o.require(diagonal.size() == 1 && diagonal[0] >= 5 && diagonal[0] <= 7,
            "diagonal mark outside 5..7");
}

void ac2(Outcome& o) {
  const std::uint64_t counts[] = {1, 2, 4, 10, 26, 76, 232, 764, 2620};
  for (std::size_t n = 1; n <= 9; ++n) {
    o.require(involution_count(n) == counts[n - 1], "recurrence disagrees at n=" + std::to_string(n));
    o.require(enumerate_involutions(n).size() == counts[n - 1],
              "enumeration disagrees at n=" + std::to_string(n));
  }
  const auto report = run_selftest({}, 9, 0);
  o.require(report.passed(), report.notes.empty() ? "selftest failed" : report.notes.front());
}

void ac3(Outcome& o) {
  for (std::uint64_t w = 1; w <= kAc3Exhaustive; ++w) {
    if (decode_sip_to_w(encode_w_to_sip(w)) != w) {
      o.require(false, "w=" + std::to_string(w));
      return;
    }
  }
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<std::uint64_t> dist(kAc3Exhaustive, ~std::uint64_t{0});
  for (int k = 0; k < kAc3Random; ++k) {
    const auto w = dist(rng);
    if (decode_sip_to_w(encode_w_to_sip(w)) != w) {
      o.require(false, "w=" + std::to_string(w));
      return;
    }
  }
}

void ac4(Outcome& o) {
  const auto& names = test::clean_fixtures();
  o.require(names.size() >= kAc4MinFiles, "corpus too small");
  bool hello = false;
  for (const auto& name : names) {
    hello = hello || name == "hello_world";
    const auto doc = test::fixture(name);
    const auto bytes = pdf::serialize_pdf(doc);
    o.require(same_object_model(doc, pdf::parse_pdf(bytes)), name + ": not a fixpoint");
    o.require(test::xref_problems(bytes).empty(), name + ": " + test::xref_problems(bytes));
  }
  o.require(hello, "hello_world missing from corpus");
}

void ac5(Outcome& o) {
  const auto long_text = test::fixture("long_paragraph");
  const auto letter = test::fixture("letter_blank");
  const auto deep = test::fixture("deep_xobjects");
  const auto text = visible_text(long_text);
  const auto leaves = pdf::get_page_tree(deep).pages;
  for (auto w : kAc5Values) {
    const auto pi = encode_w_to_sip(w);
    const auto tag = " w=" + std::to_string(w);

    const auto s = pdf::parse_pdf(pdf::serialize_pdf(embed_spacing(long_text, pi).doc));
    o.require(recovered(extract_spacing(s)) == w, "spacing" + tag);
    o.require(visible_text(s) == text, "spacing text changed" + tag);

    const auto g = pdf::parse_pdf(pdf::serialize_pdf(embed_grid(letter, pi).doc));
    o.require(recovered(extract_grid(g)) == w, "grid" + tag);
    const auto added = pdf::content_stream_tokens(*g.get({6, 0}).get_if<pdf::Stream>());
    std::size_t markers = 0;
    for (const auto& op : added) markers += op.op == "re";
    o.require(markers == pi.size() && g.objects.size() == letter.objects.size() + 1,
              "grid marker count" + tag);

    const auto t = pdf::parse_pdf(pdf::serialize_pdf(embed_structure(deep, pi).doc));
    o.require(recovered(extract_structure_sip(t)) == w, "structure" + tag);
    o.require(pdf::get_page_tree(t).pages == leaves, "structure leaves changed" + tag);
  }
}

void ac6(Outcome& o) {
  const auto& names = test::clean_fixtures();
  o.require(names.size() >= kAc6MinFiles, "corpus too small");
  for (const auto& name : names) {
    const auto doc = test::fixture(name);
    const Extraction results[] = {extract_spacing(doc), extract_grid(doc),
                                  extract_structure_sip(doc)};
    for (const auto& ex : results) {
      auto copy = ex;
      attach_watermark(copy);
      const auto st = copy.report.status;
      o.require(!copy.report.w && (st == Status::not_watermarked || st == Status::extraction_failed),
                name + ": " + std::string(to_string(copy.report.scheme)) + " gave " +
                    std::string(to_string(st)));
    }
  }
}

void ac7(Outcome& o) {
  const SelfInvertingPermutation pi{3, 5, 1, 4, 2};
  const auto marks = sip_to_1dm(pi).marked_positions;
  o.require(marks == std::vector<std::size_t>{3, 10, 11, 19, 22}, "unexpected 1DM marks");
  const auto e = embed_spacing(test::fixture("paragraph_50"), pi);
  const auto ex = extract_spacing(pdf::parse_pdf(pdf::serialize_pdf(e.doc)));
  o.require(ex.ok() && *ex.sip == pi, "spacing round trip lost the permutation");
}

}  // namespace

int main() {
  criterion("AC1", "w=4 encodes to (4,7,6,1,5,3,2), diagonal at (5,5)", kAc1LimitMs, ac1);
  criterion("AC2", "exhaustive codec suite, lengths 1..9", kAc2LimitMs, ac2);
  criterion("AC3", "w round trip on [1,2^20] and 10^4 random w", kAc3LimitMs, ac3);
  criterion("AC4", "parse/serialize fixpoint and exact xref on the corpus", kAc4LimitMs, ac4);
  criterion("AC5", "embed/extract for 3 schemes x 6 watermarks", kAc5LimitMs, ac5);
  criterion("AC6", "clean files never yield a watermark", 0, ac6);
  criterion("AC7", "spacing round trip for (3,5,1,4,2) with adjacent marks", 0, ac7);
  std::printf("%s: %d of 7 criteria failed\n", failures ? "FAILED" : "PASSED", failures);
  return failures ? 1 : 0;
}
