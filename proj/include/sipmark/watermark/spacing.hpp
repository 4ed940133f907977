#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sipmark/error.hpp"
#include "sipmark/pdf.hpp"
#include "sipmark/sip.hpp"
#include "sipmark/watermark/report.hpp"

namespace sipmark::watermark {

/// Explicit paragraph choice: page and content stream, both 0-based.
struct ParagraphSelector {
  std::size_t page_index = 0;
  std::size_t stream_index = 0;
};

struct SpacingConfig {
  int delta = 60;  // thousandths of text-space units
  std::optional<ParagraphSelector> paragraph;

  double threshold() const { return delta / 2.0; }

  void validate() const {
    if (delta < 20) {
      throw Error(ErrorCode::config_error, "spacing delta must be at least 20");
    }
  }
};

namespace spacing_detail {

struct Glyph {
  char c;
  double kern_after;  // TJ adjustment following this byte
};

struct ShowText {
  double lead = 0;
  std::vector<Glyph> glyphs;
};

inline bool is_show_op(const pdf::ContentOp& op) {
  if (op.op == "Tj") return op.operands.size() == 1 && op.operands[0].is<pdf::String>();
  if (op.op == "TJ") return op.operands.size() == 1 && op.operands[0].is<pdf::Array>();
  return false;
}

inline ShowText read_show(const pdf::ContentOp& op) {
  ShowText out;
  auto add_string = [&](const std::string& s) {
    for (char c : s) out.glyphs.push_back({c, 0.0});
  };
  auto add_number = [&](double v) {
    if (out.glyphs.empty()) {
      out.lead += v;
    } else {
      out.glyphs.back().kern_after += v;
    }
  };
  if (op.op == "Tj") {
    add_string(op.operands[0].get_if<pdf::String>()->bytes);
    return out;
  }
  for (const auto& item : op.operands[0].get_if<pdf::Array>()->items) {
    if (auto* s = item.get_if<pdf::String>()) {
      add_string(s->bytes);
    } else if (auto v = item.number()) {
      add_number(*v);
    }
  }
  return out;
}

inline pdf::Object number_object(double v) {
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    return pdf::Integer{static_cast<std::int64_t>(v)};
  }
  return pdf::Real{v};
}

inline pdf::ContentOp write_show(const ShowText& text) {
  pdf::Array arr;
  if (text.lead != 0) arr.items.push_back(number_object(text.lead));
  std::string run;
  for (const auto& g : text.glyphs) {
    run.push_back(g.c);
    if (g.kern_after != 0) {
      arr.items.push_back(pdf::String{run});
      run.clear();
      arr.items.push_back(number_object(g.kern_after));
    }
  }
  if (!run.empty() || arr.items.empty()) arr.items.push_back(pdf::String{run});
  return pdf::ContentOp{"TJ", {pdf::Object(std::move(arr))}, {}};
}

inline std::vector<std::size_t> gap_glyphs(const ShowText& text) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < text.glyphs.size(); ++k) {
    if (text.glyphs[k].c == ' ') out.push_back(k);
  }
  return out;
}

/// A text-showing operator that could carry the watermark.
struct TextRun {
  std::size_t page_index = 0;
  std::size_t stream_index = 0;
  pdf::Ref stream_ref;
  std::size_t op_index = 0;
  std::size_t gaps = 0;
  bool multibyte = false;  // shown with a Type0 font; bytes are not characters
};

inline const pdf::Dictionary* page_fonts(const pdf::PdfDocument& doc, pdf::Ref page) {
  auto* res = pdf::inherited_attribute(doc, page, "Resources");
  if (!res || !res->dict()) return nullptr;
  auto* fonts = pdf::lookup(doc, *res->dict(), "Font");
  return fonts ? fonts->dict() : nullptr;
}

inline bool is_multibyte_font(const pdf::PdfDocument& doc, const pdf::Dictionary* fonts,
                              std::string_view name) {
  if (!fonts) return false;
  auto* font = pdf::lookup(doc, *fonts, name);
  if (!font || !font->dict()) return false;
  auto* subtype = pdf::lookup(doc, *font->dict(), "Subtype");
  return subtype && subtype->name() == "Type0";
}

struct StreamRuns {
  std::size_t page_index = 0;
  std::size_t stream_index = 0;
  pdf::Ref ref;
  std::vector<TextRun> runs;
};

inline std::vector<TextRun> runs_in_stream(const pdf::PdfDocument& doc, pdf::Ref page,
                                           std::size_t page_index, std::size_t stream_index,
                                           pdf::Ref ref) {
  std::vector<TextRun> out;
  const auto ops = pdf::content_stream_tokens(*doc.get(ref).get_if<pdf::Stream>());
  const auto* fonts = page_fonts(doc, page);
  std::string font;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const auto& op = ops[k];
    if (op.op == "Tf" && !op.operands.empty()) font = std::string(op.operands[0].name());
    if (!is_show_op(op)) continue;
    TextRun run{page_index, stream_index, ref, k, gap_glyphs(read_show(op)).size(),
                is_multibyte_font(doc, fonts, font)};
    out.push_back(run);
  }
  return out;
}

/// Every content stream of every page, once each, in page order. Streams
/// that cannot be decoded are skipped and noted.
inline std::vector<StreamRuns> all_streams(const pdf::PdfDocument& doc,
                                           std::vector<std::string>* notes = nullptr) {
  std::vector<StreamRuns> out;
  std::set<pdf::Ref> seen;
  const auto tree = pdf::get_page_tree(doc);
  for (std::size_t p = 0; p < tree.pages.size(); ++p) {
    const auto refs = pdf::page_content_refs(doc, tree.pages[p]);
    for (std::size_t s = 0; s < refs.size(); ++s) {
      if (!seen.insert(refs[s]).second) continue;
      try {
        out.push_back({p, s, refs[s], runs_in_stream(doc, tree.pages[p], p, s, refs[s])});
      } catch (const Error& e) {
        if (notes) notes->push_back("skipped stream " + pdf::to_string(refs[s]) + ": " + e.what());
      }
    }
  }
  return out;
}

inline StreamRuns selected_stream(const pdf::PdfDocument& doc, const ParagraphSelector& sel) {
  const auto tree = pdf::get_page_tree(doc);
  if (sel.page_index >= tree.pages.size()) {
    throw Error(ErrorCode::unsupported_layout,
                "paragraph override names page " + std::to_string(sel.page_index + 1) +
                    " of " + std::to_string(tree.pages.size()));
  }
  const auto page = tree.pages[sel.page_index];
  const auto refs = pdf::page_content_refs(doc, page);
  if (sel.stream_index >= refs.size()) {
    throw Error(ErrorCode::unsupported_layout, "paragraph override names a missing content stream");
  }
  return {sel.page_index, sel.stream_index, refs[sel.stream_index],
          runs_in_stream(doc, page, sel.page_index, sel.stream_index, refs[sel.stream_index])};
}

/// The run with the most gaps in a stream; first one wins ties.
inline const TextRun* longest_run(const StreamRuns& s, bool allow_multibyte) {
  const TextRun* best = nullptr;
  for (const auto& r : s.runs) {
    if (r.multibyte && !allow_multibyte) continue;
    if (!best || r.gaps > best->gaps) best = &r;
  }
  return best;
}

inline std::vector<double> gap_widths(const ShowText& text) {
  std::vector<double> out;
  for (auto k : gap_glyphs(text)) out.push_back(0.0 - text.glyphs[k].kern_after);
  return out;
}

/// 1-based indices of gaps that exceed a neighbor by more than `threshold`.
inline std::vector<std::size_t> marked_gaps(const std::vector<double>& widths, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < widths.size(); ++k) {
    const bool left = k > 0 && widths[k] > widths[k - 1] + threshold;
    const bool right = k + 1 < widths.size() && widths[k] > widths[k + 1] + threshold;
    if (left || right) out.push_back(k + 1);
  }
  return out;
}

}  // namespace spacing_detail

/// Concatenated bytes of every Tj/TJ string on every page, in page order.
inline std::string visible_text(const pdf::PdfDocument& doc) {
  std::string out;
  for (const auto& s : spacing_detail::all_streams(doc)) {
    const auto ops = pdf::content_stream_tokens(*doc.get(s.ref).get_if<pdf::Stream>());
    for (const auto& op : ops) {
      if (!spacing_detail::is_show_op(op)) continue;
      for (const auto& g : spacing_detail::read_show(op).glyphs) out.push_back(g.c);
    }
  }
  return out;
}

/// Largest gap count offered by any eligible text run (capacity estimate).
inline std::size_t spacing_capacity_gaps(const pdf::PdfDocument& doc) {
  std::size_t best = 0;
  for (const auto& s : spacing_detail::all_streams(doc)) {
    if (auto* r = spacing_detail::longest_run(s, false)) best = std::max(best, r->gaps);
  }
  return best;
}

inline Embedding embed_spacing(pdf::PdfDocument doc, const SelfInvertingPermutation& pi,
                               const SpacingConfig& cfg = {}) {
  using namespace spacing_detail;
  cfg.validate();
  const std::size_t n_star = pi.size();
  const std::size_t needed = n_star * n_star;

  WatermarkReport report;
  report.scheme = Scheme::spacing;
  report.n_star = n_star;
  report.sip = pi;

  std::optional<TextRun> chosen;
  if (cfg.paragraph) {
    const auto s = selected_stream(doc, *cfg.paragraph);
    auto* run = longest_run(s, true);
    if (!run) throw Error(ErrorCode::unsupported_layout, "selected stream shows no text");
    if (run->multibyte) {
      throw Error(ErrorCode::unsupported_layout, "selected text uses a multi-byte font");
    }
    if (run->gaps < needed) {
      throw Error(ErrorCode::capacity_error,
                  "selected paragraph has " + std::to_string(run->gaps) + " gaps, need " +
                      std::to_string(needed));
    }
    chosen = *run;
  } else {
    std::size_t best_seen = 0;
    for (const auto& s : all_streams(doc, &report.diagnostics)) {
      auto* run = longest_run(s, false);
      if (!run) continue;
      best_seen = std::max(best_seen, run->gaps);
      if (run->gaps >= needed) {
        chosen = *run;
        break;
      }
    }
    if (!chosen) {
      throw Error(ErrorCode::capacity_error,
                  "no paragraph with " + std::to_string(needed + 1) + " words (largest has " +
                      std::to_string(best_seen == 0 ? 0 : best_seen + 1) + ")");
    }
  }

  const auto marks = sip_to_1dm(pi).marked_positions;
  for (std::size_t k = 2; k < marks.size(); ++k) {
    if (marks[k] == marks[k - 1] + 1 && marks[k - 1] == marks[k - 2] + 1) {
      throw Error(ErrorCode::embedding_error, "three consecutive marked gaps");
    }
  }

  auto& stream = *doc.get(chosen->stream_ref).get_if<pdf::Stream>();
  auto ops = pdf::content_stream_tokens(stream);
  auto text = read_show(ops[chosen->op_index]);
  const auto gaps = gap_glyphs(text);
  for (auto k : gaps) text.glyphs[k].kern_after = 0;
  for (auto p : marks) text.glyphs[gaps[p - 1]].kern_after = -static_cast<double>(cfg.delta);
  ops[chosen->op_index] = write_show(text);
  pdf::set_stream_plain(stream, pdf::write_content_stream(ops));

  report.locations = {
      {"page", chosen->page_index + 1},
      {"stream", chosen->stream_ref.number},
      {"operator_index", chosen->op_index},
      {"gaps", gaps.size()},
      {"delta", cfg.delta},
      {"marked_gaps", marks},
  };
  return {std::move(doc), std::move(report)};
}

inline Extraction extract_spacing(const pdf::PdfDocument& doc, const SpacingConfig& cfg = {}) {
  using namespace spacing_detail;
  cfg.validate();
  Extraction ex;
  ex.report.scheme = Scheme::spacing;

  std::vector<StreamRuns> streams;
  if (cfg.paragraph) {
    streams.push_back(selected_stream(doc, *cfg.paragraph));
  } else {
    streams = all_streams(doc, &ex.report.diagnostics);
  }

  bool any_marks = false;
  for (const auto& s : streams) {
    const auto ops = pdf::content_stream_tokens(*doc.get(s.ref).get_if<pdf::Stream>());
    for (const auto& run : s.runs) {
      if (run.multibyte || run.gaps == 0) continue;
      const auto widths = gap_widths(read_show(ops[run.op_index]));
      const auto marks = marked_gaps(widths, cfg.threshold());
      if (marks.empty()) continue;
      any_marks = true;
      const std::string where = "stream " + std::to_string(s.ref.number) + " operator " +
                                std::to_string(run.op_index);
      const std::size_t n_star = marks.size();
      if (n_star * n_star > widths.size()) {
        ex.report.diagnostics.push_back(where + ": " + std::to_string(n_star) +
                                        " marks but only " + std::to_string(widths.size()) +
                                        " gaps");
        continue;
      }
      try {
        ex.sip = onedm_to_sip(MarkedArray1D{n_star * n_star, marks});
      } catch (const Error& e) {
        ex.report.diagnostics.push_back(where + ": " + e.what());
        continue;
      }
      ex.report.n_star = n_star;
      ex.report.sip = ex.sip;
      ex.report.locations = {
          {"page", s.page_index + 1},
          {"stream", s.ref.number},
          {"operator_index", run.op_index},
          {"gaps", widths.size()},
          {"threshold", cfg.threshold()},
          {"marked_gaps", marks},
          {"gap_widths", widths},
      };
      return ex;
    }
  }
  ex.report.fail(Status::extraction_failed,
                 any_marks ? "no text run decodes to a self-inverting permutation"
                           : "no marked gaps");
  return ex;
}

}  // namespace sipmark::watermark
