#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sipmark/error.hpp"
#include "sipmark/pdf.hpp"
#include "sipmark/sip.hpp"
#include "sipmark/watermark/report.hpp"

namespace sipmark::watermark {

struct GridConfig {
  std::size_t page_index = 0;
  double marker_size = 0.5;
  std::array<double, 3> marker_color{1.0, 1.0, 1.0};
  // Require the single diagonal mark in the upper half, as every
  // permutation produced from a watermark has it. Arbitrary involutions
  // need this off.
  bool strict_diagonal = true;

  void validate() const {
    if (!(marker_size > 0)) throw Error(ErrorCode::config_error, "marker size must be positive");
    for (double c : marker_color) {
      if (c < 0 || c > 1) throw Error(ErrorCode::config_error, "marker color out of range");
    }
  }
};

struct GridGeometry {
  double llx = 0, lly = 0;
  double width = 0, height = 0;  // N and M
  std::size_t n_star = 0;
  double cell_width = 0, cell_height = 0;

  /// Center of cell (row, col), rows counted from the top.
  std::pair<double, double> center(std::size_t row, std::size_t col) const {
    return {llx + (static_cast<double>(col) - 0.5) * cell_width,
            lly + height - (static_cast<double>(row) - 0.5) * cell_height};
  }
};

namespace grid_detail {

struct Matrix {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

  // this x other, the order PDF uses for "cm"
  Matrix then(const Matrix& o) const {
    return {a * o.a + b * o.c,       a * o.b + b * o.d,       c * o.a + d * o.c,
            c * o.b + d * o.d,       e * o.a + f * o.c + o.e, e * o.b + f * o.d + o.f};
  }
  std::pair<double, double> apply(double x, double y) const {
    return {a * x + c * y + e, b * x + d * y + f};
  }
  bool is_identity() const {
    return a == 1 && b == 0 && c == 0 && d == 1 && e == 0 && f == 0;
  }
  double det() const { return a * d - b * c; }
  Matrix inverse() const {
    const double k = det();
    return {d / k, -b / k, -c / k, a / k, (c * f - d * e) / k, (b * e - a * f) / k};
  }
};

struct State {
  Matrix ctm;
  std::optional<std::array<double, 3>> fill;
};

inline std::optional<Matrix> matrix_operands(const pdf::ContentOp& op) {
  if (op.operands.size() != 6) return std::nullopt;
  std::array<double, 6> v{};
  for (std::size_t k = 0; k < 6; ++k) {
    auto n = op.operands[k].number();
    if (!n) return std::nullopt;
    v[k] = *n;
  }
  return Matrix{v[0], v[1], v[2], v[3], v[4], v[5]};
}

/// Walks the page's graphics state through a sequence of operators.
class StateTracker {
 public:
  void step(const pdf::ContentOp& op) {
    if (op.op == "q") {
      stack_.push_back(state_);
    } else if (op.op == "Q") {
      if (!stack_.empty()) {
        state_ = stack_.back();
        stack_.pop_back();
      }
    } else if (op.op == "cm") {
      if (auto m = matrix_operands(op)) state_.ctm = m->then(state_.ctm);
    } else if (op.op == "rg" && op.operands.size() == 3) {
      std::array<double, 3> rgb{};
      for (std::size_t k = 0; k < 3; ++k) rgb[k] = op.operands[k].number().value_or(-1);
      state_.fill = rgb;
    } else if (op.op == "g" && op.operands.size() == 1) {
      const double v = op.operands[0].number().value_or(-1);
      state_.fill = std::array<double, 3>{v, v, v};
    } else if (op.op == "k" || op.op == "sc" || op.op == "scn" || op.op == "cs") {
      state_.fill.reset();
    }
  }

  const State& state() const { return state_; }
  std::size_t depth() const { return stack_.size(); }
  // CTM in effect once every open q has been closed.
  const Matrix& base_ctm() const { return stack_.empty() ? state_.ctm : stack_.front().ctm; }

 private:
  State state_;
  std::vector<State> stack_;
};

inline std::vector<pdf::ContentOp> page_ops(const pdf::PdfDocument& doc, pdf::Ref page) {
  std::vector<pdf::ContentOp> out;
  for (auto r : pdf::page_content_refs(doc, page)) {
    auto ops = pdf::content_stream_tokens(*doc.get(r).get_if<pdf::Stream>());
    out.insert(out.end(), std::make_move_iterator(ops.begin()),
               std::make_move_iterator(ops.end()));
  }
  return out;
}

inline pdf::Ref select_page(const pdf::PdfDocument& doc, std::size_t index) {
  const auto tree = pdf::get_page_tree(doc);
  if (index >= tree.pages.size()) {
    throw Error(ErrorCode::malformed_document, "document has " + std::to_string(tree.pages.size()) +
                                                   " pages, page " + std::to_string(index + 1) +
                                                   " requested");
  }
  return tree.pages[index];
}

inline pdf::Object num(double v) {
  if (v == std::floor(v) && std::fabs(v) < 1e15) return pdf::Integer{static_cast<std::int64_t>(v)};
  return pdf::Real{v};
}

inline pdf::ContentOp make_op(std::string name, std::vector<double> operands) {
  pdf::ContentOp op{std::move(name), {}, {}};
  for (double v : operands) op.operands.push_back(num(v));
  return op;
}

struct Marker {
  double x = 0, y = 0;  // center, default user space of the page
};

}  // namespace grid_detail

inline std::array<double, 4> media_box(const pdf::PdfDocument& doc, pdf::Ref page) {
  auto* box = pdf::inherited_attribute(doc, page, "MediaBox");
  auto* arr = box ? box->get_if<pdf::Array>() : nullptr;
  if (!arr || arr->items.size() != 4) {
    throw Error(ErrorCode::malformed_document, "page has no usable /MediaBox");
  }
  std::array<double, 4> v{};
  for (std::size_t k = 0; k < 4; ++k) {
    auto n = pdf::resolve(doc, arr->items[k]).number();
    if (!n) throw Error(ErrorCode::malformed_document, "non-numeric /MediaBox entry");
    v[k] = *n;
  }
  return {std::min(v[0], v[2]), std::min(v[1], v[3]), std::max(v[0], v[2]),
          std::max(v[1], v[3])};
}

inline GridGeometry grid_geometry(const std::array<double, 4>& box, std::size_t n_star,
                                  double marker_size = 0.5) {
  GridGeometry g;
  g.llx = box[0];
  g.lly = box[1];
  g.width = box[2] - box[0];
  g.height = box[3] - box[1];
  g.n_star = n_star;
  g.cell_width = std::floor(g.width / static_cast<double>(n_star));
  g.cell_height = std::floor(g.height / static_cast<double>(n_star));
  if (g.cell_width < 2 || g.cell_height < 2 || marker_size >= g.cell_width ||
      marker_size >= g.cell_height) {
    throw Error(ErrorCode::capacity_error,
                "page too small for a " + std::to_string(n_star) + "x" + std::to_string(n_star) +
                    " grid");
  }
  return g;
}

/// Largest n* whose grid fits on the page.
inline std::size_t grid_capacity(const pdf::PdfDocument& doc, const GridConfig& cfg = {}) {
  const auto box = media_box(doc, grid_detail::select_page(doc, cfg.page_index));
  std::size_t best = 0;
  for (std::size_t n = 1;; ++n) {
    try {
      grid_geometry(box, n, cfg.marker_size);
      best = n;
    } catch (const Error&) {
      return best;
    }
  }
}

inline Embedding embed_grid(pdf::PdfDocument doc, const SelfInvertingPermutation& pi,
                            const GridConfig& cfg = {}) {
  using namespace grid_detail;
  cfg.validate();
  const auto page = select_page(doc, cfg.page_index);
  const auto geo = grid_geometry(media_box(doc, page), pi.size(), cfg.marker_size);

  // Undo whatever graphics state the existing content leaves behind so the
  // markers are drawn in default user space.
  StateTracker tracker;
  for (const auto& op : page_ops(doc, page)) tracker.step(op);
  std::vector<pdf::ContentOp> ops;
  for (std::size_t k = 0; k < tracker.depth(); ++k) ops.push_back({"Q", {}, {}});
  const Matrix base = tracker.base_ctm();
  if (!base.is_identity()) {
    if (std::fabs(base.det()) < 1e-12) {
      throw Error(ErrorCode::embedding_error, "page content leaves a singular transform");
    }
    const auto inv = base.inverse();
    ops.push_back(make_op("cm", {inv.a, inv.b, inv.c, inv.d, inv.e, inv.f}));
  }

  ops.push_back({"q", {}, {}});
  const auto& rgb = cfg.marker_color;
  ops.push_back(make_op("rg", {rgb[0], rgb[1], rgb[2]}));
  const double s = cfg.marker_size;
  json markers = json::array();
  for (const auto& [row, col] : sip_to_2dm(pi).marked_cells) {
    const auto [x, y] = geo.center(row, col);
    ops.push_back(make_op("re", {x - s / 2, y - s / 2, s, s}));
    ops.push_back({"f", {}, {}});
    markers.push_back({{"row", row}, {"col", col}, {"x", x}, {"y", y}});
  }
  ops.push_back({"Q", {}, {}});

  pdf::Stream stream;
  pdf::set_stream_plain(stream, pdf::write_content_stream(ops));
  const auto added = doc.add(std::move(stream));

  auto& page_dict = *doc.get(page).dict();
  pdf::Array contents;
  if (auto* existing = page_dict.find("Contents")) {
    const auto& target = pdf::resolve(doc, *existing);
    if (auto* arr = target.get_if<pdf::Array>()) {
      contents = *arr;
    } else {
      contents.items.push_back(*existing);
    }
  }
  contents.items.push_back(added);
  page_dict.set("Contents", std::move(contents));

  WatermarkReport report;
  report.scheme = Scheme::grid;
  report.n_star = pi.size();
  report.sip = pi;
  report.locations = {
      {"page", cfg.page_index + 1},
      {"stream", added.number},
      {"cell_width", geo.cell_width},
      {"cell_height", geo.cell_height},
      {"markers", std::move(markers)},
  };
  return {std::move(doc), std::move(report)};
}

/// Marker-signature rectangles on a page, in drawing order.
inline std::vector<grid_detail::Marker> find_markers(const pdf::PdfDocument& doc, pdf::Ref page,
                                                     const GridConfig& cfg = {}) {
  using namespace grid_detail;
  constexpr double kSizeTol = 1e-6;
  constexpr double kColorTol = 1.0 / 512;
  std::vector<Marker> found;
  std::vector<Marker> pending;
  StateTracker tracker;
  for (const auto& op : page_ops(doc, page)) {
    if (op.op == "re" && op.operands.size() == 4) {
      std::array<double, 4> v{};
      bool numeric = true;
      for (std::size_t k = 0; k < 4; ++k) {
        auto n = op.operands[k].number();
        numeric = numeric && n.has_value();
        v[k] = n.value_or(0);
      }
      if (numeric && std::fabs(v[2] - cfg.marker_size) < kSizeTol &&
          std::fabs(v[3] - cfg.marker_size) < kSizeTol) {
        const auto [x, y] = tracker.state().ctm.apply(v[0] + v[2] / 2, v[1] + v[3] / 2);
        pending.push_back({x, y});
      }
      continue;
    }
    if (op.op == "f" || op.op == "F" || op.op == "f*") {
      const auto& fill = tracker.state().fill;
      bool color_ok = fill.has_value();
      for (std::size_t k = 0; color_ok && k < 3; ++k) {
        color_ok = std::fabs((*fill)[k] - cfg.marker_color[k]) < kColorTol;
      }
      if (color_ok) found.insert(found.end(), pending.begin(), pending.end());
      pending.clear();
    } else if (op.kind() == pdf::OpKind::path && op.op != "m" && op.op != "l" && op.op != "c" &&
               op.op != "v" && op.op != "y" && op.op != "h") {
      pending.clear();
    }
    tracker.step(op);
  }
  return found;
}

inline Extraction extract_grid(const pdf::PdfDocument& doc, const GridConfig& cfg = {}) {
  cfg.validate();
  Extraction ex;
  ex.report.scheme = Scheme::grid;
  const auto page = grid_detail::select_page(doc, cfg.page_index);
  const auto box = media_box(doc, page);
  const auto markers = find_markers(doc, page, cfg);
  if (markers.empty()) {
    ex.report.fail(Status::extraction_failed, "no markers on page " +
                                                  std::to_string(cfg.page_index + 1));
    return ex;
  }
  const std::size_t n_star = markers.size();
  ex.report.n_star = n_star;

  GridGeometry geo;
  try {
    geo = grid_geometry(box, n_star, cfg.marker_size);
  } catch (const Error& e) {
    ex.report.fail(Status::extraction_failed, e.what());
    return ex;
  }

  MarkedMatrix2D mat;
  mat.size = n_star;
  json cells = json::array();
  std::string problems;
  for (const auto& m : markers) {
    const double dx = (m.x - geo.llx) / geo.cell_width;
    const double dy = (geo.lly + geo.height - m.y) / geo.cell_height;
    const double col = std::floor(dx) + 1;
    const double row = std::floor(dy) + 1;
    const bool inside = dx > col - 1 && dx < col && dy > row - 1 && dy < row && col >= 1 &&
                        row >= 1 && col <= static_cast<double>(n_star) &&
                        row <= static_cast<double>(n_star);
    cells.push_back({{"x", m.x},
                     {"y", m.y},
                     {"row", inside ? json(static_cast<std::size_t>(row)) : json(nullptr)},
                     {"col", inside ? json(static_cast<std::size_t>(col)) : json(nullptr)}});
    if (!inside) {
      problems += (problems.empty() ? "" : "; ") + std::string("marker at (") +
                  pdf::format_real(m.x) + "," + pdf::format_real(m.y) + ") lies outside the grid";
      continue;
    }
    mat.marked_cells.insert({static_cast<std::size_t>(row), static_cast<std::size_t>(col)});
  }
  ex.report.locations = {{"page", cfg.page_index + 1},
                         {"cell_width", geo.cell_width},
                         {"cell_height", geo.cell_height},
                         {"markers", cells}};
  if (problems.empty() && mat.marked_cells.size() != n_star) problems = "markers share a cell";
  if (problems.empty()) problems = check_matrix_structure(mat);
  if (problems.empty() && cfg.strict_diagonal) problems = check_watermark_diagonal(mat);
  if (!problems.empty()) {
    ex.report.fail(Status::extraction_failed, "inconsistent marker pattern: " + problems);
    ex.report.diagnostics.push_back(dump(mat));
    return ex;
  }
  ex.sip = twodm_to_sip(mat);
  ex.report.sip = ex.sip;
  return ex;
}

}  // namespace sipmark::watermark
