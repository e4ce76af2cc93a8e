#include "hdpd/interface/plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "hdpd/common/error.h"

namespace hdpd::interface {

namespace {

std::string Escape(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Linear blend of two RGB colours, t in [0, 1].
std::string Blend(int r0, int g0, int b0, int r1, int g1, int b1, double t) {
  t = std::clamp(t, 0.0, 1.0);
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround(r0 + (r1 - r0) * t)),
                static_cast<int>(std::lround(g0 + (g1 - g0) * t)),
                static_cast<int>(std::lround(b0 + (b1 - b0) * t)));
  return buf;
}

std::vector<std::size_t> TickIndices(std::size_t n, int max_ticks) {
  std::vector<std::size_t> out;
  if (n == 0) return out;
  const std::size_t step = std::max<std::size_t>(1, (n + max_ticks - 1) / std::max(1, max_ticks));
  for (std::size_t i = 0; i < n; i += step) out.push_back(i);
  if (out.back() != n - 1) out.push_back(n - 1);
  return out;
}

class Svg {
 public:
  Svg(int width, int height) : width_(width), height_(height) {}

  void Rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& extra = "") {
    body_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
          << "\" fill=\"" << fill << "\"" << extra << "/>\n";
  }
  void Circle(double cx, double cy, double r, const std::string& extra) {
    body_ << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r << "\" " << extra
          << "/>\n";
  }
  void Text(double x, double y, std::string_view text, const std::string& extra = "") {
    body_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"sans-serif\" "
          << "font-size=\"11\"" << extra << ">" << Escape(text) << "</text>\n";
  }
  std::string Finish() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
        << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

 private:
  int width_;
  int height_;
  std::ostringstream body_;
};

// Shared frame for grids over (axis_x, axis_y); y grows upwards.
struct GridFrame {
  int cell;
  int margin;
  std::size_t nx;
  std::size_t ny;
  double X(std::size_t ix) const { return margin + static_cast<double>(ix) * cell; }
  double Y(std::size_t iy) const { return margin + static_cast<double>(ny - 1 - iy) * cell; }
  int Width() const { return static_cast<int>(2 * margin + nx * cell); }
  int Height() const { return static_cast<int>(2 * margin + ny * cell); }
};

void DrawAxes(Svg& svg, const GridFrame& f, const std::vector<double>& ax,
              const std::vector<double>& ay, std::string_view var_x, std::string_view var_y,
              int max_ticks) {
  const double bottom = f.margin + static_cast<double>(f.ny * f.cell);
  for (const std::size_t i : TickIndices(f.nx, max_ticks)) {
    svg.Text(f.X(i) + f.cell / 2.0, bottom + 14, Num(ax[i]), " text-anchor=\"middle\"");
  }
  for (const std::size_t i : TickIndices(f.ny, max_ticks)) {
    svg.Text(f.margin - 4, f.Y(i) + f.cell / 2.0 + 4, Num(ay[i]), " text-anchor=\"end\"");
  }
  svg.Text(f.margin + f.nx * f.cell / 2.0, bottom + 32, var_x, " text-anchor=\"middle\"");
  const double cy = f.margin + f.ny * f.cell / 2.0;
  svg.Text(16, cy, var_y,
           " text-anchor=\"middle\" transform=\"rotate(-90 16 " + Num(cy) + ")\"");
}

}  // namespace

std::string DiagramSvg(const diagram::Diagram& d, const PlotOptions& options) {
  d.Validate();
  const GridFrame f{options.cell_px, options.margin_px, d.nx(), d.ny()};
  Svg svg(f.Width(), f.Height());
  for (std::size_t iy = 0; iy < d.ny(); ++iy) {
    for (std::size_t ix = 0; ix < d.nx(); ++ix) {
      const std::size_t c = iy * d.nx() + ix;
      const double p = d.prob[c];
      std::string fill;
      if (d.label[c] == 1) {
        // Threshold -> light red, 1 -> dark red.
        const double t = std::isnan(p) ? 0.5 : (p - d.threshold) / std::max(1e-12, 1.0 - d.threshold);
        fill = Blend(0xf4, 0xa5, 0x82, 0xb2, 0x18, 0x2b, t);
      } else {
        const double t = std::isnan(p) ? 0.5 : (d.threshold - p) / std::max(1e-12, d.threshold);
        fill = Blend(0x92, 0xc5, 0xde, 0x21, 0x66, 0xac, t);
      }
      svg.Rect(f.X(ix), f.Y(iy), f.cell, f.cell, fill);
      if (d.active() && d.queried[c]) {
        svg.Circle(f.X(ix) + f.cell / 2.0, f.Y(iy) + f.cell / 2.0, f.cell / 8.0,
                   "fill=\"black\"");
      }
    }
  }
  svg.Circle(f.X(d.origin_x) + f.cell / 2.0, f.Y(d.origin_y) + f.cell / 2.0, f.cell / 2.6,
             "fill=\"none\" stroke=\"black\" stroke-width=\"2\"");
  DrawAxes(svg, f, d.axis_x, d.axis_y, d.var_x, d.var_y, options.max_ticks);
  svg.Text(f.margin, f.margin - 24,
           d.disease + "  " + d.record_id + "  (" + std::string(diagram::ToString(d.mode)) +
               ", " + std::string(diagram::ToString(d.pattern)) + ")");
  return svg.Finish();
}

std::string SuperimposedSvg(const diagram::SuperimposedGrid& g, const PlotOptions& options) {
  const std::size_t nx = g.axis_x.size();
  const std::size_t ny = g.axis_y.size();
  if (g.cells.size() != nx * ny) throw InvalidArgument("superimposed grid size mismatch");
  std::size_t max_count = 1;
  for (const auto& c : g.cells) max_count = std::max(max_count, c.size());
  const GridFrame f{options.cell_px, options.margin_px, nx, ny};
  Svg svg(f.Width(), f.Height());
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const auto& diseases = g.cells[iy * nx + ix];
      std::string fill = "#8fd18b";
      if (!diseases.empty()) {
        fill = Blend(0xd9, 0xd9, 0xd9, 0x40, 0x40, 0x40,
                     static_cast<double>(diseases.size()) / static_cast<double>(max_count));
      }
      svg.Rect(f.X(ix), f.Y(iy), f.cell, f.cell, fill);
    }
  }
  DrawAxes(svg, f, g.axis_x, g.axis_y, g.var_x, g.var_y, options.max_ticks);
  std::string caption = g.record_id + "  free cells: " + std::to_string(g.FreeCells());
  if (g.FreeCells() == 0) caption += "  (no joint prevention target)";
  svg.Text(f.margin, f.margin - 24, caption);
  return svg.Finish();
}

std::string ContributionSvg(const diagram::ContributionMatrix& m, const diagram::Dendrogram* tree,
                            const PlotOptions& options) {
  const std::size_t n = m.values.rows();
  const std::size_t p = m.values.cols();
  if (n != m.records.size() || p != m.features.size()) {
    throw InvalidArgument("contribution matrix labels do not match its shape");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  if (tree) {
    if (tree->order.size() != n) throw InvalidArgument("dendrogram does not match the matrix");
    order = tree->order;
  }
  const int cell = options.cell_px;
  const int left = options.margin_px * 2;
  const int top = options.margin_px * 2;
  Svg svg(static_cast<int>(left + p * cell + options.margin_px),
          static_cast<int>(top + n * cell + options.margin_px));
  for (std::size_t j = 0; j < p; ++j) {
    const double x = left + j * cell + cell / 2.0;
    svg.Text(x, top - 6, m.features[j],
             " transform=\"rotate(-60 " + Num(x) + " " + Num(top - 6) + ")\"");
  }
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = order[r];
    const double y = top + r * cell;
    svg.Text(left - 4, y + cell / 2.0 + 4, m.records[i], " text-anchor=\"end\"");
    for (std::size_t j = 0; j < p; ++j) {
      svg.Rect(left + j * cell, y, cell, cell,
               Blend(0xff, 0xff, 0xff, 0x08, 0x45, 0x94, m.values(i, j)));
    }
  }
  return svg.Finish();
}

}  // namespace hdpd::interface
