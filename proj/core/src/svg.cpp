#include "gfk/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace gfk::svg {
namespace {

constexpr double kLeft = 60, kRight = 20, kTop = 36, kBottom = 48;

struct Frame {
  const Axes& a;
  double px(double x) const {
    const double w = a.width - kLeft - kRight;
    return kLeft + (x - a.x_min) / (a.x_max - a.x_min) * w;
  }
  double py(double y) const {
    const double h = a.height - kTop - kBottom;
    return kTop + (1.0 - (y - a.y_min) / (a.y_max - a.y_min)) * h;
  }
};

std::string open(const Axes& a) {
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      a.width, a.height);
  s += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", a.width, a.height);
  s += fmt::format("<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", a.width / 2,
                   escape(a.title));
  return s;
}

std::string axes_lines(const Axes& a, const Frame& f, bool x_ticks) {
  std::string s;
  const double x0 = f.px(a.x_min), x1 = f.px(a.x_max), y0 = f.py(a.y_min), y1 = f.py(a.y_max);
  s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", x0, y0, x1, y0);
  s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", x0, y0, x0, y1);
  for (int i = 0; i <= 4; ++i) {
    const double v = a.y_min + (a.y_max - a.y_min) * i / 4.0;
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.3g}</text>\n", x0 - 6, f.py(v) + 4, v);
    s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n", x0, f.py(v),
                     x1, f.py(v));
  }
  if (x_ticks) {
    for (int i = 0; i <= 4; ++i) {
      const double v = a.x_min + (a.x_max - a.x_min) * i / 4.0;
      s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.3g}</text>\n", f.px(v), y0 + 16, v);
    }
  }
  s += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (x0 + x1) / 2, a.height - 8,
                   escape(a.x_label));
  s += fmt::format("<text x=\"14\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.2f})\">{}</text>\n",
                   (y0 + y1) / 2, (y0 + y1) / 2, escape(a.y_label));
  return s;
}

}  // namespace

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

std::string line_plot(const Axes& axes, const std::vector<Band>& bands, const std::vector<Series>& series) {
  const Frame f{axes};
  std::string s = open(axes);
  s += axes_lines(axes, f, true);
  for (const Band& b : bands) {
    // one polygon per run of finite samples
    std::size_t i = 0;
    const std::size_t n = std::min({b.x.size(), b.lo.size(), b.hi.size()});
    while (i < n) {
      while (i < n && !(std::isfinite(b.lo[i]) && std::isfinite(b.hi[i]))) ++i;
      const std::size_t start = i;
      while (i < n && std::isfinite(b.lo[i]) && std::isfinite(b.hi[i])) ++i;
      if (i == start) continue;
      std::string pts;
      for (std::size_t k = start; k < i; ++k) pts += fmt::format("{:.2f},{:.2f} ", f.px(b.x[k]), f.py(b.hi[k]));
      for (std::size_t k = i; k-- > start;) pts += fmt::format("{:.2f},{:.2f} ", f.px(b.x[k]), f.py(b.lo[k]));
      s += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.25\" stroke=\"none\"/>\n", pts, b.color);
    }
  }
  int legend = 0;
  for (const Series& se : series) {
    std::string d;
    bool pen = false;
    for (std::size_t k = 0; k < std::min(se.x.size(), se.y.size()); ++k) {
      if (!std::isfinite(se.y[k])) {
        pen = false;
        continue;
      }
      d += fmt::format("{}{:.2f},{:.2f} ", pen ? "L" : "M", f.px(se.x[k]), f.py(se.y[k]));
      pen = true;
    }
    s += fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", d, se.color);
    if (!se.label.empty()) {
      const double ly = kTop + 14 + 16 * legend++;
      s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\" fill=\"{}\">{}</text>\n",
                       axes.width - kRight - 4, ly, se.color, escape(se.label));
    }
  }
  s += "</svg>\n";
  return s;
}

std::string bar_chart(const Axes& axes, const std::vector<Bar>& bars) {
  Axes a = axes;
  a.x_min = 0.0;
  a.x_max = std::max<double>(1.0, double(bars.size()));
  const Frame f{a};
  std::string s = open(a);
  s += axes_lines(a, f, false);
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const Bar& b = bars[i];
    const double x0 = f.px(i + 0.15), x1 = f.px(i + 0.85);
    const double top = f.py(std::clamp(b.value, a.y_min, a.y_max)), base = f.py(std::max(a.y_min, 0.0));
    s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n", x0,
                     std::min(top, base), x1 - x0, std::abs(base - top), b.color);
    if (b.error > 0.0 && std::isfinite(b.error)) {
      const double xm = (x0 + x1) / 2;
      const double e0 = f.py(std::clamp(b.value - b.error, a.y_min, a.y_max));
      const double e1 = f.py(std::clamp(b.value + b.error, a.y_min, a.y_max));
      s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n", xm,
                       e0, e1);
    }
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", (x0 + x1) / 2,
                     f.py(a.y_min) + 16, escape(b.label));
  }
  s += "</svg>\n";
  return s;
}

}  // namespace gfk::svg
