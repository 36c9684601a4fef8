#include "mono/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace mono::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string text_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

// Plot frame shared by scatter, line and bar charts.
struct Frame {
  double width = 640, height = 440;
  double left = 70, right = 160, top = 40, bottom = 60;
  Range xr, yr;
  double px(double x) const { return left + (x - xr.lo) / (xr.hi - xr.lo) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - yr.lo) / (yr.hi - yr.lo) * (height - top - bottom); }
};

void open(std::ostringstream& o, double w, double h) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
    << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void axes(std::ostringstream& o, const Frame& f, const Axes& a, bool x_ticks = true) {
  const double x0 = f.left, x1 = f.width - f.right, y0 = f.top, y1 = f.height - f.bottom;
  o << "<text x=\"" << num(f.width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
    << text_escape(a.title) << "</text>\n";
  o << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y1)
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y1)
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = f.yr.lo + (f.yr.hi - f.yr.lo) * i / 4.0;
    o << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(f.py(yv) + 4) << "\" text-anchor=\"end\">" << tick(yv)
      << "</text>\n";
    if (x_ticks) {
      const double xv = f.xr.lo + (f.xr.hi - f.xr.lo) * i / 4.0;
      o << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << num(y1 + 16) << "\" text-anchor=\"middle\">" << tick(xv)
        << "</text>\n";
    }
  }
  o << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(f.height - 15) << "\" text-anchor=\"middle\">"
    << text_escape(a.x_label) << "</text>\n";
  o << "<text x=\"15\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
    << num((y0 + y1) / 2) << ")\">" << text_escape(a.y_label) << "</text>\n";
}

void legend_entry(std::ostringstream& o, const Frame& f, std::size_t i, const std::string& color,
                  const std::string& name) {
  const double x = f.width - f.right + 12, y = f.top + 14.0 * static_cast<double>(i);
  o << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"10\" height=\"10\" fill=\"" << color
    << "\"/>\n";
  o << "<text x=\"" << num(x + 14) << "\" y=\"" << num(y + 9) << "\">" << text_escape(name) << "</text>\n";
}

std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255 - t * (255 - 8)));
  const int g = static_cast<int>(std::lround(255 - t * (255 - 48)));
  const int b = static_cast<int>(std::lround(255 - t * (255 - 107)));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string heatmap(const std::vector<std::string>& labels, const std::vector<std::optional<double>>& cells,
                    const std::string& title, double lo, double hi) {
  const std::size_t n = labels.size();
  const double cell = n > 40 ? 10.0 : 18.0;
  const double margin = 170.0;
  const double w = margin + cell * static_cast<double>(n) + 90.0;
  const double h = margin + cell * static_cast<double>(n) + 20.0;
  std::ostringstream o;
  open(o, w, h);
  o << "<text x=\"" << num(w / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << text_escape(title)
    << "</text>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double c = margin + cell * static_cast<double>(i) + cell / 2;
    o << "<text x=\"" << num(margin - 4) << "\" y=\"" << num(c + 4) << "\" text-anchor=\"end\">"
      << text_escape(labels[i]) << "</text>\n";
    o << "<text x=\"" << num(c + 4) << "\" y=\"" << num(margin - 4) << "\" transform=\"rotate(-60 " << num(c + 4)
      << ' ' << num(margin - 4) << ")\">" << text_escape(labels[i]) << "</text>\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& v = cells[i * n + j];
      const std::string fill = v ? ramp((*v - lo) / (hi - lo)) : std::string("#cccccc");
      o << "<rect x=\"" << num(margin + cell * static_cast<double>(j)) << "\" y=\""
        << num(margin + cell * static_cast<double>(i)) << "\" width=\"" << num(cell) << "\" height=\"" << num(cell)
        << "\" fill=\"" << fill << "\"><title>" << text_escape(labels[i]) << " / " << text_escape(labels[j])
        << ": " << (v ? tick(*v) : std::string("n/a")) << "</title></rect>\n";
    }
  }
  const double bx = margin + cell * static_cast<double>(n) + 20;
  for (int k = 0; k < 10; ++k) {
    o << "<rect x=\"" << num(bx) << "\" y=\"" << num(margin + 12.0 * (9 - k)) << "\" width=\"14\" height=\"12\" fill=\""
      << ramp((k + 0.5) / 10.0) << "\"/>\n";
  }
  o << "<text x=\"" << num(bx + 18) << "\" y=\"" << num(margin + 10) << "\">" << tick(hi) << "</text>\n";
  o << "<text x=\"" << num(bx + 18) << "\" y=\"" << num(margin + 120) << "\">" << tick(lo) << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

std::string scatter(const std::vector<ScatterPoint>& points, const Axes& a, std::optional<double> vertical_line,
                    const std::string& highlight_legend, const std::string& other_legend) {
  Frame f;
  for (const auto& p : points) {
    f.xr.add(p.x);
    f.yr.add(p.y);
  }
  if (vertical_line) f.xr.add(*vertical_line);
  f.xr.finish();
  f.yr.finish();
  std::ostringstream o;
  open(o, f.width, f.height);
  axes(o, f, a);
  if (f.yr.lo < 0 && f.yr.hi > 0) {
    o << "<line x1=\"" << num(f.left) << "\" y1=\"" << num(f.py(0)) << "\" x2=\"" << num(f.width - f.right)
      << "\" y2=\"" << num(f.py(0)) << "\" stroke=\"#999999\" stroke-dasharray=\"2,2\"/>\n";
  }
  if (vertical_line) {
    o << "<line x1=\"" << num(f.px(*vertical_line)) << "\" y1=\"" << num(f.top) << "\" x2=\""
      << num(f.px(*vertical_line)) << "\" y2=\"" << num(f.height - f.bottom)
      << "\" stroke=\"black\" stroke-dasharray=\"5,3\"/>\n";
  }
  for (const auto& p : points) {
    o << "<circle cx=\"" << num(f.px(p.x)) << "\" cy=\"" << num(f.py(p.y)) << "\" r=\"4\" fill=\""
      << (p.highlight ? kPalette[1] : kPalette[0]) << "\"><title>" << text_escape(p.label) << "</title></circle>\n";
  }
  if (!highlight_legend.empty()) legend_entry(o, f, 0, kPalette[1], highlight_legend);
  if (!other_legend.empty()) legend_entry(o, f, 1, kPalette[0], other_legend);
  o << "</svg>\n";
  return o.str();
}

std::string line_chart(const std::vector<Series>& series, const Axes& a) {
  Frame f;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      f.xr.add(s.x[i]);
      const double e = s.se.empty() ? 0.0 : s.se[i];
      f.yr.add(s.y[i] - e);
      f.yr.add(s.y[i] + e);
    }
  }
  f.xr.finish();
  f.yr.finish();
  std::ostringstream o;
  open(o, f.width, f.height);
  axes(o, f, a);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      o << num(f.px(s.x[i])) << ',' << num(f.py(s.y[i])) << ' ';
    }
    o << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size() && !s.se.empty(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      o << "<line x1=\"" << num(f.px(s.x[i])) << "\" y1=\"" << num(f.py(s.y[i] - s.se[i])) << "\" x2=\""
        << num(f.px(s.x[i])) << "\" y2=\"" << num(f.py(s.y[i] + s.se[i])) << "\" stroke=\"" << color << "\"/>\n";
    }
    legend_entry(o, f, k, color, s.name);
  }
  o << "</svg>\n";
  return o.str();
}

std::string bar_chart(const std::vector<std::string>& categories, const std::vector<Series>& series, const Axes& a) {
  Frame f;
  f.xr.lo = 0;
  f.xr.hi = static_cast<double>(std::max<std::size_t>(categories.size(), 1));
  f.yr.add(0.0);
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.y.size(); ++i) f.yr.add(s.y[i] + (s.se.empty() ? 0.0 : s.se[i]));
  }
  f.yr.finish();
  f.yr.lo = std::min(f.yr.lo, 0.0);
  std::ostringstream o;
  open(o, f.width, f.height);
  axes(o, f, a, false);
  const double slot = (f.px(1) - f.px(0)) * 0.8;
  const double bw = slot / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double x0 = f.px(static_cast<double>(c)) + (f.px(1) - f.px(0)) * 0.1;
    o << "<text x=\"" << num(x0 + slot / 2) << "\" y=\"" << num(f.height - f.bottom + 16)
      << "\" text-anchor=\"middle\">" << text_escape(categories[c]) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
      if (c >= series[k].y.size() || !std::isfinite(series[k].y[c])) continue;
      const double v = series[k].y[c];
      const double top = f.py(std::max(v, 0.0)), base = f.py(std::min(v, 0.0));
      o << "<rect x=\"" << num(x0 + bw * static_cast<double>(k)) << "\" y=\"" << num(top) << "\" width=\""
        << num(bw) << "\" height=\"" << num(base - top) << "\" fill=\"" << kPalette[k % std::size(kPalette)]
        << "\"/>\n";
      if (!series[k].se.empty()) {
        const double cx = x0 + bw * (static_cast<double>(k) + 0.5);
        o << "<line x1=\"" << num(cx) << "\" y1=\"" << num(f.py(v - series[k].se[c])) << "\" x2=\"" << num(cx)
          << "\" y2=\"" << num(f.py(v + series[k].se[c])) << "\" stroke=\"black\"/>\n";
      }
    }
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    legend_entry(o, f, k, kPalette[k % std::size(kPalette)], series[k].name);
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace mono::svg
