#pragma once

// Minimal SVG rendering of report figures: polylines, box plots, histograms.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "spca/bench/report.hpp"
#include "spca/stats.hpp"

namespace spca::bench {

namespace svg_detail {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

inline std::string esc(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

inline std::string num(double x) {
  std::ostringstream o;
  o.precision(4);
  o << x;
  return o.str();
}

struct Axis {
  double lo, hi;
  bool log = false;

  double map(double v, double a, double b) const {
    double t;
    if (log) {
      t = (std::log10(std::max(v, lo)) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
    } else {
      t = (v - lo) / (hi - lo);
    }
    return a + t * (b - a);
  }
};

inline Axis make_axis(double lo, double hi, bool log) {
  if (log) {
    lo = std::max(lo, std::numeric_limits<double>::min());
    hi = std::max(hi, lo * 10);
    return {std::pow(10.0, std::floor(std::log10(lo))), std::pow(10.0, std::ceil(std::log10(hi))), true};
  }
  if (!(hi > lo)) {
    const double pad = std::abs(lo) > 0 ? 0.1 * std::abs(lo) : 1.0;
    return {lo - pad, hi + pad, false};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad, false};
}

class Canvas {
 public:
  explicit Canvas(const Figure& f) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
         << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(f.title)
         << "</text>\n"
         << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
         << "\" text-anchor=\"middle\">" << esc(f.xlabel) << "</text>\n"
         << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
         << (kTop + kHeight - kBottom) / 2 << ")\">" << esc(f.ylabel) << "</text>\n"
         << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
         << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"#333\"/>\n";
  }

  double px(const Axis& a, double v) const { return a.map(v, kLeft, kWidth - kRight); }
  double py(const Axis& a, double v) const { return a.map(v, kHeight - kBottom, kTop); }

  void y_ticks(const Axis& a) {
    for (int i = 0; i <= 4; ++i) {
      const double v = a.log ? std::pow(10.0, std::log10(a.lo) + i * (std::log10(a.hi) - std::log10(a.lo)) / 4)
                             : a.lo + i * (a.hi - a.lo) / 4;
      const double y = py(a, v);
      out_ << "<line x1=\"" << kLeft - 4 << "\" x2=\"" << kLeft << "\" y1=\"" << y << "\" y2=\"" << y
           << "\" stroke=\"#333\"/><text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
           << num(v) << "</text>\n";
    }
  }

  void x_ticks(const Axis& a) {
    for (int i = 0; i <= 4; ++i) {
      const double v = a.lo + i * (a.hi - a.lo) / 4;
      const double x = px(a, v);
      out_ << "<line x1=\"" << x << "\" x2=\"" << x << "\" y1=\"" << kHeight - kBottom << "\" y2=\""
           << kHeight - kBottom + 4 << "\" stroke=\"#333\"/><text x=\"" << x << "\" y=\"" << kHeight - kBottom + 17
           << "\" text-anchor=\"middle\">" << num(v) << "</text>\n";
    }
  }

  void legend(const std::vector<Series>& series) {
    double y = kTop + 14;
    for (std::size_t i = 0; i < series.size(); ++i) {
      const char* col = kPalette[i % std::size(kPalette)];
      out_ << "<rect x=\"" << kWidth - kRight - 150 << "\" y=\"" << y - 9 << "\" width=\"10\" height=\"10\" fill=\""
           << col << "\"/><text x=\"" << kWidth - kRight - 135 << "\" y=\"" << y << "\">" << esc(series[i].label)
           << "</text>\n";
      y += 16;
    }
  }

  std::ostringstream& raw() { return out_; }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

inline std::string render_line(const Figure& f) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : f.series) {
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      const double x = i < s.x.size() ? s.x[i] : static_cast<double>(i);
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      if (!f.log_y || s.y[i] > 0) {
        ylo = std::min(ylo, s.y[i]);
        yhi = std::max(yhi, s.y[i]);
      }
    }
  }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  const Axis ax = make_axis(xlo, xhi, false);
  const Axis ay = make_axis(ylo, yhi, f.log_y);
  Canvas c(f);
  c.x_ticks(ax);
  c.y_ticks(ay);
  for (std::size_t k = 0; k < f.series.size(); ++k) {
    const auto& s = f.series[k];
    c.raw() << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kPalette[k % std::size(kPalette)]
            << "\" points=\"";
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      const double x = i < s.x.size() ? s.x[i] : static_cast<double>(i);
      c.raw() << c.px(ax, x) << ',' << c.py(ay, s.y[i]) << ' ';
    }
    c.raw() << "\"/>\n";
  }
  c.legend(f.series);
  return c.finish();
}

inline std::string render_box(const Figure& f) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : f.series) {
    for (double v : s.y) {
      if (f.log_y && !(v > 0)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  const Axis ay = make_axis(lo, hi, f.log_y);
  Canvas c(f);
  c.y_ticks(ay);
  const double slot = (kWidth - kLeft - kRight) / static_cast<double>(std::max<std::size_t>(f.series.size(), 1));
  for (std::size_t k = 0; k < f.series.size(); ++k) {
    const auto& s = f.series[k];
    const double cx = kLeft + slot * (static_cast<double>(k) + 0.5);
    c.raw() << "<text x=\"" << cx << "\" y=\"" << kHeight - kBottom + 17 << "\" text-anchor=\"middle\">"
            << esc(s.label) << "</text>\n";
    if (s.y.empty()) continue;
    const Summary st = summarize(s.y);
    const double iqr = st.q3 - st.q1;
    double wlo = st.max, whi = st.min;
    for (double v : s.y) {
      if (v >= st.q1 - 1.5 * iqr) wlo = std::min(wlo, v);
      if (v <= st.q3 + 1.5 * iqr) whi = std::max(whi, v);
    }
    const char* col = kPalette[k % std::size(kPalette)];
    const double half = std::min(40.0, slot / 4);
    c.raw() << "<line x1=\"" << cx << "\" x2=\"" << cx << "\" y1=\"" << c.py(ay, wlo) << "\" y2=\""
            << c.py(ay, whi) << "\" stroke=\"#333\"/>\n"
            << "<rect x=\"" << cx - half << "\" y=\"" << c.py(ay, st.q3) << "\" width=\"" << 2 * half
            << "\" height=\"" << std::max(0.5, c.py(ay, st.q1) - c.py(ay, st.q3)) << "\" fill=\"" << col
            << "\" fill-opacity=\"0.35\" stroke=\"" << col << "\"/>\n"
            << "<line x1=\"" << cx - half << "\" x2=\"" << cx + half << "\" y1=\"" << c.py(ay, st.median)
            << "\" y2=\"" << c.py(ay, st.median) << "\" stroke=\"#000\" stroke-width=\"2\"/>\n";
    for (double v : s.y) {
      if (v < wlo || v > whi) {
        c.raw() << "<circle cx=\"" << cx << "\" cy=\"" << c.py(ay, v) << "\" r=\"2\" fill=\"none\" stroke=\"" << col
                << "\"/>\n";
      }
    }
  }
  return c.finish();
}

inline std::string render_hist(const Figure& f, int bins = 20) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : f.series) {
    for (double v : s.y) lo = std::min(lo, v), hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (!(hi > lo)) hi = lo + 1;
  const double width = (hi - lo) / bins;
  std::vector<std::vector<int>> counts;
  int peak = 1;
  for (const auto& s : f.series) {
    std::vector<int> h(static_cast<std::size_t>(bins), 0);
    for (double v : s.y) {
      const int b = std::clamp(static_cast<int>((v - lo) / width), 0, bins - 1);
      peak = std::max(peak, ++h[static_cast<std::size_t>(b)]);
    }
    counts.push_back(std::move(h));
  }
  const Axis ax{lo, hi};
  const Axis ay{0, static_cast<double>(peak) * 1.05};
  Canvas c(f);
  c.x_ticks(ax);
  c.y_ticks(ay);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const char* col = kPalette[k % std::size(kPalette)];
    for (int b = 0; b < bins; ++b) {
      const int n = counts[k][static_cast<std::size_t>(b)];
      if (n == 0) continue;
      const double x0 = c.px(ax, lo + b * width), x1 = c.px(ax, lo + (b + 1) * width);
      const double y = c.py(ay, n);
      c.raw() << "<rect x=\"" << x0 << "\" y=\"" << y << "\" width=\"" << x1 - x0 << "\" height=\""
              << c.py(ay, 0) - y << "\" fill=\"" << col << "\" fill-opacity=\"0.45\" stroke=\"" << col << "\"/>\n";
    }
  }
  c.legend(f.series);
  return c.finish();
}

}  // namespace svg_detail

/// SVG document for a figure.
inline std::string render_svg(const Figure& f) {
  if (f.kind == "box") return svg_detail::render_box(f);
  if (f.kind == "hist") return svg_detail::render_hist(f);
  return svg_detail::render_line(f);
}

}  // namespace spca::bench
