#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "centaur/analysis/stats.hpp"

namespace centaur::analysis {

/// Self-contained SVG plots; no scripts, no external fonts.
namespace svg {

namespace detail {

inline std::string f(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

struct Frame {
  double width, height, left = 70, right = 20, top = 40, bottom = 70;
  double lo = 0, hi = 1;
  double y(double v) const { return top + (hi - v) / (hi - lo) * (height - top - bottom); }
  double plot_w() const { return width - left - right; }
};

inline std::string open(const Frame& fr, const std::string& title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f(fr.width) + "\" height=\"" + f(fr.height) +
                  "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + f(fr.width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = fr.lo + (fr.hi - fr.lo) * i / 4.0;
    const double y = fr.y(v);
    s += "<line x1=\"" + f(fr.left) + "\" x2=\"" + f(fr.width - fr.right) + "\" y1=\"" + f(y) + "\" y2=\"" + f(y) +
         "\" stroke=\"#ddd\"/>\n";
    char lab[32];
    std::snprintf(lab, sizeof lab, "%.4g", v);
    s += "<text x=\"" + f(fr.left - 6) + "\" y=\"" + f(y + 4) + "\" text-anchor=\"end\">" + lab + "</text>\n";
  }
  return s;
}

inline std::pair<double, double> padded(double lo, double hi) {
  if (hi <= lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace detail

/// Box plot: box from Q1 to Q3, median line, whiskers at the farthest point
/// within 1.5 IQR, outliers as dots.
inline std::string box_plot(const std::vector<std::pair<std::string, BoxSummary>>& boxes, const std::string& title) {
  double lo = 0, hi = 0;
  bool first = true;
  for (const auto& [_, b] : boxes) {
    lo = first ? b.min : std::min(lo, b.min);
    hi = first ? b.max : std::max(hi, b.max);
    first = false;
  }
  const auto [plo, phi] = detail::padded(lo, hi);
  detail::Frame fr{std::max(300.0, 110.0 * static_cast<double>(boxes.size()) + 90), 400};
  fr.lo = plo;
  fr.hi = phi;
  std::string s = detail::open(fr, title);
  const double slot = fr.plot_w() / static_cast<double>(std::max<std::size_t>(1, boxes.size()));
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& [label, b] = boxes[i];
    const double cx = fr.left + slot * (static_cast<double>(i) + 0.5), w = slot * 0.5;
    const auto x = [&](double dx) { return detail::f(cx + dx); };
    s += "<line x1=\"" + x(0) + "\" x2=\"" + x(0) + "\" y1=\"" + detail::f(fr.y(b.whisker_high)) + "\" y2=\"" +
         detail::f(fr.y(b.q3)) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + x(0) + "\" x2=\"" + x(0) + "\" y1=\"" + detail::f(fr.y(b.q1)) + "\" y2=\"" +
         detail::f(fr.y(b.whisker_low)) + "\" stroke=\"black\"/>\n";
    for (double wv : {b.whisker_low, b.whisker_high})
      s += "<line x1=\"" + x(-w / 4) + "\" x2=\"" + x(w / 4) + "\" y1=\"" + detail::f(fr.y(wv)) + "\" y2=\"" +
           detail::f(fr.y(wv)) + "\" stroke=\"black\"/>\n";
    s += "<rect x=\"" + x(-w / 2) + "\" y=\"" + detail::f(fr.y(b.q3)) + "\" width=\"" + detail::f(w) + "\" height=\"" +
         detail::f(std::max(0.5, fr.y(b.q1) - fr.y(b.q3))) + "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + x(-w / 2) + "\" x2=\"" + x(w / 2) + "\" y1=\"" + detail::f(fr.y(b.median)) + "\" y2=\"" +
         detail::f(fr.y(b.median)) + "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    for (double o : b.outliers)
      s += "<circle cx=\"" + x(0) + "\" cy=\"" + detail::f(fr.y(o)) + "\" r=\"2\" fill=\"none\" stroke=\"black\"/>\n";
    s += "<text x=\"" + x(0) + "\" y=\"" + detail::f(fr.height - fr.bottom + 18) + "\" text-anchor=\"middle\">" +
         detail::escape(label) + "</text>\n";
  }
  return s + "</svg>\n";
}

struct Bar {
  std::string label;
  double value;
  double error = 0;  // half-length of the error bar
};

/// Bar chart with symmetric error bars and an optional dashed reference line.
inline std::string bar_plot(const std::vector<Bar>& bars, const std::string& title,
                            std::optional<std::pair<std::string, double>> reference = std::nullopt) {
  double lo = 0, hi = 0;
  for (const auto& b : bars) {
    lo = std::min(lo, b.value - b.error);
    hi = std::max(hi, b.value + b.error);
  }
  if (reference) hi = std::max(hi, reference->second);
  const auto [plo, phi] = detail::padded(lo, hi);
  detail::Frame fr{std::max(300.0, 90.0 * static_cast<double>(bars.size()) + 90), 400};
  fr.lo = std::min(0.0, plo);
  fr.hi = phi;
  std::string s = detail::open(fr, title);
  const double slot = fr.plot_w() / static_cast<double>(std::max<std::size_t>(1, bars.size()));
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    const double cx = fr.left + slot * (static_cast<double>(i) + 0.5), w = slot * 0.6;
    const double y0 = fr.y(0), y1 = fr.y(b.value);
    s += "<rect x=\"" + detail::f(cx - w / 2) + "\" y=\"" + detail::f(std::min(y0, y1)) + "\" width=\"" + detail::f(w) +
         "\" height=\"" + detail::f(std::abs(y0 - y1)) + "\" fill=\"#6baed6\"/>\n";
    if (b.error > 0)
      s += "<line x1=\"" + detail::f(cx) + "\" x2=\"" + detail::f(cx) + "\" y1=\"" + detail::f(fr.y(b.value - b.error)) +
           "\" y2=\"" + detail::f(fr.y(b.value + b.error)) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + detail::f(cx) + "\" y=\"" + detail::f(fr.height - fr.bottom + 18) +
         "\" text-anchor=\"middle\">" + detail::escape(b.label) + "</text>\n";
  }
  if (reference) {
    const double y = fr.y(reference->second);
    s += "<line x1=\"" + detail::f(fr.left) + "\" x2=\"" + detail::f(fr.width - fr.right) + "\" y1=\"" + detail::f(y) +
         "\" y2=\"" + detail::f(y) + "\" stroke=\"#d62728\" stroke-dasharray=\"6,4\"/>\n";
    s += "<text x=\"" + detail::f(fr.width - fr.right) + "\" y=\"" + detail::f(y - 4) + "\" text-anchor=\"end\">" +
         detail::escape(reference->first) + "</text>\n";
  }
  return s + "</svg>\n";
}

}  // namespace svg
}  // namespace centaur::analysis
