// Copyright 2026 The ouage Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OUAGE_SVG_HPP
#define OUAGE_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ouage/experiments.hpp"

namespace ouage::svg {

struct Series {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct ChartLayout {
  int width = 720;
  int height = 480;
  int margin_left = 70;
  int margin_right = 170;
  int margin_top = 40;
  int margin_bottom = 55;
  int ticks = 5;
};

namespace detail {

inline std::string num(double x, const char* fmt = "%.4g") {
  char buf[32];
  std::snprintf(buf, sizeof buf, fmt, x);
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

}  // namespace detail

/// Static line chart with linear axes and a legend on the right.
inline void write_line_chart(std::ostream& out, const std::vector<Series>& series, const std::string& title,
                             const std::string& x_label, const std::string& y_label, const ChartLayout& layout = {}) {
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  for (const auto& s : series) {
    if (s.xs.size() != s.ys.size()) {
      throw std::invalid_argument("svg: series '" + s.label + "' has mismatched x/y lengths");
    }
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      x_lo = std::min(x_lo, s.xs[i]);
      x_hi = std::max(x_hi, s.xs[i]);
      y_lo = std::min(y_lo, s.ys[i]);
      y_hi = std::max(y_hi, s.ys[i]);
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = y_lo = 0.0;
    x_hi = y_hi = 1.0;
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_hi = y_lo + 1.0;
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  const double plot_w = layout.width - layout.margin_left - layout.margin_right;
  const double plot_h = layout.height - layout.margin_top - layout.margin_bottom;
  auto px = [&](double x) { return layout.margin_left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return layout.margin_top + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << layout.width << "\" height=\"" << layout.height
      << "\" viewBox=\"0 0 " << layout.width << ' ' << layout.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << layout.margin_left + plot_w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::escape(title) << "</text>\n";
  out << "<rect x=\"" << layout.margin_left << "\" y=\"" << layout.margin_top << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= layout.ticks; ++i) {
    const double fx = x_lo + (x_hi - x_lo) * i / layout.ticks;
    const double fy = y_lo + (y_hi - y_lo) * i / layout.ticks;
    const double tx = px(fx);
    const double ty = py(fy);
    const double bottom = layout.margin_top + plot_h;
    out << "<line x1=\"" << detail::num(tx) << "\" y1=\"" << bottom << "\" x2=\"" << detail::num(tx) << "\" y2=\""
        << bottom + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << detail::num(tx) << "\" y=\"" << bottom + 18 << "\" text-anchor=\"middle\">"
        << detail::num(fx, "%.3g") << "</text>\n";
    out << "<line x1=\"" << layout.margin_left - 5 << "\" y1=\"" << detail::num(ty) << "\" x2=\""
        << layout.margin_left << "\" y2=\"" << detail::num(ty) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << layout.margin_left - 8 << "\" y=\"" << detail::num(ty + 4)
        << "\" text-anchor=\"end\">" << detail::num(fy, "%.3g") << "</text>\n";
  }
  out << "<text x=\"" << layout.margin_left + plot_w / 2 << "\" y=\"" << layout.height - 12
      << "\" text-anchor=\"middle\">" << detail::escape(x_label) << "</text>\n";
  out << "<text transform=\"translate(18," << layout.margin_top + plot_h / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << detail::escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) {
      out << " stroke-dasharray=\"6,4\"";
    }
    out << " points=\"";
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      out << (i ? " " : "") << detail::num(px(s.xs[i]), "%.2f") << ',' << detail::num(py(s.ys[i]), "%.2f");
    }
    out << "\"/>\n";
    const double ly = layout.margin_top + 14 + 20.0 * static_cast<double>(k);
    const double lx = layout.margin_left + plot_w + 12;
    out << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 28 << "\" y2=\"" << ly << "\" stroke=\""
        << s.color << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    out << "<text x=\"" << lx + 34 << "\" y=\"" << ly + 4 << "\">" << detail::escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
}

/// lambda* versus beta: one color per scheme, solid for the smallest
/// epsilon and dashed for the rest.
[[nodiscard]] inline std::vector<Series> beta_sweep_series(const std::vector<BetaCurve>& curves) {
  std::set<double> eps;
  std::set<double> thetas;
  for (const auto& c : curves) {
    eps.insert(c.epsilon);
    thetas.insert(c.theta);
  }
  std::vector<Series> out;
  for (const auto& c : curves) {
    Series s;
    s.label = std::string(to_string(c.scheme)) + ", eps=" + detail::num(c.epsilon, "%g");
    if (thetas.size() > 1) {
      s.label += ", theta=" + detail::num(c.theta, "%g");
    }
    s.xs = c.betas;
    s.ys = c.lambdas;
    s.color = c.scheme == Scheme::iir ? "#1f77b4" : "#d62728";
    s.dashed = !eps.empty() && c.epsilon != *eps.begin();
    out.push_back(std::move(s));
  }
  return out;
}

inline void write_beta_sweep_chart(std::ostream& out, const std::vector<BetaCurve>& curves,
                                   const std::string& title = "Optimal average MMSE versus processing time") {
  write_line_chart(out, beta_sweep_series(curves), title, "beta", "lambda*");
}

}  // namespace ouage::svg

#endif  // OUAGE_SVG_HPP
