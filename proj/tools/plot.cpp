// Copyright 2026 The HBAC Toolkit Authors
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

#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace hbac::plot {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
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

// Comments must not contain "--".
std::string comment_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '-' && !out.empty() && out.back() == '-') out += ' ';
    out += c;
  }
  return out;
}

const char* colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

// Round step for about five ticks over [lo, hi].
double tick_step(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 2.5, 5.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

struct Frame {
  double left = 70, right = 20, top = 40, bottom = 60;
  double width = 0, height = 0;
  double lo = 0, hi = 1;

  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
  double y(double v) const { return top + plot_h() * (hi - v) / (hi - lo); }
};

void header(std::ostringstream& out, const Frame& f, const std::vector<std::string>& comments,
            const std::string& title) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  for (const auto& c : comments) out << "<!-- " << comment_text(c) << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(f.width) << "\" height=\""
      << num(f.height) << "\" viewBox=\"0 0 " << num(f.width) << ' ' << num(f.height)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(f.width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";
}

void y_axis(std::ostringstream& out, const Frame& f, const std::string& label) {
  const double step = tick_step(f.lo, f.hi);
  for (double v = std::ceil(f.lo / step) * step; v <= f.hi + 1e-12; v += step) {
    const double y = f.y(v);
    out << "<line x1=\"" << num(f.left) << "\" x2=\"" << num(f.width - f.right) << "\" y1=\""
        << num(y) << "\" y2=\"" << num(y) << "\" stroke=\"#e0e0e0\"/>\n";
    out << "<text x=\"" << num(f.left - 6) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\">" << num(std::abs(v) < 1e-12 ? 0.0 : v) << "</text>\n";
  }
  out << "<line x1=\"" << num(f.left) << "\" x2=\"" << num(f.left) << "\" y1=\"" << num(f.top)
      << "\" y2=\"" << num(f.top + f.plot_h()) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << num(f.left) << "\" x2=\"" << num(f.width - f.right) << "\" y1=\""
      << num(f.y(std::max(f.lo, 0.0))) << "\" y2=\"" << num(f.y(std::max(f.lo, 0.0)))
      << "\" stroke=\"black\"/>\n";
  out << "<text transform=\"translate(18 " << num(f.top + f.plot_h() / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(label) << "</text>\n";
}

void legend(std::ostringstream& out, const Frame& f, const std::vector<std::string>& series) {
  double x = f.left;
  const double y = f.height - 18;
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 10) << "\" width=\"12\" height=\"12\" fill=\""
        << colour(i) << "\"/>\n";
    out << "<text x=\"" << num(x + 16) << "\" y=\"" << num(y) << "\">" << escape(series[i])
        << "</text>\n";
    x += 24 + 8.0 * double(series[i].size()) + 20;
  }
}

}  // namespace

std::string grouped_bar_svg(const BarChart& chart) {
  if (chart.groups.empty() || chart.series.empty()) {
    throw std::invalid_argument("bar chart needs at least one group and one series");
  }
  const std::size_t k = chart.series.size();
  double lo = 0.0, hi = 0.0;
  for (const auto& g : chart.groups) {
    if (g.ideal.size() != k || g.model.size() != k || g.observed.size() != k ||
        g.uncertainty.size() != k) {
      throw std::invalid_argument("bar group does not match the series count");
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (double v : {g.ideal[i], g.model[i], g.observed[i] + g.uncertainty[i],
                       g.observed[i] - g.uncertainty[i]}) {
        if (std::isfinite(v)) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
    }
  }
  if (hi <= lo) hi = lo + 1.0;

  const double bar_w = 18.0, gap = 30.0;
  const double group_w = double(k) * bar_w;
  Frame f;
  f.width = f.left + f.right + double(chart.groups.size()) * (group_w + gap) + gap;
  f.height = 380;
  f.lo = lo;
  f.hi = hi * 1.1;

  std::ostringstream out;
  header(out, f, chart.comments, chart.title);
  y_axis(out, f, chart.y_label);

  const double base = f.y(std::max(f.lo, 0.0));
  for (std::size_t gi = 0; gi < chart.groups.size(); ++gi) {
    const auto& g = chart.groups[gi];
    const double x0 = f.left + gap + double(gi) * (group_w + gap);
    for (std::size_t i = 0; i < k; ++i) {
      const double x = x0 + double(i) * bar_w;
      auto bar = [&](double v, const std::string& style) {
        const double y = f.y(v);
        out << "<rect x=\"" << num(x + 2) << "\" y=\"" << num(std::min(y, base)) << "\" width=\""
            << num(bar_w - 4) << "\" height=\"" << num(std::abs(base - y)) << "\" " << style
            << "/>\n";
      };
      if (std::isfinite(g.model[i])) {
        bar(g.model[i], std::string("fill=\"") + colour(i) + "\" fill-opacity=\"0.45\"");
      }
      if (std::isfinite(g.ideal[i])) {
        bar(g.ideal[i], std::string("fill=\"none\" stroke=\"") + colour(i) + "\" stroke-width=\"1.5\"");
      }
      if (std::isfinite(g.observed[i])) {
        const double u = std::isfinite(g.uncertainty[i]) ? g.uncertainty[i] : 0.0;
        const double top = f.y(g.observed[i] + u), bottom = f.y(g.observed[i] - u);
        out << "<rect x=\"" << num(x) << "\" y=\"" << num(top) << "\" width=\"" << num(bar_w)
            << "\" height=\"" << num(std::max(bottom - top, 1.5)) << "\" fill=\"" << colour(i)
            << "\" fill-opacity=\"0.9\"/>\n";
      }
    }
    out << "<text x=\"" << num(x0 + group_w / 2) << "\" y=\"" << num(f.top + f.plot_h() + 18)
        << "\" text-anchor=\"middle\">" << escape(g.label) << "</text>\n";
  }
  legend(out, f, chart.series);
  out << "<text x=\"" << num(f.width - f.right) << "\" y=\"" << num(f.height - 18)
      << "\" text-anchor=\"end\" fill=\"#555\">outline: ideal, fill: model, band: measured</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string line_svg(const LineChart& chart) {
  if (chart.x.size() < 2 || chart.y.empty()) {
    throw std::invalid_argument("line chart needs two points and one series");
  }
  double lo = 0.0, hi = 0.0;
  for (const auto& s : chart.y) {
    if (s.size() != chart.x.size()) throw std::invalid_argument("series length mismatch");
    for (double v : s) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (hi <= lo) hi = lo + 1.0;
  const double x_lo = chart.x.front(), x_hi = chart.x.back();
  if (!(x_hi > x_lo)) throw std::invalid_argument("x values must increase");

  Frame f;
  f.width = 640;
  f.height = 400;
  f.lo = lo;
  f.hi = hi * 1.05;
  auto px = [&](double x) { return f.left + f.plot_w() * (x - x_lo) / (x_hi - x_lo); };

  std::ostringstream out;
  header(out, f, chart.comments, chart.title);
  y_axis(out, f, chart.y_label);
  const double step = tick_step(x_lo, x_hi);
  for (double x = std::ceil(x_lo / step) * step; x <= x_hi + 1e-12 * std::abs(x_hi); x += step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    out << "<text x=\"" << num(px(x)) << "\" y=\"" << num(f.top + f.plot_h() + 16)
        << "\" text-anchor=\"middle\">" << buf << "</text>\n";
  }
  out << "<text x=\"" << num(f.left + f.plot_w() / 2) << "\" y=\"" << num(f.height - 30)
      << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n";

  for (std::size_t s = 0; s < chart.y.size(); ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << colour(s) << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < chart.x.size(); ++i) {
      if (!std::isfinite(chart.y[s][i])) continue;
      out << num(px(chart.x[i])) << ',' << num(f.y(chart.y[s][i])) << ' ';
    }
    out << "\"/>\n";
  }
  if (!chart.series.empty()) legend(out, f, chart.series);
  out << "</svg>\n";
  return out.str();
}

}  // namespace hbac::plot
