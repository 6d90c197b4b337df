// Copyright 2026 The artlang Authors. All Rights Reserved.
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
// =============================================================================
#include "artlang/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Dense>

namespace artlang {

std::optional<QuadraticFit> FitQuadratic(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) return std::nullopt;
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    a(i, 0) = xi * xi;
    a(i, 1) = xi;
    a(i, 2) = 1.0;
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 3) return std::nullopt;
  const Eigen::Vector3d coef = qr.solve(b);
  return QuadraticFit{coef(0), coef(1), coef(2)};
}

namespace {

std::string Escape(const std::string& s) {
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

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string RenderScatterSvg(std::span<const ScatterPanel> panels, const ScatterOptions& o) {
  const int margin_l = 55, margin_r = 15, margin_t = 30, margin_b = 45;
  const int legend_h = 22;
  const int w = o.panel_width, h = o.panel_height;
  const int total_w = w * static_cast<int>(std::max<std::size_t>(panels.size(), 1));
  const int total_h = h + legend_h;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total_w << "\" height=\"" << total_h
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double pw = w - margin_l - margin_r, ph = h - margin_t - margin_b;
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& panel = panels[p];
    const double ox = static_cast<double>(p) * w + margin_l, oy = margin_t;
    auto sx = [&](double x) { return ox + (x - o.x_min) / (o.x_max - o.x_min) * pw; };
    auto sy = [&](double y) { return oy + ph - (y - o.y_min) / (o.y_max - o.y_min) * ph; };
    svg << "<text x=\"" << ox + pw / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
        << Escape(panel.title) << "</text>\n";
    svg << "<rect x=\"" << ox << "\" y=\"" << oy << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double fx = o.x_min + (o.x_max - o.x_min) * t / 4.0;
      const double fy = o.y_min + (o.y_max - o.y_min) * t / 4.0;
      svg << "<line x1=\"" << sx(fx) << "\" y1=\"" << oy + ph << "\" x2=\"" << sx(fx) << "\" y2=\"" << oy + ph + 4
          << "\" stroke=\"black\"/>";
      svg << "<text x=\"" << sx(fx) << "\" y=\"" << oy + ph + 16 << "\" text-anchor=\"middle\">" << Num(fx)
          << "</text>\n";
      svg << "<line x1=\"" << ox - 4 << "\" y1=\"" << sy(fy) << "\" x2=\"" << ox << "\" y2=\"" << sy(fy)
          << "\" stroke=\"black\"/>";
      svg << "<text x=\"" << ox - 6 << "\" y=\"" << sy(fy) + 4 << "\" text-anchor=\"end\">" << Num(fy)
          << "</text>\n";
    }
    svg << "<text x=\"" << ox + pw / 2 << "\" y=\"" << oy + ph + 34 << "\" text-anchor=\"middle\">"
        << Escape(o.x_label) << "</text>\n";
    svg << "<text transform=\"translate(" << ox - 40 << "," << oy + ph / 2
        << ") rotate(-90)\" text-anchor=\"middle\">" << Escape(o.y_label) << "</text>\n";
    for (const auto& s : panel.series) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        svg << "<circle cx=\"" << sx(s.x[i]) << "\" cy=\"" << sy(s.y[i]) << "\" r=\"3\" fill=\"" << s.color
            << "\" fill-opacity=\"0.7\"/>\n";
      }
    }
    if (panel.curve) {
      svg << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
      for (int i = 0; i <= 100; ++i) {
        const double x = o.x_min + (o.x_max - o.x_min) * i / 100.0;
        const double y = std::clamp(panel.curve->Eval(x), o.y_min, o.y_max);
        svg << sx(x) << "," << sy(y) << " ";
      }
      svg << "\"/>\n";
    }
    double lx = ox;
    for (const auto& s : panel.series) {
      svg << "<circle cx=\"" << lx + 5 << "\" cy=\"" << h + 8 << "\" r=\"4\" fill=\"" << s.color << "\"/>";
      svg << "<text x=\"" << lx + 12 << "\" y=\"" << h + 12 << "\">" << Escape(s.label) << "</text>\n";
      lx += 14 + 7.0 * static_cast<double>(s.label.size()) + 10;
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace artlang
