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
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace artlang {

// Least-squares parabola y = a x^2 + b x + c. Returns nullopt for fewer than
// three points or when the x values do not determine a parabola.
struct QuadraticFit {
  double a = 0.0, b = 0.0, c = 0.0;
  double Eval(double x) const { return (a * x + b) * x + c; }
};
std::optional<QuadraticFit> FitQuadratic(std::span<const double> x, std::span<const double> y);

struct ScatterSeries {
  std::string label;
  std::string color;  // any SVG color
  std::vector<double> x;
  std::vector<double> y;
};

struct ScatterPanel {
  std::string title;
  std::vector<ScatterSeries> series;
  std::optional<QuadraticFit> curve;
};

struct ScatterOptions {
  std::string x_label = "degree";
  std::string y_label = "polarity";
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  int panel_width = 420;
  int panel_height = 380;
};

// Renders side-by-side scatter panels as a standalone SVG document.
std::string RenderScatterSvg(std::span<const ScatterPanel> panels, const ScatterOptions& options = {});

inline constexpr std::array<const char*, 5> kCohortColors{"#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#7f7f7f"};

}  // namespace artlang
