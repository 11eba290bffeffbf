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

#pragma once

// Static SVG views of the tables the CLI writes.

#include <string>
#include <vector>

namespace hbac::plot {

struct BarGroup {
  std::string label;
  std::vector<double> ideal;
  std::vector<double> model;
  /// NaN where nothing was measured.
  std::vector<double> observed;
  std::vector<double> uncertainty;
};

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> series;
  std::vector<BarGroup> groups;
  std::vector<std::string> comments;
};

/// Grouped bars per step: outlined bars for the ideal values, filled bars for
/// the model and a shaded band of +/- uncertainty around each observation.
std::string grouped_bar_svg(const BarChart& chart);

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<std::vector<double>> y;
  std::vector<std::string> series;
  std::vector<std::string> comments;
};

std::string line_svg(const LineChart& chart);

}  // namespace hbac::plot
