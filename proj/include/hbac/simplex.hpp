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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hbac {

struct SimplexOptions {
  std::size_t max_evaluations = 10000;
  /// Stop when the spread of simplex values falls below this.
  double ftol = 1e-12;
  /// Restart from the best vertex with a fresh simplex after convergence;
  /// stops once a restart fails to improve.
  bool restart_on_convergence = true;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  double start_value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead minimisation with dimension-adaptive coefficients. `steps`
/// gives the initial simplex edge along each coordinate. The returned value
/// is never above f(x0).
SimplexResult nelder_mead(const Objective& f, std::vector<double> x0,
                          std::span<const double> steps, const SimplexOptions& opts);

}  // namespace hbac
