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

#include "hbac/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hbac {

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

class Search {
 public:
  Search(const Objective& f, const SimplexOptions& opts) : f_(f), opts_(opts) {}

  double eval(std::span<const double> x) {
    ++evals_;
    const double v = f_(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  }
  bool exhausted() const { return evals_ >= opts_.max_evaluations; }
  std::size_t evals() const { return evals_; }

  // One simplex descent from `start`; returns the best vertex and whether the
  // value spread converged.
  std::pair<Vertex, bool> descend(const Vertex& start, std::span<const double> steps) {
    const std::size_t n = start.x.size();
    const double dn = double(n);
    // Gao & Han adaptive parameters
    const double alpha = 1.0;
    const double beta = 1.0 + 2.0 / dn;
    const double gamma = 0.75 - 1.0 / (2.0 * dn);
    const double delta = 1.0 - 1.0 / dn;

    std::vector<Vertex> simplex;
    simplex.reserve(n + 1);
    simplex.push_back(start);
    for (std::size_t i = 0; i < n && !exhausted(); ++i) {
      Vertex v = start;
      v.x[i] += steps[i];
      v.f = eval(v.x);
      simplex.push_back(std::move(v));
    }
    if (simplex.size() < n + 1) {
      return {*std::min_element(simplex.begin(), simplex.end(),
                                [](const Vertex& a, const Vertex& b) { return a.f < b.f; }),
              false};
    }

    std::vector<double> centroid(n), trial(n);
    auto blend = [&](double t, const std::vector<double>& toward) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = centroid[i] + t * (toward[i] - centroid[i]);
    };
    auto order = [&] {
      std::stable_sort(simplex.begin(), simplex.end(),
                       [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    };

    bool converged = false;
    while (!exhausted()) {
      order();
      if (std::abs(simplex.back().f - simplex.front().f) <= opts_.ftol) {
        converged = true;
        break;
      }
      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k].x[i];
      }
      for (auto& c : centroid) c /= dn;

      Vertex& worst = simplex.back();
      blend(-alpha, worst.x);
      const double fr = eval(trial);
      if (fr < simplex.front().f) {
        std::vector<double> reflected = trial;
        blend(-alpha * beta, worst.x);
        const double fe = eval(trial);
        if (fe < fr) {
          worst = {trial, fe};
        } else {
          worst = {std::move(reflected), fr};
        }
        continue;
      }
      if (fr < simplex[n - 1].f) {
        worst = {trial, fr};
        continue;
      }
      // contraction, outside or inside
      const bool outside = fr < worst.f;
      blend(outside ? -alpha * gamma : gamma, worst.x);
      const double fc = eval(trial);
      if (fc <= (outside ? fr : worst.f)) {
        worst = {trial, fc};
        continue;
      }
      // shrink toward the best vertex
      for (std::size_t k = 1; k <= n && !exhausted(); ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          simplex[k].x[i] = simplex[0].x[i] + delta * (simplex[k].x[i] - simplex[0].x[i]);
        }
        simplex[k].f = eval(simplex[k].x);
      }
    }
    order();
    return {simplex.front(), converged};
  }

 private:
  const Objective& f_;
  const SimplexOptions& opts_;
  std::size_t evals_ = 0;
};

}  // namespace

SimplexResult nelder_mead(const Objective& f, std::vector<double> x0,
                          std::span<const double> steps, const SimplexOptions& opts) {
  if (x0.empty() || steps.size() != x0.size()) {
    throw std::invalid_argument("simplex needs matching start point and steps");
  }
  if (opts.max_evaluations == 0) throw std::invalid_argument("evaluation budget must be positive");

  Search search(f, opts);
  Vertex best{std::move(x0), 0.0};
  best.f = search.eval(best.x);

  SimplexResult result;
  result.start_value = best.f;
  std::vector<double> scaled(steps.begin(), steps.end());
  while (!search.exhausted()) {
    auto [found, converged] = search.descend(best, scaled);
    const bool improved = found.f < best.f - opts.ftol;
    if (found.f < best.f) best = std::move(found);
    result.converged = converged;
    if (!converged || !opts.restart_on_convergence || !improved) break;
  }
  result.x = std::move(best.x);
  result.value = best.f;
  result.evaluations = search.evals();
  return result;
}

}  // namespace hbac
