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

// Strongly-modulating pulse design: piecewise-constant RF waveforms on a
// homonuclear register, scored over a discrete RF-amplitude distribution and
// searched with a multi-start Nelder-Mead simplex.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hbac/cooling.hpp"
#include "hbac/spin.hpp"

namespace hbac::pulse {

using spin::Matrix;

struct PulseSegment {
  double duration_ms = 0.0;
  double amplitude_khz = 0.0;
  double phase_rad = 0.0;
  double offset_khz = 0.0;
};

class SegmentedPulse {
 public:
  explicit SegmentedPulse(std::vector<PulseSegment> segments);

  const std::vector<PulseSegment>& segments() const noexcept { return segments_; }
  std::size_t size() const noexcept { return segments_.size(); }
  double duration() const;
  /// Duration-weighted mean RF amplitude.
  double mean_amplitude() const;

  friend bool operator==(const SegmentedPulse& a, const SegmentedPulse& b);

 private:
  std::vector<PulseSegment> segments_;
};

struct RFPoint {
  double scale = 1.0;
  double weight = 1.0;
};

class RFDistribution {
 public:
  explicit RFDistribution(std::vector<RFPoint> points);

  /// Gauss-Hermite quadrature of a normal distribution of RF scale centred
  /// on 1 with the given relative standard deviation.
  static RFDistribution gaussian(std::size_t points = 5, double sigma = 0.062);
  static RFDistribution nominal() { return RFDistribution({{1.0, 1.0}}); }

  const std::vector<RFPoint>& points() const noexcept { return points_; }

 private:
  std::vector<RFPoint> points_;
};

struct OptimizationConfig {
  std::size_t segments = 6;
  std::size_t restarts = 12;
  /// Objective evaluations allowed per restart.
  std::size_t budget = 40000;
  std::uint64_t seed = 1;
  double tolerance = 1e-10;
  /// Hinge weight pulling the mean amplitude up to amplitude_floor_khz.
  double amplitude_penalty = 1.0;
  /// Linear weight on total duration beyond max_duration_ms.
  double duration_penalty = 1.0;
  /// Negative selects the spectral norm of the register Hamiltonian.
  double amplitude_floor_khz = -1.0;
  double max_duration_ms = 1.3;
  /// Initial total duration range for random starts.
  double min_start_duration_ms = 0.7;
  double max_start_duration_ms = 1.3;
  bool optimize_offsets = true;
  /// Fidelity below which the result is flagged best-effort.
  double fidelity_floor = 0.99;
  /// 0 selects the hardware concurrency.
  std::size_t threads = 0;
};

/// Precomputed register Hamiltonian and collective RF operators.
class PulseSimulator {
 public:
  explicit PulseSimulator(const spin::SpinSystem& sys);

  Matrix propagator(const SegmentedPulse& pulse, double rf_scale) const;
  std::size_t dimension() const noexcept { return std::size_t(h0_.rows()); }
  /// Largest |eigenvalue| of the register Hamiltonian in kHz.
  double internal_norm() const noexcept { return internal_norm_; }

 private:
  Matrix h0_;
  Matrix ix_, iy_, iz_;
  double internal_norm_ = 0.0;
};

Matrix pulse_propagator(const spin::SpinSystem& sys, const SegmentedPulse& pulse,
                        double rf_scale);

/// Unitary with U|b> = |perm(b)>.
Matrix permutation_unitary(const cooling::Permutation& perm);

/// |Tr(target^dag u)|^2 / d^2.
double entanglement_fidelity(const Matrix& target, const Matrix& u);

struct FidelityReport {
  double mean = 0.0;
  double worst = 0.0;
};

FidelityReport gate_fidelity_report(const PulseSimulator& sim,
                                    const SegmentedPulse& pulse,
                                    const Matrix& target,
                                    const RFDistribution& dist);
double gate_fidelity(const spin::SpinSystem& sys, const SegmentedPulse& pulse,
                     const Matrix& target, const RFDistribution& dist);

/// Classical fidelity (sum_b sqrt(p_b q_b))^2 of two probability vectors.
double population_overlap(std::span<const double> p, std::span<const double> q);

/// Mean over inputs and RF points of the overlap between the populations of
/// U rho U^dag and the permuted input.
FidelityReport state_fidelity_report(const PulseSimulator& sim,
                                     const SegmentedPulse& pulse,
                                     std::span<const cooling::DiagonalState> inputs,
                                     const cooling::Permutation& target,
                                     const RFDistribution& dist);
double state_fidelity(const spin::SpinSystem& sys, const SegmentedPulse& pulse,
                      std::span<const cooling::DiagonalState> inputs,
                      const cooling::Permutation& target,
                      const RFDistribution& dist);

struct OptimizationResult {
  SegmentedPulse pulse{{PulseSegment{1.0, 0.0, 0.0, 0.0}}};
  double fidelity = 0.0;
  double worst_fidelity = 0.0;
  double objective = 0.0;
  double start_objective = 0.0;
  std::size_t evaluations = 0;
  /// False when the search ended below cfg.fidelity_floor.
  bool reached_floor = false;
};

OptimizationResult optimize_pulse(const spin::SpinSystem& sys, const Matrix& target,
                                  const OptimizationConfig& cfg,
                                  const RFDistribution& dist);
OptimizationResult optimize_pulse(const spin::SpinSystem& sys,
                                  const cooling::Permutation& target,
                                  const OptimizationConfig& cfg,
                                  const RFDistribution& dist);

/// State-specific refinement: a single simplex search from `start` scored on
/// state_fidelity over `inputs`. Never returns a lower objective than `start`.
OptimizationResult refine_for_states(const spin::SpinSystem& sys,
                                     const SegmentedPulse& start,
                                     std::span<const cooling::DiagonalState> inputs,
                                     const cooling::Permutation& target,
                                     const OptimizationConfig& cfg,
                                     const RFDistribution& dist);

}  // namespace hbac::pulse
