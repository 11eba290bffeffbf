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

#include "hbac/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "hbac/simplex.hpp"

namespace hbac::pulse {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinSegment = 1e-6;  // ms

using cooling::DiagonalState;
using cooling::Permutation;

// Search-space layout per segment: amplitude, phase, duration[, offset].
struct Layout {
  std::size_t segments;
  bool offsets;

  std::size_t stride() const { return offsets ? 4 : 3; }
  std::size_t size() const { return segments * stride(); }

  SegmentedPulse decode(std::span<const double> x) const {
    std::vector<PulseSegment> segs(segments);
    for (std::size_t k = 0; k < segments; ++k) {
      const double* p = x.data() + k * stride();
      segs[k].amplitude_khz = std::abs(p[0]);
      segs[k].phase_rad = std::remainder(p[1], kTwoPi);
      segs[k].duration_ms = std::max(std::abs(p[2]), kMinSegment);
      segs[k].offset_khz = offsets ? p[3] : 0.0;
    }
    return SegmentedPulse(std::move(segs));
  }

  std::vector<double> encode(const SegmentedPulse& pulse) const {
    std::vector<double> x(size());
    for (std::size_t k = 0; k < segments; ++k) {
      const auto& s = pulse.segments()[k];
      double* p = x.data() + k * stride();
      p[0] = s.amplitude_khz;
      p[1] = s.phase_rad;
      p[2] = s.duration_ms;
      if (offsets) p[3] = s.offset_khz;
    }
    return x;
  }
};

double penalty(const SegmentedPulse& pulse, const OptimizationConfig& cfg, double floor) {
  double p = 0.0;
  if (floor > 0.0) {
    const double gap = std::max(0.0, floor - pulse.mean_amplitude()) / floor;
    p += cfg.amplitude_penalty * gap * gap;
  }
  const double excess = std::max(0.0, pulse.duration() - cfg.max_duration_ms);
  p += cfg.duration_penalty * excess / cfg.max_duration_ms;
  return p;
}

void validate(const OptimizationConfig& cfg) {
  if (cfg.budget == 0 || cfg.restarts == 0 || cfg.segments == 0) {
    throw std::invalid_argument("optimizer budget, restarts and segments must be positive");
  }
  if (!(cfg.max_duration_ms > 0.0) || !(cfg.min_start_duration_ms > 0.0) ||
      cfg.max_start_duration_ms < cfg.min_start_duration_ms) {
    throw std::invalid_argument("invalid duration bounds");
  }
  if (cfg.amplitude_penalty < 0.0 || cfg.duration_penalty < 0.0) {
    throw std::invalid_argument("penalty weights must be nonnegative");
  }
}

double floor_for(const PulseSimulator& sim, const OptimizationConfig& cfg) {
  return cfg.amplitude_floor_khz < 0.0 ? sim.internal_norm() : cfg.amplitude_floor_khz;
}

OptimizationResult finish(const Layout& layout, const SimplexResult& sr,
                          const PulseSimulator& sim, const Matrix& target,
                          const RFDistribution& dist, const OptimizationConfig& cfg) {
  OptimizationResult out;
  out.pulse = layout.decode(sr.x);
  const auto report = gate_fidelity_report(sim, out.pulse, target, dist);
  out.fidelity = report.mean;
  out.worst_fidelity = report.worst;
  out.objective = -sr.value;
  out.start_objective = -sr.start_value;
  out.evaluations = sr.evaluations;
  out.reached_floor = out.fidelity >= cfg.fidelity_floor;
  return out;
}

}  // namespace

SegmentedPulse::SegmentedPulse(std::vector<PulseSegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("pulse has no segments");
  for (const auto& s : segments_) {
    if (!(s.duration_ms > 0.0)) throw std::invalid_argument("segment duration must be positive");
    if (!(s.amplitude_khz >= 0.0)) throw std::invalid_argument("segment amplitude must be nonnegative");
    if (!std::isfinite(s.phase_rad) || !std::isfinite(s.offset_khz)) {
      throw std::invalid_argument("segment phase and offset must be finite");
    }
  }
}

double SegmentedPulse::duration() const {
  double t = 0.0;
  for (const auto& s : segments_) t += s.duration_ms;
  return t;
}

double SegmentedPulse::mean_amplitude() const {
  double acc = 0.0;
  for (const auto& s : segments_) acc += s.amplitude_khz * s.duration_ms;
  return acc / duration();
}

bool operator==(const SegmentedPulse& a, const SegmentedPulse& b) {
  return std::equal(a.segments_.begin(), a.segments_.end(), b.segments_.begin(),
                    b.segments_.end(), [](const PulseSegment& x, const PulseSegment& y) {
                      return x.duration_ms == y.duration_ms &&
                             x.amplitude_khz == y.amplitude_khz &&
                             x.phase_rad == y.phase_rad && x.offset_khz == y.offset_khz;
                    });
}

RFDistribution::RFDistribution(std::vector<RFPoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("RF distribution is empty");
  double total = 0.0;
  for (const auto& p : points_) {
    if (!(p.weight >= 0.0) || !std::isfinite(p.scale)) {
      throw std::invalid_argument("RF weights must be nonnegative");
    }
    total += p.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("RF weights must sum to 1");
}

RFDistribution RFDistribution::gaussian(std::size_t points, double sigma) {
  if (points == 0 || !(sigma >= 0.0)) throw std::invalid_argument("invalid RF distribution");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (std::size_t k = 1; k < points; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(double(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  std::vector<RFPoint> out(points);
  double total = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    out[i] = {1.0 + sigma * eig.eigenvalues()(i), v0 * v0};
    total += out[i].weight;
  }
  for (auto& p : out) p.weight /= total;
  return RFDistribution(std::move(out));
}

PulseSimulator::PulseSimulator(const spin::SpinSystem& sys)
    : h0_(spin::register_hamiltonian(sys)) {
  const auto m = sys.size();
  const auto dim = Eigen::Index(sys.dimension());
  ix_ = iy_ = iz_ = Matrix::Zero(dim, dim);
  for (std::size_t i = 1; i <= m; ++i) {
    ix_ += 0.5 * spin::pauli(i, spin::Axis::X, m);
    iy_ += 0.5 * spin::pauli(i, spin::Axis::Y, m);
    iz_ += 0.5 * spin::pauli(i, spin::Axis::Z, m);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h0_, Eigen::EigenvaluesOnly);
  internal_norm_ = eig.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix PulseSimulator::propagator(const SegmentedPulse& pulse, double rf_scale) const {
  const auto dim = h0_.rows();
  Matrix u = Matrix::Identity(dim, dim);
  Matrix h(dim, dim);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(dim);
  Eigen::VectorXcd phases(dim);
  for (const auto& s : pulse.segments()) {
    const double a = rf_scale * s.amplitude_khz;
    h = h0_ + (a * std::cos(s.phase_rad)) * ix_ + (a * std::sin(s.phase_rad)) * iy_ -
        s.offset_khz * iz_;
    eig.compute(h);
    for (Eigen::Index i = 0; i < dim; ++i) {
      phases(i) = std::polar(1.0, -kTwoPi * eig.eigenvalues()(i) * s.duration_ms);
    }
    const Matrix& v = eig.eigenvectors();
    u = (v * phases.asDiagonal() * v.adjoint() * u).eval();
  }
  return u;
}

Matrix pulse_propagator(const spin::SpinSystem& sys, const SegmentedPulse& pulse,
                        double rf_scale) {
  return PulseSimulator(sys).propagator(pulse, rf_scale);
}

Matrix permutation_unitary(const Permutation& perm) {
  const auto dim = Eigen::Index(perm.size());
  Matrix u = Matrix::Zero(dim, dim);
  for (std::size_t b = 0; b < perm.size(); ++b) u(perm(b), Eigen::Index(b)) = 1.0;
  return u;
}

double entanglement_fidelity(const Matrix& target, const Matrix& u) {
  if (target.rows() != u.rows() || target.cols() != u.cols() || u.rows() != u.cols()) {
    throw std::invalid_argument("target and propagator dimensions differ");
  }
  const double d = double(u.rows());
  const double f = std::norm((target.adjoint() * u).trace()) / (d * d);
  return std::clamp(f, 0.0, 1.0);
}

FidelityReport gate_fidelity_report(const PulseSimulator& sim, const SegmentedPulse& pulse,
                                    const Matrix& target, const RFDistribution& dist) {
  if (std::size_t(target.rows()) != sim.dimension()) {
    throw std::invalid_argument("target dimension does not match the register");
  }
  FidelityReport r{0.0, 1.0};
  for (const auto& p : dist.points()) {
    const double f = entanglement_fidelity(target, sim.propagator(pulse, p.scale));
    r.mean += p.weight * f;
    r.worst = std::min(r.worst, f);
  }
  r.mean = std::clamp(r.mean, 0.0, 1.0);
  return r;
}

double gate_fidelity(const spin::SpinSystem& sys, const SegmentedPulse& pulse,
                     const Matrix& target, const RFDistribution& dist) {
  return gate_fidelity_report(PulseSimulator(sys), pulse, target, dist).mean;
}

double population_overlap(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("population vectors differ in size");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += std::sqrt(std::max(p[i], 0.0) * std::max(q[i], 0.0));
  }
  return std::clamp(acc * acc, 0.0, 1.0);
}

FidelityReport state_fidelity_report(const PulseSimulator& sim, const SegmentedPulse& pulse,
                                     std::span<const DiagonalState> inputs,
                                     const Permutation& target, const RFDistribution& dist) {
  if (inputs.empty()) throw std::invalid_argument("state fidelity needs input states");
  const auto dim = sim.dimension();
  if (target.size() != dim) throw std::invalid_argument("permutation does not match the register");
  for (const auto& s : inputs) {
    if (s.size() != dim) throw std::invalid_argument("input state does not match the register");
  }
  FidelityReport r{0.0, 1.0};
  std::vector<double> evolved(dim);
  for (const auto& p : dist.points()) {
    // |U_ab|^2 maps diagonal populations to diagonal populations
    const Eigen::MatrixXd transfer = sim.propagator(pulse, p.scale).cwiseAbs2();
    double mean = 0.0;
    for (const auto& in : inputs) {
      const Eigen::Map<const Eigen::VectorXd> rho(in.probs().data(), Eigen::Index(dim));
      Eigen::Map<Eigen::VectorXd>(evolved.data(), Eigen::Index(dim)) = transfer * rho;
      const auto want = cooling::apply_permutation(in, target);
      mean += population_overlap(evolved, want.probs());
    }
    mean /= double(inputs.size());
    r.mean += p.weight * mean;
    r.worst = std::min(r.worst, mean);
  }
  r.mean = std::clamp(r.mean, 0.0, 1.0);
  return r;
}

double state_fidelity(const spin::SpinSystem& sys, const SegmentedPulse& pulse,
                      std::span<const DiagonalState> inputs, const Permutation& target,
                      const RFDistribution& dist) {
  return state_fidelity_report(PulseSimulator(sys), pulse, inputs, target, dist).mean;
}

OptimizationResult optimize_pulse(const spin::SpinSystem& sys, const Matrix& target,
                                  const OptimizationConfig& cfg, const RFDistribution& dist) {
  validate(cfg);
  const PulseSimulator sim(sys);
  if (std::size_t(target.rows()) != sim.dimension() || target.rows() != target.cols()) {
    throw std::invalid_argument("target dimension does not match the register");
  }
  const double floor = floor_for(sim, cfg);
  const Layout layout{cfg.segments, cfg.optimize_offsets};
  const double amp_scale = floor > 0.0 ? floor : 1.0;

  // Start points and step sizes are drawn up front from one generator so the
  // result does not depend on how restarts are scheduled.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> starts(cfg.restarts);
  for (auto& x : starts) {
    x.assign(layout.size(), 0.0);
    const double total = cfg.min_start_duration_ms +
                         unit(rng) * (cfg.max_start_duration_ms - cfg.min_start_duration_ms);
    std::vector<double> share(cfg.segments);
    double share_sum = 0.0;
    for (auto& s : share) share_sum += (s = 0.5 + unit(rng));
    for (std::size_t k = 0; k < cfg.segments; ++k) {
      double* p = x.data() + k * layout.stride();
      p[0] = amp_scale * (1.0 + 1.5 * unit(rng));
      p[1] = kTwoPi * unit(rng);
      p[2] = total * share[k] / share_sum;
      if (layout.offsets) p[3] = amp_scale * (2.0 * unit(rng) - 1.0);
    }
  }
  const double mean_dwell = 0.5 * (cfg.min_start_duration_ms + cfg.max_start_duration_ms) /
                            double(cfg.segments);
  std::vector<double> steps(layout.size());
  for (std::size_t k = 0; k < cfg.segments; ++k) {
    double* s = steps.data() + k * layout.stride();
    s[0] = 0.3 * amp_scale;
    s[1] = 0.6;
    s[2] = 0.3 * mean_dwell;
    if (layout.offsets) s[3] = 0.3 * amp_scale;
  }

  const Objective objective = [&](std::span<const double> x) {
    const auto pulse = layout.decode(x);
    return -(gate_fidelity_report(sim, pulse, target, dist).mean - penalty(pulse, cfg, floor));
  };
  SimplexOptions opts;
  opts.max_evaluations = cfg.budget;
  opts.ftol = cfg.tolerance;

  std::vector<SimplexResult> results(cfg.restarts);
  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, cfg.restarts);
  {
    std::vector<std::future<void>> workers;
    for (std::size_t w = 0; w < threads; ++w) {
      workers.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t r = w; r < cfg.restarts; r += threads) {
          results[r] = nelder_mead(objective, starts[r], steps, opts);
        }
      }));
    }
    for (auto& f : workers) f.get();
  }

  // lowest objective wins; ties resolve to the earliest restart
  std::size_t best = 0;
  std::size_t evaluations = 0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    evaluations += results[r].evaluations;
    if (results[r].value < results[best].value) best = r;
  }
  auto out = finish(layout, results[best], sim, target, dist, cfg);
  out.evaluations = evaluations;
  return out;
}

OptimizationResult optimize_pulse(const spin::SpinSystem& sys, const Permutation& target,
                                  const OptimizationConfig& cfg, const RFDistribution& dist) {
  return optimize_pulse(sys, permutation_unitary(target), cfg, dist);
}

OptimizationResult refine_for_states(const spin::SpinSystem& sys, const SegmentedPulse& start,
                                     std::span<const DiagonalState> inputs,
                                     const Permutation& target, const OptimizationConfig& cfg,
                                     const RFDistribution& dist) {
  validate(cfg);
  const PulseSimulator sim(sys);
  if (inputs.empty()) throw std::invalid_argument("state refinement needs input states");
  const double floor = floor_for(sim, cfg);
  const Layout layout{start.size(), true};
  const auto x0 = layout.encode(start);
  std::vector<double> steps(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    steps[i] = 0.05 * std::max(std::abs(x0[i]), 0.1);
  }

  const Objective objective = [&](std::span<const double> x) {
    const auto pulse = layout.decode(x);
    return -(state_fidelity_report(sim, pulse, inputs, target, dist).mean -
             penalty(pulse, cfg, floor));
  };
  SimplexOptions opts;
  opts.max_evaluations = cfg.budget;
  opts.ftol = cfg.tolerance;
  const auto sr = nelder_mead(objective, x0, steps, opts);

  OptimizationResult out;
  out.pulse = layout.decode(sr.x);
  const auto report = state_fidelity_report(sim, out.pulse, inputs, target, dist);
  out.fidelity = report.mean;
  out.worst_fidelity = report.worst;
  out.objective = -sr.value;
  out.start_objective = -sr.start_value;
  out.evaluations = sr.evaluations;
  out.reached_floor = out.fidelity >= cfg.fidelity_floor;
  return out;
}

}  // namespace hbac::pulse
