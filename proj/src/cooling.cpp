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

#include "hbac/cooling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hbac::cooling {

namespace {

constexpr double kNormTolerance = 1e-12;

void check_qubit(std::size_t qubit, std::size_t n) {
  if (qubit < 1 || qubit > n) {
    throw std::out_of_range("qubit index " + std::to_string(qubit) +
                            " outside 1.." + std::to_string(n));
  }
}

}  // namespace

Polarization::Polarization(double value) : value_(value) {
  if (!(std::abs(value) <= 1.0)) {
    throw std::invalid_argument("polarization must lie in [-1, 1], got " +
                                std::to_string(value));
  }
}

BathParameters::BathParameters(Polarization bath, double efficiency)
    : p_bath(bath), eta(efficiency) {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw std::invalid_argument("refresh efficiency must lie in [0, 1]");
  }
}

DiagonalState::DiagonalState(std::size_t n, std::vector<double> probs)
    : n_(n), probs_(std::move(probs)) {
  if (n == 0 || n > kMaxQubits) {
    throw std::invalid_argument("qubit count must lie in 1.." +
                                std::to_string(kMaxQubits));
  }
  if (probs_.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("probability vector length must be 2^n");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("probabilities must lie in [0, 1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw std::invalid_argument("probabilities must sum to 1");
  }
}

DiagonalState DiagonalState::maximally_mixed(std::size_t n) {
  if (n == 0 || n > kMaxQubits) {
    throw std::invalid_argument("invalid qubit count");
  }
  const std::size_t size = std::size_t{1} << n;
  return DiagonalState(n, std::vector<double>(size, 1.0 / double(size)));
}

Permutation::Permutation(std::vector<std::uint32_t> map) : map_(std::move(map)) {
  std::vector<bool> seen(map_.size(), false);
  for (auto image : map_) {
    if (image >= map_.size() || seen[image]) {
      throw std::invalid_argument("permutation map is not a bijection");
    }
    seen[image] = true;
  }
}

Permutation Permutation::identity(std::size_t size) {
  std::vector<std::uint32_t> map(size);
  std::iota(map.begin(), map.end(), 0u);
  return Permutation(std::move(map));
}

Permutation Permutation::inverse() const {
  std::vector<std::uint32_t> inv(map_.size());
  for (std::size_t b = 0; b < map_.size(); ++b) inv[map_[b]] = std::uint32_t(b);
  return Permutation(std::move(inv));
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t b = 0; b < map_.size(); ++b) {
    if (map_[b] != b) return false;
  }
  return true;
}

Permutation compose(const Permutation& first, const Permutation& second) {
  if (first.size() != second.size()) {
    throw std::invalid_argument("cannot compose permutations of different size");
  }
  std::vector<std::uint32_t> map(first.size());
  for (std::size_t b = 0; b < map.size(); ++b) map[b] = second(first(b));
  return Permutation(std::move(map));
}

std::uint32_t qubit_mask(std::size_t qubit, std::size_t n) {
  check_qubit(qubit, n);
  return std::uint32_t{1} << (n - qubit);
}

DiagonalState product_state(std::span<const double> pols) {
  const std::size_t n = pols.size();
  if (n == 0) throw std::invalid_argument("product state needs at least one qubit");
  for (double p : pols) Polarization{p};
  std::vector<double> probs(std::size_t{1} << n, 1.0);
  for (std::size_t b = 0; b < probs.size(); ++b) {
    for (std::size_t q = 1; q <= n; ++q) {
      const double sign = (b & qubit_mask(q, n)) ? -1.0 : 1.0;
      probs[b] *= 0.5 * (1.0 + sign * pols[q - 1]);
    }
  }
  return DiagonalState(n, std::move(probs));
}

DiagonalState product_state(std::initializer_list<double> pols) {
  return product_state(std::span<const double>(pols.begin(), pols.size()));
}

double polarization_of(const DiagonalState& state, std::size_t qubit) {
  const auto mask = qubit_mask(qubit, state.qubits());
  double p = 0.0;
  for (std::size_t b = 0; b < state.size(); ++b) {
    p += (b & mask) ? -state[b] : state[b];
  }
  return p;
}

std::vector<double> polarizations(const DiagonalState& state) {
  std::vector<double> out(state.qubits());
  for (std::size_t q = 1; q <= state.qubits(); ++q) {
    out[q - 1] = polarization_of(state, q);
  }
  return out;
}

DiagonalState refresh(const DiagonalState& state, std::size_t qubit,
                      double delivered) {
  Polarization{delivered};
  const auto mask = qubit_mask(qubit, state.qubits());
  const double up = 0.5 * (1.0 + delivered);
  const double down = 0.5 * (1.0 - delivered);
  std::vector<double> probs(state.size());
  for (std::size_t b = 0; b < state.size(); ++b) {
    // marginal of the remaining qubits, summed over the refreshed bit
    const double rest = state[b] + state[b ^ mask];
    probs[b] = rest * ((b & mask) ? down : up);
  }
  return DiagonalState(state.qubits(), std::move(probs));
}

DiagonalState refresh(const DiagonalState& state, std::size_t qubit,
                      const BathParameters& bath) {
  return refresh(state, qubit, bath.delivered());
}

Permutation swap_gate(std::size_t i, std::size_t j, std::size_t n) {
  const auto mi = qubit_mask(i, n);
  const auto mj = qubit_mask(j, n);
  if (i == j) throw std::invalid_argument("swap needs two distinct qubits");
  std::vector<std::uint32_t> map(std::size_t{1} << n);
  for (std::uint32_t b = 0; b < map.size(); ++b) {
    const bool bi = b & mi;
    const bool bj = b & mj;
    map[b] = (bi == bj) ? b : (b ^ mi ^ mj);
  }
  return Permutation(std::move(map));
}

Permutation three_bit_compression(std::size_t n, std::size_t target,
                                  std::size_t a, std::size_t b) {
  const auto mt = qubit_mask(target, n);
  const auto ma = qubit_mask(a, n);
  const auto mb = qubit_mask(b, n);
  if (target == a || target == b || a == b) {
    throw std::invalid_argument("compression needs three distinct qubits");
  }
  const std::uint32_t all = mt | ma | mb;
  std::vector<std::uint32_t> map(std::size_t{1} << n);
  for (std::uint32_t x = 0; x < map.size(); ++x) {
    const std::uint32_t local = x & all;
    // 011 <-> 100 in (target, a, b) order
    map[x] = (local == (ma | mb) || local == mt) ? (x ^ all) : x;
  }
  return Permutation(std::move(map));
}

DiagonalState apply_permutation(const DiagonalState& state,
                                const Permutation& perm) {
  if (perm.size() != state.size()) {
    throw std::invalid_argument("permutation size does not match the state");
  }
  std::vector<double> probs(state.size());
  for (std::size_t b = 0; b < state.size(); ++b) probs[perm(b)] = state[b];
  return DiagonalState(state.qubits(), std::move(probs));
}

SortStep ppa_sort_step(const DiagonalState& state) {
  std::vector<std::uint32_t> order(state.size());
  std::iota(order.begin(), order.end(), 0u);
  const auto probs = state.probs();
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    return probs[x] > probs[y];
  });
  // order[r] is the source index that lands at rank r
  std::vector<std::uint32_t> map(state.size());
  std::vector<double> sorted(state.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) {
    map[order[r]] = r;
    sorted[r] = probs[order[r]];
  }
  return {DiagonalState(state.qubits(), std::move(sorted)),
          Permutation(std::move(map))};
}

std::vector<double> Trajectory::target_history() const {
  std::vector<double> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.front());
  return out;
}

Trajectory run_ppa(std::size_t n, const BathParameters& bath,
                   const PpaOptions& opts) {
  if (n == 0) throw std::invalid_argument("register needs at least one qubit");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (opts.max_rounds == 0) throw std::invalid_argument("max_rounds must be positive");
  const std::size_t reset = opts.reset_qubit == 0 ? n : opts.reset_qubit;
  check_qubit(reset, n);

  Trajectory traj;
  auto state = DiagonalState::maximally_mixed(n);
  for (std::size_t round = 1; round <= opts.max_rounds; ++round) {
    auto next = ppa_sort_step(refresh(state, reset, bath)).state;
    traj.rounds.push_back(polarizations(next));
    traj.asymptote = traj.rounds.back().front();
    // Qubit 1 can stall for several rounds while lower qubits fill up, so
    // convergence is judged on the whole state. The L1 change bounds the
    // qubit-1 change.
    double change = 0.0;
    for (std::size_t b = 0; b < next.size(); ++b) change += std::abs(next[b] - state[b]);
    state = std::move(next);
    // A single qubit cannot be compressed; the first round is the limit.
    if (n == 1 || (round > 1 && change < opts.tol)) {
      traj.converged = true;
      break;
    }
  }
  return traj;
}

AsymptoteReport asymptotic_polarization(std::size_t n, double p_refresh) {
  if (n == 0) throw std::invalid_argument("register needs at least one qubit");
  if (!(p_refresh > 0.0 && p_refresh <= 1.0)) {
    throw std::invalid_argument("refresh polarization must lie in (0, 1]");
  }
  PpaOptions opts;
  opts.tol = std::min(1e-12, 1e-9 * p_refresh);
  opts.max_rounds = 2000000;
  const auto traj = run_ppa(n, BathParameters(Polarization(p_refresh), 1.0), opts);
  if (!traj.converged) {
    throw ConvergenceError("PPA limit did not converge within " +
                           std::to_string(opts.max_rounds) + " rounds");
  }
  AsymptoteReport report;
  report.iterated = traj.asymptote;
  report.rounds = traj.rounds.size();
  report.regime_estimate =
      n <= 2 ? p_refresh : std::min(std::ldexp(p_refresh, int(n) - 2), 1.0);
  return report;
}

}  // namespace hbac::cooling
