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

// Exact classical engine for heat-bath algorithmic cooling on diagonal
// register states.
//
// Conventions used throughout the toolkit:
//   * qubits are numbered 1..n, qubit 1 is the most significant bit of a
//     basis index;
//   * bit value 0 is the spin-up level, the more probable one at positive
//     polarization, so p = Prob(bit = 0) - Prob(bit = 1).

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace hbac::cooling {

/// Thrown when an iterative limit computation runs out of rounds.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checked polarization value in [-1, 1].
class Polarization {
 public:
  Polarization() = default;
  explicit Polarization(double value);

  double value() const noexcept { return value_; }
  operator double() const noexcept { return value_; }

 private:
  double value_ = 0.0;
};

struct BathParameters {
  Polarization p_bath;
  double eta = 1.0;

  BathParameters() = default;
  BathParameters(Polarization bath, double efficiency);

  /// Polarization delivered to the reset qubit by one refresh.
  double delivered() const noexcept { return eta * p_bath.value(); }
};

/// Probability vector over the 2^n computational basis states.
class DiagonalState {
 public:
  static constexpr std::size_t kMaxQubits = 24;

  DiagonalState(std::size_t n, std::vector<double> probs);

  static DiagonalState maximally_mixed(std::size_t n);

  std::size_t qubits() const noexcept { return n_; }
  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t b) const { return probs_[b]; }

 private:
  std::size_t n_;
  std::vector<double> probs_;
};

/// Bijection on {0, ..., 2^n - 1}; b maps to map()[b].
class Permutation {
 public:
  explicit Permutation(std::vector<std::uint32_t> map);

  static Permutation identity(std::size_t size);

  std::size_t size() const noexcept { return map_.size(); }
  std::uint32_t operator()(std::size_t b) const { return map_[b]; }
  std::span<const std::uint32_t> map() const noexcept { return map_; }

  Permutation inverse() const;
  bool is_identity() const noexcept;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::uint32_t> map_;
};

/// Permutation equal to applying `first` and then `second`.
Permutation compose(const Permutation& first, const Permutation& second);

/// Bit mask of `qubit` (1-based) inside an n-qubit basis index.
std::uint32_t qubit_mask(std::size_t qubit, std::size_t n);

DiagonalState product_state(std::span<const double> pols);
DiagonalState product_state(std::initializer_list<double> pols);

double polarization_of(const DiagonalState& state, std::size_t qubit);
std::vector<double> polarizations(const DiagonalState& state);

/// Traces out `qubit` and replaces it with a fresh qubit at the bath's
/// delivered polarization, uncorrelated with the rest of the register.
DiagonalState refresh(const DiagonalState& state, std::size_t qubit,
                      const BathParameters& bath);
/// Same as above with an explicit delivered polarization.
DiagonalState refresh(const DiagonalState& state, std::size_t qubit,
                      double delivered);

Permutation swap_gate(std::size_t i, std::size_t j, std::size_t n);

/// Compression acting on (target, a, b): exchanges local patterns 011 and 100
/// with `target` listed first and fixes the other six patterns.
Permutation three_bit_compression(std::size_t n, std::size_t target,
                                  std::size_t a, std::size_t b);

/// probs'[perm(b)] = probs[b].
DiagonalState apply_permutation(const DiagonalState& state,
                                const Permutation& perm);

struct SortStep {
  DiagonalState state;
  Permutation perm;
};

/// Descending sort of the probability vector, ties kept in ascending index
/// order.
SortStep ppa_sort_step(const DiagonalState& state);

struct Trajectory {
  /// Per-round polarizations of every qubit, recorded after the sort.
  std::vector<std::vector<double>> rounds;
  bool converged = false;
  double asymptote = 0.0;

  std::vector<double> target_history() const;
};

struct PpaOptions {
  std::size_t reset_qubit = 0;  // 0 selects qubit n
  std::size_t max_rounds = 100000;
  /// Convergence threshold on the L1 change of the state over one round.
  double tol = 1e-12;
};

/// Alternates refresh of the reset qubit with a sort step, starting from the
/// maximally mixed register, until the register state settles.
Trajectory run_ppa(std::size_t n, const BathParameters& bath,
                   const PpaOptions& opts = {});

struct AsymptoteReport {
  double iterated = 0.0;
  /// min(2^(n-2) p, 1); p itself at n = 1.
  double regime_estimate = 0.0;
  std::size_t rounds = 0;
};

AsymptoteReport asymptotic_polarization(std::size_t n, double p_refresh);

}  // namespace hbac::cooling
