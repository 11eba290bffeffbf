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

// Small-Hilbert-space spin simulator. Hamiltonians are in kHz, times in ms,
// and propagators follow U = exp(-i 2 pi H t). Spin 1 is the leftmost tensor
// factor, matching the qubit-1-is-most-significant convention of cooling.hpp.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "hbac/cooling.hpp"

namespace hbac::spin {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

enum class Species { Carbon, Proton };
enum class Axis { X, Y, Z };

Species parse_species(const std::string& s);
Axis parse_axis(const std::string& s);
const char* to_string(Species s);

struct Spin {
  std::string label;
  Species species;
};

/// Spin labels/species, chemical shifts and the symmetric dipolar coupling
/// table, all in kHz.
class SpinSystem {
 public:
  SpinSystem(std::vector<Spin> spins, std::vector<double> shifts_khz,
             Eigen::MatrixXd couplings_khz);

  std::size_t size() const noexcept { return spins_.size(); }
  std::size_t dimension() const noexcept { return std::size_t{1} << size(); }
  const std::vector<Spin>& spins() const noexcept { return spins_; }
  const std::vector<double>& shifts() const noexcept { return shifts_; }
  const Eigen::MatrixXd& couplings() const noexcept { return couplings_; }
  double coupling(std::size_t i, std::size_t j) const { return couplings_(i - 1, j - 1); }

  /// 1-based index of the spin with this label.
  std::size_t index_of(const std::string& label) const;
  bool homonuclear() const;

 private:
  std::vector<Spin> spins_;
  std::vector<double> shifts_;
  Eigen::MatrixXd couplings_;
};

bool is_hermitian(const Matrix& h, double tol = 1e-12);
bool is_unitary(const Matrix& u, double tol = 1e-10);

/// Single-spin Pauli matrix on `spin` (1-based) embedded in an m-spin space.
Matrix pauli(std::size_t spin, Axis axis, std::size_t m);

/// Sum over heteronuclear C-H pairs of D/3 (zz + yy + xx)/2.
Matrix exchange_hamiltonian(const SpinSystem& sys);
/// Sum over heteronuclear C-H pairs of D zz/2.
Matrix natural_hamiltonian(const SpinSystem& sys);

/// Homonuclear register Hamiltonian: shifts nu sigma_z/2 plus secular
/// dipolar couplings D (2zz - xx - yy)/4. With flip_flop = false the
/// couplings reduce to the weak-coupling form D zz/2.
Matrix register_hamiltonian(const SpinSystem& sys, bool flip_flop = true);

/// exp(-i 2 pi H t) for Hermitian H, via eigendecomposition.
Matrix evolve(const Matrix& h, double t_ms);

/// Polarization reaching `target` after evolving a state with unit
/// polarization on `source` (all others maximally mixed) under the exchange
/// Hamiltonian for t_ms.
double transfer_efficiency(const SpinSystem& sys, std::size_t source,
                           std::size_t target, double t_ms);

struct TransferPeak {
  double time_ms = 0.0;
  double efficiency = 0.0;
};

/// First maximum of transfer_efficiency on (0, horizon_ms]: located on a grid
/// and polished with Brent's method.
TransferPeak optimal_transfer_time(const SpinSystem& sys, std::size_t source,
                                   std::size_t target, double horizon_ms,
                                   std::size_t grid = 2000);

/// Ideal (delta) rotation applied to every spin of each species.
struct CollectiveRotation {
  Axis carbon_axis = Axis::X;
  double carbon_angle = 0.0;
  Axis proton_axis = Axis::X;
  double proton_angle = 0.0;

  /// Same rotation on both species.
  static CollectiveRotation both(Axis axis, double angle);
  static CollectiveRotation none() { return {}; }
};

struct ToggleStep {
  CollectiveRotation pulse;  // applied before the dwell
  double dwell_ms = 0.0;
};

struct ToggleSequence {
  std::vector<ToggleStep> steps;

  double cycle_time() const;
};

Matrix rotation_unitary(const SpinSystem& sys, const CollectiveRotation& rot);

/// Zeroth-order average Hamiltonian (1/T) sum_k dwell_k R_k^dag H R_k, where
/// R_k is the product of all pulses up to and including step k.
Matrix toggling_average(const SpinSystem& sys, const Matrix& h,
                        const ToggleSequence& seq);

/// Six equal dwells visiting the z, x, y, y, x, z toggling frames with
/// synchronous pi/2 pulses on both species; net rotation is the identity.
ToggleSequence balanced_xyz_sequence(double dwell_ms);

/// Frames z, y, -z, -y reached by successive x pi/2 pulses: a sampled
/// continuous x-axis spin-lock.
ToggleSequence x_spin_lock_sequence(double dwell_ms);

/// Mean over qubits of achieved/ideal polarization, restricted to qubits whose
/// ideal polarization is nonzero.
double state_correlation_fidelity(const cooling::DiagonalState& achieved,
                                  const cooling::DiagonalState& ideal);

}  // namespace hbac::spin
