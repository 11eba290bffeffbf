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

#include "hbac/spin.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hbac::spin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix single_pauli(Axis axis) {
  Matrix s(2, 2);
  switch (axis) {
    case Axis::X: s << 0, 1, 1, 0; break;
    case Axis::Y: s << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case Axis::Z: s << 1, 0, 0, -1; break;
  }
  return s;
}

// Kronecker embedding of a 2x2 operator at position `spin` (1-based).
Matrix embed(const Matrix& op, std::size_t spin, std::size_t m) {
  const std::size_t left = std::size_t{1} << (spin - 1);
  const std::size_t right = std::size_t{1} << (m - spin);
  const std::size_t dim = left * 2 * right;
  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t l = 0; l < left; ++l) {
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t b = 0; b < 2; ++b) {
        if (op(a, b) == Complex(0)) continue;
        for (std::size_t r = 0; r < right; ++r) {
          out((l * 2 + a) * right + r, (l * 2 + b) * right + r) = op(a, b);
        }
      }
    }
  }
  return out;
}

void check_spin(std::size_t spin, std::size_t m) {
  if (spin < 1 || spin > m) {
    throw std::out_of_range("spin index " + std::to_string(spin) +
                            " outside 1.." + std::to_string(m));
  }
}

template <typename PairTerm>
Matrix heteronuclear_sum(const SpinSystem& sys, PairTerm term) {
  bool has_c = false, has_h = false;
  for (const auto& s : sys.spins()) {
    (s.species == Species::Carbon ? has_c : has_h) = true;
  }
  if (!has_c || !has_h) {
    throw std::invalid_argument("system has no heteronuclear C-H pairs");
  }
  const std::size_t m = sys.size();
  Matrix h = Matrix::Zero(sys.dimension(), sys.dimension());
  for (std::size_t j = 1; j <= m; ++j) {
    for (std::size_t k = j + 1; k <= m; ++k) {
      if (sys.spins()[j - 1].species == sys.spins()[k - 1].species) continue;
      const double d = sys.coupling(j, k);
      if (d == 0.0) continue;
      h += term(j, k, d);
    }
  }
  return h;
}

Matrix zz(std::size_t j, std::size_t k, std::size_t m) {
  return pauli(j, Axis::Z, m) * pauli(k, Axis::Z, m);
}
Matrix xx(std::size_t j, std::size_t k, std::size_t m) {
  return pauli(j, Axis::X, m) * pauli(k, Axis::X, m);
}
Matrix yy(std::size_t j, std::size_t k, std::size_t m) {
  return pauli(j, Axis::Y, m) * pauli(k, Axis::Y, m);
}

}  // namespace

Species parse_species(const std::string& s) {
  if (s == "C" || s == "13C") return Species::Carbon;
  if (s == "H" || s == "1H") return Species::Proton;
  throw std::invalid_argument("unknown spin species '" + s + "'");
}

Axis parse_axis(const std::string& s) {
  if (s == "x" || s == "X") return Axis::X;
  if (s == "y" || s == "Y") return Axis::Y;
  if (s == "z" || s == "Z") return Axis::Z;
  throw std::invalid_argument("unknown axis '" + s + "'");
}

const char* to_string(Species s) { return s == Species::Carbon ? "C" : "H"; }

SpinSystem::SpinSystem(std::vector<Spin> spins, std::vector<double> shifts_khz,
                       Eigen::MatrixXd couplings_khz)
    : spins_(std::move(spins)),
      shifts_(std::move(shifts_khz)),
      couplings_(std::move(couplings_khz)) {
  const auto m = spins_.size();
  if (m == 0) throw std::invalid_argument("spin system is empty");
  if (m > 10) throw std::invalid_argument("spin system too large for dense simulation");
  if (shifts_.size() != m || std::size_t(couplings_.rows()) != m ||
      std::size_t(couplings_.cols()) != m) {
    throw std::invalid_argument("spin system sizes are inconsistent");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (couplings_(i, i) != 0.0) {
      throw std::invalid_argument("coupling matrix diagonal must be zero");
    }
    for (std::size_t j = i + 1; j < m; ++j) {
      if (couplings_(i, j) != couplings_(j, i)) {
        throw std::invalid_argument("coupling matrix must be symmetric");
      }
    }
  }
}

std::size_t SpinSystem::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < spins_.size(); ++i) {
    if (spins_[i].label == label) return i + 1;
  }
  throw std::invalid_argument("no spin labelled '" + label + "'");
}

bool SpinSystem::homonuclear() const {
  for (const auto& s : spins_) {
    if (s.species != spins_.front().species) return false;
  }
  return true;
}

bool is_hermitian(const Matrix& h, double tol) {
  return h.rows() == h.cols() && (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const Matrix id = Matrix::Identity(u.rows(), u.cols());
  return (u.adjoint() * u - id).cwiseAbs().maxCoeff() <= tol;
}

Matrix pauli(std::size_t spin, Axis axis, std::size_t m) {
  check_spin(spin, m);
  return embed(single_pauli(axis), spin, m);
}

Matrix exchange_hamiltonian(const SpinSystem& sys) {
  const auto m = sys.size();
  return heteronuclear_sum(sys, [m](std::size_t j, std::size_t k, double d) -> Matrix {
    return (d / 3.0) * 0.5 * (zz(j, k, m) + yy(j, k, m) + xx(j, k, m));
  });
}

Matrix natural_hamiltonian(const SpinSystem& sys) {
  const auto m = sys.size();
  return heteronuclear_sum(sys, [m](std::size_t j, std::size_t k, double d) -> Matrix {
    return 0.5 * d * zz(j, k, m);
  });
}

Matrix register_hamiltonian(const SpinSystem& sys, bool flip_flop) {
  if (!sys.homonuclear()) {
    throw std::invalid_argument("register Hamiltonian needs a single species");
  }
  const auto m = sys.size();
  Matrix h = Matrix::Zero(sys.dimension(), sys.dimension());
  for (std::size_t i = 1; i <= m; ++i) {
    h += 0.5 * sys.shifts()[i - 1] * pauli(i, Axis::Z, m);
  }
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = i + 1; j <= m; ++j) {
      const double d = sys.coupling(i, j);
      if (d == 0.0) continue;
      if (flip_flop) {
        h += 0.25 * d * (2.0 * zz(i, j, m) - xx(i, j, m) - yy(i, j, m));
      } else {
        h += 0.5 * d * zz(i, j, m);
      }
    }
  }
  return h;
}

Matrix evolve(const Matrix& h, double t_ms) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (!is_hermitian(h, 1e-12 * scale)) {
    throw std::invalid_argument("evolve needs a Hermitian operator");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  Eigen::VectorXcd phases(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    phases(i) = std::polar(1.0, -kTwoPi * ev(i) * t_ms);
  }
  const Matrix& v = eig.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

double transfer_efficiency(const SpinSystem& sys, std::size_t source,
                           std::size_t target, double t_ms) {
  const auto m = sys.size();
  check_spin(source, m);
  check_spin(target, m);
  if (source == target) throw std::invalid_argument("source and target must differ");
  const Matrix u = evolve(exchange_hamiltonian(sys), t_ms);
  const double dim = double(sys.dimension());
  // rho(0) = (1 + sigma_z^source)/dim; the identity part carries no polarization
  const Matrix rho = (Matrix::Identity(sys.dimension(), sys.dimension()) +
                      pauli(source, Axis::Z, m)) / dim;
  const Matrix evolved = u * rho * u.adjoint();
  return (evolved * pauli(target, Axis::Z, m)).trace().real();
}

TransferPeak optimal_transfer_time(const SpinSystem& sys, std::size_t source,
                                   std::size_t target, double horizon_ms,
                                   std::size_t grid) {
  if (!(horizon_ms > 0.0) || grid < 3) {
    throw std::invalid_argument("transfer scan needs a positive horizon");
  }
  const Matrix h = exchange_hamiltonian(sys);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  const auto m = sys.size();
  const Matrix v = eig.eigenvectors();
  const Matrix src = v.adjoint() * pauli(source, Axis::Z, m) * v;
  const Matrix dst = v.adjoint() * pauli(target, Axis::Z, m) * v;
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double dim = double(sys.dimension());
  // Tr(e^{-iHt} sz_s e^{iHt} sz_t) in the eigenbasis of H
  auto eta = [&](double t) {
    Complex acc = 0.0;
    for (Eigen::Index a = 0; a < ev.size(); ++a) {
      for (Eigen::Index b = 0; b < ev.size(); ++b) {
        acc += std::polar(1.0, -kTwoPi * (ev(a) - ev(b)) * t) * src(a, b) * dst(b, a);
      }
    }
    return acc.real() / dim;
  };

  const double dt = horizon_ms / double(grid);
  std::size_t best = 1;
  double prev = eta(0.0), cur = eta(dt);
  for (std::size_t i = 1; i < grid; ++i) {
    const double next = eta(dt * double(i + 1));
    if (cur >= prev && cur >= next) {
      best = i;
      break;
    }
    best = i + 1;
    prev = cur;
    cur = next;
  }
  const double lo = dt * double(best - 1);
  const double hi = dt * double(std::min(best + 1, grid));
  auto [t, neg] = boost::math::tools::brent_find_minima(
      [&](double x) { return -eta(x); }, lo, hi, std::numeric_limits<double>::digits);
  return {t, -neg};
}

CollectiveRotation CollectiveRotation::both(Axis axis, double angle) {
  return {axis, angle, axis, angle};
}

double ToggleSequence::cycle_time() const {
  double t = 0.0;
  for (const auto& s : steps) t += s.dwell_ms;
  return t;
}

Matrix rotation_unitary(const SpinSystem& sys, const CollectiveRotation& rot) {
  const auto m = sys.size();
  Matrix u = Matrix::Identity(sys.dimension(), sys.dimension());
  for (std::size_t i = 1; i <= m; ++i) {
    const bool carbon = sys.spins()[i - 1].species == Species::Carbon;
    const double angle = carbon ? rot.carbon_angle : rot.proton_angle;
    if (angle == 0.0) continue;
    const Axis axis = carbon ? rot.carbon_axis : rot.proton_axis;
    const Matrix single = std::cos(angle / 2) * Matrix::Identity(2, 2) -
                          Complex(0, std::sin(angle / 2)) * single_pauli(axis);
    u = embed(single, i, m) * u;
  }
  return u;
}

Matrix toggling_average(const SpinSystem& sys, const Matrix& h,
                        const ToggleSequence& seq) {
  if (seq.steps.empty()) throw std::invalid_argument("toggle sequence is empty");
  if (h.rows() != Eigen::Index(sys.dimension()) || !is_hermitian(h)) {
    throw std::invalid_argument("toggling average needs a Hermitian operator of system size");
  }
  const double total = seq.cycle_time();
  for (const auto& s : seq.steps) {
    if (!(s.dwell_ms > 0.0)) throw std::invalid_argument("dwell times must be positive");
  }
  if (!(total > 0.0)) throw std::invalid_argument("zero cycle time");

  Matrix frame = Matrix::Identity(sys.dimension(), sys.dimension());
  Matrix avg = Matrix::Zero(sys.dimension(), sys.dimension());
  for (const auto& s : seq.steps) {
    frame = rotation_unitary(sys, s.pulse) * frame;
    avg += s.dwell_ms * (frame.adjoint() * h * frame);
  }
  avg /= total;
  return 0.5 * (avg + avg.adjoint());
}

ToggleSequence balanced_xyz_sequence(double dwell_ms) {
  constexpr double q = std::numbers::pi / 2;
  using R = CollectiveRotation;
  return {{{R::none(), dwell_ms},
           {R::both(Axis::Y, q), dwell_ms},
           {R::both(Axis::X, q), dwell_ms},
           {R::none(), dwell_ms},
           {R::both(Axis::X, -q), dwell_ms},
           {R::both(Axis::Y, -q), dwell_ms}}};
}

ToggleSequence x_spin_lock_sequence(double dwell_ms) {
  constexpr double q = std::numbers::pi / 2;
  using R = CollectiveRotation;
  return {{{R::none(), dwell_ms},
           {R::both(Axis::X, q), dwell_ms},
           {R::both(Axis::X, q), dwell_ms},
           {R::both(Axis::X, q), dwell_ms}}};
}

double state_correlation_fidelity(const cooling::DiagonalState& achieved,
                                  const cooling::DiagonalState& ideal) {
  if (achieved.qubits() != ideal.qubits()) {
    throw std::invalid_argument("states have different sizes");
  }
  const auto got = cooling::polarizations(achieved);
  const auto want = cooling::polarizations(ideal);
  double scale = 0.0;
  for (double p : want) scale = std::max(scale, std::abs(p));
  if (scale == 0.0) throw std::invalid_argument("all ideal polarizations are zero");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t q = 0; q < want.size(); ++q) {
    if (std::abs(want[q]) <= 1e-12 * scale) continue;
    sum += got[q] / want[q];
    ++count;
  }
  return sum / double(count);
}

}  // namespace hbac::spin
