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

#include "hbac/experiment.hpp"

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hbac::experiment {

namespace {

using cooling::DiagonalState;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Residuals of the forward model against every finite observation; the two
// fitted parameters are clamped into their valid ranges.
struct FitFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const ProtocolSchedule* schedule;
  const cooling::BathParameters* bath;
  const std::vector<StepReport>* observed;
  FitOptions opts;
  int count;

  int inputs() const { return 2; }
  int values() const { return count; }

  ErrorModel model(const Eigen::VectorXd& x) const {
    ErrorModel m;
    m.refresh_decay = std::max(0.0, x(0));
    m.gate_efficiency = std::clamp(x(1), 0.0, 1.0);
    m.compression_efficiency =
        opts.tie_compression_to_gate ? m.gate_efficiency : opts.compression_efficiency;
    return m;
  }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    const auto reports = run_protocol(*schedule, *bath, model(x));
    int i = 0;
    for (const auto& obs : *observed) {
      const auto& got = reports[obs.step - 1].polarizations;
      for (std::size_t q = 0; q < obs.polarizations.size(); ++q) {
        if (std::isfinite(obs.polarizations[q])) fvec(i++) = got[q] - obs.polarizations[q];
      }
    }
    return 0;
  }
};

}  // namespace

ProtocolSchedule ProtocolSchedule::six_step() {
  constexpr std::size_t n = 3, c1 = 1, c2 = 2, cm = 3;
  ProtocolSchedule s;
  s.qubits = n;
  s.labels = {"C1", "C2", "Cm"};
  s.steps = {RefreshStep{cm},
             GateStep{"swap(Cm,C2)", GateKind::Swap, cooling::swap_gate(cm, c2, n)},
             RefreshStep{cm},
             GateStep{"swap(Cm,C1)", GateKind::Swap, cooling::swap_gate(cm, c1, n)},
             RefreshStep{cm},
             GateStep{"3BC(C1;C2,Cm)", GateKind::Compression,
                      cooling::three_bit_compression(n, c1, c2, cm)}};
  return s;
}

void ProtocolSchedule::validate() const {
  if (qubits == 0 || qubits > cooling::DiagonalState::kMaxQubits) {
    throw std::invalid_argument("schedule qubit count out of range");
  }
  if (steps.empty()) throw std::invalid_argument("schedule has no steps");
  if (!labels.empty() && labels.size() != qubits) {
    throw std::invalid_argument("schedule labels do not match the qubit count");
  }
  for (const auto& step : steps) {
    std::visit(overloaded{[&](const RefreshStep& r) {
                            if (r.qubit < 1 || r.qubit > qubits) {
                              throw std::invalid_argument("refresh target out of range");
                            }
                          },
                          [&](const GateStep& g) {
                            if (g.perm.size() != (std::size_t{1} << qubits)) {
                              throw std::invalid_argument("gate size does not match the register");
                            }
                          }},
               step);
  }
}

std::string ProtocolSchedule::step_label(std::size_t index) const {
  return std::visit(overloaded{[&](const RefreshStep& r) {
                                 const auto name = labels.empty() ? std::to_string(r.qubit)
                                                                  : labels[r.qubit - 1];
                                 return "refresh(" + name + ")";
                               },
                               [](const GateStep& g) { return g.name; }},
                    steps.at(index));
}

void ErrorModel::validate() const {
  if (!(refresh_decay >= 0.0)) throw std::invalid_argument("refresh decay must be nonnegative");
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(gate_efficiency) || !in_unit(compression_efficiency)) {
    throw std::invalid_argument("gate efficiencies must lie in [0, 1]");
  }
}

DiagonalState shrink_polarizations(const DiagonalState& state, double factor) {
  if (!(factor >= 0.0 && factor <= 1.0)) {
    throw std::invalid_argument("shrink factor must lie in [0, 1]");
  }
  if (factor == 1.0) return state;
  std::vector<double> cur(state.probs().begin(), state.probs().end());
  std::vector<double> next(cur.size());
  const double keep = 0.5 * (1.0 + factor);
  const double flip = 0.5 * (1.0 - factor);
  for (std::size_t q = 1; q <= state.qubits(); ++q) {
    const auto mask = cooling::qubit_mask(q, state.qubits());
    for (std::size_t b = 0; b < cur.size(); ++b) next[b] = keep * cur[b] + flip * cur[b ^ mask];
    cur.swap(next);
  }
  return DiagonalState(state.qubits(), std::move(cur));
}

ProtocolRun simulate_protocol(const ProtocolSchedule& schedule,
                              const cooling::BathParameters& bath, const ErrorModel& err) {
  schedule.validate();
  err.validate();
  const double p_prime = bath.delivered();
  if (!(p_prime > 0.0)) throw std::invalid_argument("refresh polarization must be positive");

  ProtocolRun run;
  auto state = DiagonalState::maximally_mixed(schedule.qubits);
  std::size_t refreshes = 0;
  for (std::size_t i = 0; i < schedule.steps.size(); ++i) {
    state = std::visit(
        overloaded{[&](const RefreshStep& r) {
                     const double k1 = double(refreshes++);
                     const double delivered =
                         p_prime * std::max(0.0, 1.0 - err.refresh_decay * k1 * k1);
                     return cooling::refresh(state, r.qubit, delivered);
                   },
                   [&](const GateStep& g) {
                     const double eff = g.kind == GateKind::Compression
                                            ? err.compression_efficiency
                                            : err.gate_efficiency;
                     return shrink_polarizations(cooling::apply_permutation(state, g.perm), eff);
                   }},
        schedule.steps[i]);

    StepReport report;
    report.step = i + 1;
    report.label = schedule.step_label(i);
    report.polarizations = cooling::polarizations(state);
    for (auto& p : report.polarizations) p /= p_prime;
    report.uncertainty.assign(schedule.qubits, 0.0);
    run.reports.push_back(std::move(report));
    run.states.push_back(state);
  }
  return run;
}

std::vector<StepReport> run_protocol(const ProtocolSchedule& schedule,
                                     const cooling::BathParameters& bath, const ErrorModel& err) {
  return simulate_protocol(schedule, bath, err).reports;
}

FitResult fit_error_model(const ProtocolSchedule& schedule, const cooling::BathParameters& bath,
                          const std::vector<StepReport>& observed, const FitOptions& opts) {
  schedule.validate();
  int count = 0;
  std::size_t steps_with_data = 0;
  bool nonzero = false;
  for (const auto& obs : observed) {
    if (obs.step < 1 || obs.step > schedule.steps.size()) {
      throw std::invalid_argument("observed step outside the schedule");
    }
    if (obs.polarizations.size() != schedule.qubits) {
      throw std::invalid_argument("observed report has the wrong number of qubits");
    }
    bool any = false;
    for (double p : obs.polarizations) {
      if (!std::isfinite(p)) continue;
      any = true;
      ++count;
      nonzero = nonzero || p != 0.0;
    }
    steps_with_data += any;
  }
  if (steps_with_data < 2) throw std::invalid_argument("fit needs at least two observed steps");
  if (!nonzero) throw std::invalid_argument("observed polarizations are all zero");
  if (!opts.tie_compression_to_gate &&
      !(opts.compression_efficiency >= 0.0 && opts.compression_efficiency <= 1.0)) {
    throw std::invalid_argument("compression efficiency must lie in [0, 1]");
  }

  FitFunctor functor{&schedule, &bath, &observed, opts, count};
  Eigen::NumericalDiff<FitFunctor, Eigen::Central> numeric(functor);

  FitResult best;
  double best_cost = std::numeric_limits<double>::infinity();
  const double starts[][2] = {{0.01, 0.95}, {0.05, 0.85}, {0.15, 0.7}};
  for (const auto& s : starts) {
    Eigen::VectorXd x(2);
    x << s[0], s[1];
    Eigen::LevenbergMarquardt<decltype(numeric)> lm(numeric);
    lm.parameters.xtol = 1e-15;
    lm.parameters.ftol = 1e-15;
    lm.parameters.maxfev = 4000;
    lm.minimize(x);
    Eigen::VectorXd r(count);
    functor(x, r);
    const double cost = r.squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best.model = functor.model(x);
    }
  }
  best.observations = std::size_t(count);
  best.rms_residual = std::sqrt(best_cost / double(count));
  return best;
}

ProtocolSummary protocol_fidelity(const std::vector<StepReport>& reports, double ideal_final) {
  if (reports.empty()) throw std::invalid_argument("no step reports");
  if (!(ideal_final != 0.0)) throw std::invalid_argument("ideal final polarization must be nonzero");
  ProtocolSummary s;
  const double final_p = reports.back().polarizations.front();
  s.fidelity = final_p / ideal_final;
  s.per_step_error = 1.0 - std::pow(std::max(s.fidelity, 0.0), 1.0 / double(reports.size()));
  if (reports.size() >= 2) {
    const auto& before = reports[reports.size() - 2].polarizations;
    double mean = 0.0;
    for (double p : before) mean += p;
    mean /= double(before.size());
    s.boost = mean != 0.0 ? final_p / mean - 1.0 : kNaN;
  } else {
    s.boost = kNaN;
  }
  return s;
}

double calibrate_refresh(double p_prime_over_pc) {
  if (!(p_prime_over_pc > 0.0)) throw std::invalid_argument("calibration ratio must be positive");
  return p_prime_over_pc / kProtonCarbonRatio;
}

std::vector<StepReport> read_reports_csv(std::istream& in, std::size_t qubits) {
  std::map<std::size_t, StepReport> by_step;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("step", 0) == 0) continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 3) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected step,qubit,polarization");
    }
    std::size_t step = 0, qubit = 0;
    double pol = 0.0, unc = 0.0;
    try {
      step = std::stoul(fields[0]);
      qubit = std::stoul(fields[1]);
      pol = std::stod(fields[2]);
      unc = fields.size() > 3 ? std::stod(fields[3]) : 0.0;
    } catch (const std::exception&) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": malformed number");
    }
    if (step == 0 || qubit == 0 || qubit > qubits) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": step/qubit out of range");
    }
    auto& r = by_step[step];
    if (r.polarizations.empty()) {
      r.step = step;
      r.polarizations.assign(qubits, kNaN);
      r.uncertainty.assign(qubits, kNaN);
    }
    r.polarizations[qubit - 1] = pol;
    r.uncertainty[qubit - 1] = unc;
  }
  std::vector<StepReport> out;
  for (auto& [step, r] : by_step) out.push_back(std::move(r));
  return out;
}

void write_reports_csv(std::ostream& out, const std::vector<StepReport>& reports) {
  out << "step,qubit,polarization,uncertainty\n";
  std::ostringstream line;
  line.precision(17);
  for (const auto& r : reports) {
    for (std::size_t q = 0; q < r.polarizations.size(); ++q) {
      line.str("");
      line << r.step << ',' << q + 1 << ',' << r.polarizations[q] << ','
           << (q < r.uncertainty.size() ? r.uncertainty[q] : 0.0) << '\n';
      out << line.str();
    }
  }
}

}  // namespace hbac::experiment
