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

// Six-step cooling experiment model: a schedule of refresh and register-gate
// steps, a two-parameter imperfection model, and a least-squares fit of that
// model to measured per-step polarizations.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "hbac/cooling.hpp"

namespace hbac::experiment {

/// P_H / P_C for 1H against 13C at the same field.
inline constexpr double kProtonCarbonRatio = 3.98;

enum class GateKind { Swap, Compression, Other };

struct RefreshStep {
  std::size_t qubit = 0;
};

struct GateStep {
  std::string name;
  GateKind kind = GateKind::Other;
  cooling::Permutation perm;
};

using Step = std::variant<RefreshStep, GateStep>;

struct ProtocolSchedule {
  std::size_t qubits = 0;
  std::vector<std::string> labels;
  std::vector<Step> steps;

  /// refresh(Cm), swap(Cm,C2), refresh(Cm), swap(Cm,C1), refresh(Cm),
  /// compression(C1; C2, Cm) on qubits C1=1, C2=2, Cm=3.
  static ProtocolSchedule six_step();

  void validate() const;
  std::string step_label(std::size_t index) const;
};

/// Per-step imperfections. The k-th refresh (1-based) delivers
/// P' * max(0, 1 - refresh_decay (k-1)^2). After each swap or other
/// register gate every qubit polarization is multiplied by gate_efficiency;
/// compression gates use compression_efficiency instead.
struct ErrorModel {
  double refresh_decay = 0.0;
  double gate_efficiency = 1.0;
  double compression_efficiency = 1.0;

  void validate() const;
  static ErrorModel ideal() { return {}; }
};

struct StepReport {
  std::size_t step = 0;  // 1-based
  std::string label;
  /// Polarizations in units of P'; NaN marks an unobserved entry.
  std::vector<double> polarizations;
  std::vector<double> uncertainty;
};

struct ProtocolRun {
  std::vector<StepReport> reports;
  std::vector<cooling::DiagonalState> states;  // state after each step
};

/// Multiplies every single-qubit polarization (and every correlation, per
/// qubit involved) by `factor`: a depolarizing channel on each qubit.
cooling::DiagonalState shrink_polarizations(const cooling::DiagonalState& state,
                                            double factor);

/// Runs from the maximally mixed register; reports are normalized to
/// P' = eta * P_H.
ProtocolRun simulate_protocol(const ProtocolSchedule& schedule,
                              const cooling::BathParameters& bath,
                              const ErrorModel& err);
std::vector<StepReport> run_protocol(const ProtocolSchedule& schedule,
                                     const cooling::BathParameters& bath,
                                     const ErrorModel& err);

struct FitOptions {
  /// Use gate_efficiency for compression gates too. This is the strict
  /// one-efficiency form; it cannot produce a compression boost above
  /// 1.5 g - 1.
  bool tie_compression_to_gate = false;
  /// Held fixed when not tied.
  double compression_efficiency = 1.0;
};

struct FitResult {
  ErrorModel model;
  double rms_residual = 0.0;
  std::size_t observations = 0;
};

/// Least-squares (Levenberg-Marquardt) fit of refresh_decay and
/// gate_efficiency to every finite observed polarization.
FitResult fit_error_model(const ProtocolSchedule& schedule,
                          const cooling::BathParameters& bath,
                          const std::vector<StepReport>& observed,
                          const FitOptions& opts = {});

struct ProtocolSummary {
  double fidelity = 0.0;        // final qubit-1 / ideal final qubit-1
  double per_step_error = 0.0;  // 1 - fidelity^(1/steps)
  double boost = 0.0;           // final qubit-1 / mean before final step - 1
};

ProtocolSummary protocol_fidelity(const std::vector<StepReport>& reports,
                                  double ideal_final = 1.5);

/// P'/P_H from a measured P'/P_C ratio.
double calibrate_refresh(double p_prime_over_pc);

/// CSV columns: step,qubit,polarization,uncertainty. Qubits are 1-based;
/// unobserved entries may be omitted or written as nan.
std::vector<StepReport> read_reports_csv(std::istream& in, std::size_t qubits);
void write_reports_csv(std::ostream& out, const std::vector<StepReport>& reports);

}  // namespace hbac::experiment
