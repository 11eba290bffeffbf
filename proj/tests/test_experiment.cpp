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

#include "doctest.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "hbac/experiment.hpp"
#include "hbac/spin.hpp"
#include "oracles.hpp"

using namespace hbac::experiment;
using hbac::cooling::BathParameters;
using hbac::cooling::Polarization;
using doctest::Approx;

namespace {

constexpr double kPPrime = 2.4e-5;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

BathParameters bath() { return BathParameters(Polarization(kPPrime), 1.0); }

// Step-5 polarizations in units of P' for the six-step schedule, worked by
// hand: qubit 1 holds the second refresh after one swap, qubit 2 the first
// refresh after two swaps, and Cm the third refresh.
std::vector<double> step5_closed_form(double c, double g) {
  return {(1.0 - c) * g, g * g, 1.0 - 4.0 * c};
}

std::vector<StepReport> figure_data() {
  StepReport five{5, "", {0.88, 0.83, 0.76}, {0.03, 0.03, 0.03}};
  StepReport six{6, "", {1.22, kNaN, kNaN}, {0.03, kNaN, kNaN}};
  return {five, six};
}

}  // namespace

TEST_CASE("six-step schedule") {
  const auto s = ProtocolSchedule::six_step();
  CHECK(s.qubits == 3);
  REQUIRE(s.steps.size() == 6);
  CHECK_NOTHROW(s.validate());
  CHECK(std::holds_alternative<RefreshStep>(s.steps[0]));
  CHECK(std::get<GateStep>(s.steps[5]).kind == GateKind::Compression);
  CHECK(std::get<GateStep>(s.steps[1]).kind == GateKind::Swap);
  CHECK(s.step_label(0).find("Cm") != std::string::npos);

  ProtocolSchedule bad = s;
  bad.steps.push_back(RefreshStep{4});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.steps.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("ideal protocol") {
  const auto reports = run_protocol(ProtocolSchedule::six_step(), bath(), ErrorModel::ideal());
  REQUIRE(reports.size() == 6);
  const std::vector<std::vector<double>> want{
      {0, 0, 1}, {0, 1, 0}, {0, 1, 1}, {1, 1, 0}, {1, 1, 1}};
  for (std::size_t i = 0; i < want.size(); ++i) {
    for (std::size_t q = 0; q < 3; ++q) {
      CHECK(reports[i].polarizations[q] == Approx(want[i][q]).scale(1.0).epsilon(1e-9));
    }
  }
  const double exact = oracle::compressed_target_polarization(kPPrime, kPPrime, kPPrime) / kPPrime;
  CHECK(reports[5].polarizations[0] == Approx(exact).epsilon(1e-9));
  CHECK(reports[5].polarizations[0] == Approx(1.5).epsilon(1e-6));
  CHECK(reports[5].step == 6);
}

TEST_CASE("depolarizing shrink") {
  using hbac::cooling::DiagonalState;
  // correlated two-qubit state with <z1> = 0.2, <z2> = -0.1, <z1 z2> = 0.5
  const double z1 = 0.2, z2 = -0.1, zz = 0.5;
  auto make = [](double a, double b, double ab) {
    return DiagonalState(2, {(1 + a + b + ab) / 4, (1 + a - b - ab) / 4, (1 - a + b - ab) / 4,
                             (1 - a - b + ab) / 4});
  };
  const auto out = shrink_polarizations(make(z1, z2, zz), 0.8);
  const auto want = make(0.8 * z1, 0.8 * z2, 0.64 * zz);
  for (std::size_t b = 0; b < 4; ++b) CHECK(out[b] == Approx(want[b]).epsilon(1e-14));
  CHECK_THROWS_AS(shrink_polarizations(out, 1.2), std::invalid_argument);
  const auto flat = shrink_polarizations(out, 0.0);
  for (std::size_t b = 0; b < 4; ++b) CHECK(flat[b] == Approx(0.25));
}

TEST_CASE("error model in closed form") {
  const auto s = ProtocolSchedule::six_step();
  for (double c : {0.0, 0.02, 0.06}) {
    for (double g : {1.0, 0.95, 0.9}) {
      const ErrorModel m{c, g, 1.0};
      const auto r = run_protocol(s, bath(), m);
      const auto want = step5_closed_form(c, g);
      for (std::size_t q = 0; q < 3; ++q) {
        CHECK(r[4].polarizations[q] == Approx(want[q]).scale(1.0).epsilon(1e-9));
      }
      // step 5 never exceeds what the bath hands over
      for (double p : r[4].polarizations) CHECK(p <= 1.0 + 1e-9);
      const double six = oracle::compressed_target_polarization(
                             want[0] * kPPrime, want[1] * kPPrime, want[2] * kPPrime) / kPPrime;
      CHECK(r[5].polarizations[0] == Approx(six).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(run_protocol(s, bath(), ErrorModel{-0.1, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(run_protocol(s, bath(), ErrorModel{0.0, 1.1, 1.0}), std::invalid_argument);
  // decay beyond the point where the bath delivers nothing is clamped
  const auto dead = run_protocol(s, bath(), ErrorModel{0.5, 1.0, 1.0});
  CHECK(dead[4].polarizations[2] == 0.0);
}

TEST_CASE("final polarization is monotone in both parameters") {
  const auto s = ProtocolSchedule::six_step();
  double prev_c = 10.0;
  for (double c = 0.0; c <= 0.2; c += 0.02) {
    const double v = run_protocol(s, bath(), {c, 0.9, 1.0})[5].polarizations[0];
    CHECK(v < prev_c);
    prev_c = v;
  }
  double prev_g = -10.0;
  for (double g = 0.5; g <= 1.0; g += 0.05) {
    const double v = run_protocol(s, bath(), {0.05, g, 1.0})[5].polarizations[0];
    CHECK(v > prev_g);
    prev_g = v;
  }
}

TEST_CASE("fit recovers the generating model") {
  const auto s = ProtocolSchedule::six_step();
  const ErrorModel truth{0.03, 0.92, 1.0};
  auto observed = run_protocol(s, bath(), truth);
  const auto fit = fit_error_model(s, bath(), observed);
  CHECK(fit.model.refresh_decay == Approx(truth.refresh_decay).epsilon(1e-6));
  CHECK(fit.model.gate_efficiency == Approx(truth.gate_efficiency).epsilon(1e-6));
  CHECK(fit.rms_residual < 1e-8);
  CHECK(fit.observations == 18);

  FitOptions tied;
  tied.tie_compression_to_gate = true;
  const ErrorModel tied_truth{0.04, 0.9, 0.9};
  const auto fit2 = fit_error_model(s, bath(), run_protocol(s, bath(), tied_truth), tied);
  CHECK(fit2.model.gate_efficiency == Approx(0.9).epsilon(1e-6));
  CHECK(fit2.model.compression_efficiency == fit2.model.gate_efficiency);
}

TEST_CASE("fit to sparse step data") {
  const auto s = ProtocolSchedule::six_step();
  const auto fit = fit_error_model(s, bath(), figure_data());
  CHECK(fit.observations == 4);
  const auto model_run = run_protocol(s, bath(), fit.model);
  CHECK(model_run[5].polarizations[0] == Approx(1.22).epsilon(0.03));

  SUBCASE("one shared efficiency cannot reach the observed boost") {
    FitOptions tied;
    tied.tie_compression_to_gate = true;
    const auto t = fit_error_model(s, bath(), figure_data(), tied);
    const auto summary = protocol_fidelity(run_protocol(s, bath(), t.model));
    CHECK(summary.boost < 0.45);
    // the boost of the tied model is bounded by 1.5 g - 1 at small P'
    const auto step5 = step5_closed_form(t.model.refresh_decay, t.model.gate_efficiency);
    const double mean5 = (step5[0] + step5[1] + step5[2]) / 3;
    CHECK(summary.boost <= 1.5 * t.model.gate_efficiency * std::max({step5[0], step5[1], step5[2]}) / mean5 - 1 + 1e-9);
  }
  SUBCASE("input errors") {
    CHECK_THROWS_AS(fit_error_model(s, bath(), {figure_data()[0]}), std::invalid_argument);
    auto zeros = figure_data();
    zeros[0].polarizations = {0, 0, 0};
    zeros[1].polarizations = {0, kNaN, kNaN};
    CHECK_THROWS_AS(fit_error_model(s, bath(), zeros), std::invalid_argument);
    auto outside = figure_data();
    outside[1].step = 7;
    CHECK_THROWS_AS(fit_error_model(s, bath(), outside), std::invalid_argument);
  }
}

TEST_CASE("compression fidelity against the ideal gate") {
  const auto s = ProtocolSchedule::six_step();
  const auto compress = std::get<GateStep>(s.steps[5]).perm;
  for (double g3 : {1.0, 0.9}) {
    const auto run = simulate_protocol(s, bath(), {0.05, 0.91, g3});
    const auto ideal = hbac::cooling::apply_permutation(run.states[4], compress);
    CHECK(hbac::spin::state_correlation_fidelity(run.states[5], ideal) == Approx(g3).epsilon(1e-12));
  }
}

TEST_CASE("summary figures") {
  std::vector<StepReport> r = figure_data();
  const auto s = protocol_fidelity(r);
  CHECK(s.fidelity == Approx(1.22 / 1.5));
  CHECK(s.boost == Approx(1.22 / ((0.88 + 0.83 + 0.76) / 3) - 1));
  CHECK(s.per_step_error == Approx(1 - std::pow(1.22 / 1.5, 0.5)));
  CHECK_THROWS_AS(protocol_fidelity({}), std::invalid_argument);
  CHECK(std::isnan(protocol_fidelity({r[1]}).boost));

  CHECK(calibrate_refresh(3.98) == Approx(1.0));
  CHECK(calibrate_refresh(3.3034) == Approx(0.83));
  CHECK_THROWS_AS(calibrate_refresh(0.0), std::invalid_argument);
}

TEST_CASE("report CSV") {
  const auto reports = run_protocol(ProtocolSchedule::six_step(), bath(), {0.02, 0.95, 1.0});
  std::stringstream buf;
  write_reports_csv(buf, reports);
  const auto back = read_reports_csv(buf, 3);
  REQUIRE(back.size() == reports.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].step == reports[i].step);
    for (std::size_t q = 0; q < 3; ++q) {
      CHECK(back[i].polarizations[q] == reports[i].polarizations[q]);
    }
  }

  std::istringstream sparse("# observed\nstep,qubit,polarization,uncertainty\n5,1,0.88,0.03\n6,1,1.22\n");
  const auto parsed = read_reports_csv(sparse, 3);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].polarizations[0] == 0.88);
  CHECK(std::isnan(parsed[0].polarizations[1]));
  CHECK(parsed[1].step == 6);

  std::istringstream junk("5,1,abc\n");
  CHECK_THROWS_AS(read_reports_csv(junk, 3), std::invalid_argument);
  std::istringstream range("5,4,0.1\n");
  CHECK_THROWS_AS(read_reports_csv(range, 3), std::invalid_argument);
}
