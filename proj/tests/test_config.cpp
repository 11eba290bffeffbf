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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hbac/config.hpp"

using namespace hbac;
using config::Json;
using doctest::Approx;

namespace {

const std::filesystem::path kReference = std::filesystem::path(HBAC_SOURCE_DIR) / "config" / "malonic_acid.json";

std::filesystem::path scratch_file(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "hbac_test_config";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("SHA-256") {
  CHECK(config::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(config::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("loading") {
  const auto cfg = config::load(kReference);
  CHECK(cfg.hash.size() == 64);
  std::ifstream in(kReference, std::ios::binary);
  std::stringstream bytes;
  bytes << in.rdbuf();
  CHECK(cfg.hash == config::sha256_hex(bytes.str()));

  CHECK_THROWS_AS(config::load("/nonexistent/hbac.json"), std::invalid_argument);
  CHECK_THROWS_AS(config::load(scratch_file("bad.json", "{\"bath\": ")), std::invalid_argument);
}

TEST_CASE("reference system") {
  const auto tree = config::load(kReference).tree;
  const auto sys = config::spin_system(tree.at("spin_system"));
  CHECK(sys.size() == 5);
  const auto cm = sys.index_of("Cm"), h1 = sys.index_of("Hm1");
  CHECK(sys.coupling(cm, h1) == 19.0);
  // every other carbon-proton coupling stays at or below 2 kHz
  for (std::size_t i = 1; i <= sys.size(); ++i) {
    for (std::size_t j = 1; j <= sys.size(); ++j) {
      if (sys.spins()[i - 1].species == sys.spins()[j - 1].species) continue;
      if ((i == cm && j == h1) || (i == h1 && j == cm)) continue;
      CHECK(std::abs(sys.coupling(i, j)) <= 2.0);
    }
  }

  const auto bath = config::bath(tree.at("bath"));
  CHECK(bath.delivered() == 2.4e-5);

  const auto schedule = config::schedule(tree.at("schedule"));
  const auto six = experiment::ProtocolSchedule::six_step();
  REQUIRE(schedule.steps.size() == six.steps.size());
  for (std::size_t i = 0; i < six.steps.size(); ++i) {
    CHECK(schedule.steps[i].index() == six.steps[i].index());
    if (const auto* g = std::get_if<experiment::GateStep>(&schedule.steps[i])) {
      const auto& want = std::get<experiment::GateStep>(six.steps[i]);
      CHECK(g->perm == want.perm);
      CHECK(g->kind == want.kind);
    } else {
      CHECK(std::get<experiment::RefreshStep>(schedule.steps[i]).qubit ==
            std::get<experiment::RefreshStep>(six.steps[i]).qubit);
    }
  }

  const auto reg = config::spin_system(tree.at("register"));
  CHECK(reg.homonuclear());
  CHECK(config::target_permutation(tree.at("pulse").at("target"), reg.size()) ==
        cooling::swap_gate(1, 2, 2));

  const auto opt = config::optimization(tree.at("optimization"));
  CHECK(opt.segments == 6);
  CHECK(opt.max_duration_ms == 1.3);
  const auto rf = config::rf_distribution(tree.at("rf_distribution"));
  CHECK(rf.points().size() == 5);

  const auto seq = config::toggle_sequence(tree.at("toggle_sequence"));
  CHECK(seq.cycle_time() == Approx(0.04));
}

TEST_CASE("explicit toggle steps") {
  const auto seq = config::toggle_sequence(Json::parse(R"({"steps": [
      {"dwell_ms": 0.01},
      {"dwell_ms": 0.02, "pulse": {"both": {"axis": "y", "angle_deg": 90}}},
      {"dwell_ms": 0.01, "pulse": {"H": {"axis": "x", "angle_rad": 3.141592653589793}}}]})"));
  REQUIRE(seq.steps.size() == 3);
  CHECK(seq.steps[1].pulse.carbon_axis == spin::Axis::Y);
  CHECK(seq.steps[1].pulse.proton_angle == Approx(std::numbers::pi / 2));
  CHECK(seq.steps[2].pulse.carbon_angle == 0.0);
  CHECK(seq.steps[2].pulse.proton_angle == Approx(std::numbers::pi));

  CHECK_THROWS_AS(config::toggle_sequence(Json::parse(R"({"steps": []})")), std::invalid_argument);
  CHECK_THROWS_AS(config::toggle_sequence(Json::parse(R"({"preset": "cory48", "dwell_ms": 1})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(config::toggle_sequence(Json::parse(R"({"steps": [{"dwell_ms": 0.1, "pulse": {"C": {"axis": "w", "angle_deg": 90}}}]})")),
                  std::invalid_argument);
}

TEST_CASE("malformed sections") {
  CHECK_THROWS_AS(config::spin_system(Json::parse(R"({"spins": [{"label": "a", "species": "N"}],
      "shifts_khz": [0], "couplings_khz": [[0]]})")), std::invalid_argument);
  CHECK_THROWS_AS(config::spin_system(Json::parse(R"({"spins": [{"label": "a", "species": "C"}],
      "shifts_khz": [0], "couplings_khz": [[0, 1]]})")), std::invalid_argument);
  CHECK_THROWS_AS(config::bath(Json::parse(R"({"p_bath": 1.5})")), std::invalid_argument);
  CHECK_THROWS_AS(config::bath(Json::parse(R"({"eta": 1})")), std::invalid_argument);
  CHECK_THROWS_AS(config::schedule(Json::parse(R"({"qubits": ["a"], "steps": [{"refresh": "b"}]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(config::schedule(Json::parse(R"({"qubits": ["a", "b"], "steps": [{"flip": "a"}]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(config::error_model(Json::parse(R"({"gate_efficiency": 2})")), std::invalid_argument);
  CHECK_THROWS_AS(config::optimization(Json::parse(R"({"segments": "six"})")), std::invalid_argument);
  CHECK_THROWS_AS(config::rf_distribution(Json::parse(R"({"scales": [1, 1.1], "weights": [1]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(config::target_permutation(Json::parse(R"({"permutation": [0, 1, 2]})"), 2),
                  std::invalid_argument);
  CHECK(config::target_permutation(Json::parse(R"({"compress": [1, 2, 3]})"), 3) ==
        cooling::three_bit_compression(3, 1, 2, 3));
}

TEST_CASE("pulse records round-trip exactly") {
  const pulse::SegmentedPulse p({{0.1234567890123, 3.3333333333333335, -2.718281828459045, 0.1},
                                 {0.7, 1e-3, 0.0, -1.0 / 3.0}});
  const Json meta{{"seed", 7}, {"config_hash", "abc"}};

  const auto j = config::pulse_to_json(p, meta);
  CHECK(j.at("metadata").at("seed") == 7);
  CHECK(config::pulse_from_json(Json::parse(j.dump())) == p);

  std::stringstream csv;
  config::write_pulse_csv(csv, p, meta);
  CHECK(csv.str().rfind("# config_hash: \"abc\"\n", 0) == 0);
  CHECK(config::read_pulse_csv(csv) == p);

  std::istringstream bad("duration_ms,amplitude_khz,phase_rad,offset_khz\n0.1;2;0;0\n");
  CHECK_THROWS_AS(config::read_pulse_csv(bad), std::invalid_argument);
  CHECK_THROWS_AS(config::pulse_from_json(Json::parse(R"({"segments": [{"duration_ms": 1}]})")),
                  std::invalid_argument);
}
