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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using doctest::Approx;

namespace {

const fs::path kSource = HBAC_SOURCE_DIR;
const std::string kCli = HBAC_CLI;
const std::string kReference = (kSource / "config" / "malonic_acid.json").string();

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "hbac_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> summary(const fs::path& path) {
  std::map<std::string, std::string> out;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line == "key,value") continue;
    const auto comma = line.find(',');
    out[line.substr(0, comma)] = line.substr(comma + 1);
  }
  return out;
}

std::vector<std::vector<std::string>> rows(const fs::path& path) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(slurp(path));
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto path = dir / "config.json";
  std::ofstream(path) << text;
  return path;
}

const char* kPairConfig = R"({
  "spin_system": {"spins": [{"label": "C", "species": "C"}, {"label": "H", "species": "H"}],
                  "shifts_khz": [0, 0], "couplings_khz": [[0, 19], [19, 0]]},
  "transfer": {"source": "H", "target": "C", "horizon_ms": 0.1, "points": 51},
  "toggle_sequence": {"preset": "balanced_xyz", "dwell_ms": 0.005}
})";

const char* kFlipConfig = R"({
  "register": {"spins": [{"label": "C", "species": "C"}], "shifts_khz": [0], "couplings_khz": [[0]]},
  "pulse": {"target": {"permutation": [1, 0]}},
  "optimization": {"segments": 1, "restarts": 2, "budget": 2000, "optimize_offsets": false},
  "rf_distribution": {"scales": [1.0], "weights": [1.0]}
})";

}  // namespace

TEST_CASE("ppa command") {
  const auto dir = fresh_dir("ppa");
  REQUIRE(run("--out " + dir.string() + " ppa --n 3 --p-refresh 2.4e-5") == 0);
  const auto s = summary(dir / "ppa_summary.csv");
  CHECK(std::stod(s.at("asymptote")) == Approx(4.8e-5).epsilon(1e-3));
  CHECK(s.at("converged") == "true");
  CHECK(fs::exists(dir / "ppa_trajectory.csv"));
  CHECK(fs::exists(dir / "ppa_trajectory.svg"));

  SUBCASE("single qubit") {
    const auto one = fresh_dir("ppa_one");
    REQUIRE(run("--out " + one.string() + " ppa --n 1") == 0);
    CHECK(summary(one / "ppa_summary.csv").at("rounds") == "1");
    CHECK(rows(one / "ppa_trajectory.csv").size() == 1);
  }
  SUBCASE("sweep") {
    const auto sw = fresh_dir("ppa_sweep");
    REQUIRE(run("--out " + sw.string() + " ppa --sweep n=2..6 --p-refresh 1e-6") == 0);
    const auto table = rows(sw / "ppa_sweep.csv");
    REQUIRE(table.size() == 5);
    double want = 1.0;
    for (const auto& r : table) {
      CHECK(std::stod(r[3]) == Approx(want).epsilon(1e-2));
      want *= 2.0;
    }
  }
  SUBCASE("round limit and bad input") {
    const auto lim = fresh_dir("ppa_limit");
    CHECK(run("--out " + lim.string() + " ppa --n 4 --max-rounds 3") == 2);
    CHECK(summary(lim / "ppa_summary.csv").at("converged") == "false");
    CHECK(run("--out " + lim.string() + " ppa --n 0") == 1);
    CHECK(run("--out " + lim.string() + " ppa --sweep n=5..2") == 1);
    CHECK(run("--out " + lim.string() + " --format xml ppa") == 1);
    CHECK(run("--out " + lim.string() + " --config /nonexistent.json ppa") == 1);
  }
}

TEST_CASE("spin command") {
  const auto dir = fresh_dir("spin");
  const auto cfg = write_config(dir, kPairConfig);
  REQUIRE(run("--config " + cfg.string() + " --out " + dir.string() + " --format json spin") == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "spin.json"));
  CHECK(doc["summary"]["tau_ms"].get<double>() == Approx(3.0 / 76.0).epsilon(1e-6));
  CHECK(doc["summary"]["efficiency_at_tau"].get<double>() == Approx(1.0).epsilon(1e-6));
  CHECK(doc["summary"]["max_deviation_from_exchange"].get<double>() < 1e-12);
  CHECK(doc["tables"]["transfer"].size() == 51);
  CHECK(doc["tables"]["average"].size() == 16);
  CHECK(doc["metadata"]["config_hash"].get<std::string>().size() == 64);

  const auto empty = fresh_dir("spin_empty");
  const auto bad = write_config(empty, R"({
    "spin_system": {"spins": [{"label": "C", "species": "C"}, {"label": "H", "species": "H"}],
                    "shifts_khz": [0, 0], "couplings_khz": [[0, 19], [19, 0]]},
    "transfer": {"source": "H", "target": "C"},
    "toggle_sequence": {"steps": []}})");
  CHECK(run("--config " + bad.string() + " --out " + empty.string() + " spin") == 1);
  CHECK(run("--out " + empty.string() + " spin") == 1);

  const auto ref = fresh_dir("spin_reference");
  REQUIRE(run("--config " + kReference + " --out " + ref.string() + " spin") == 0);
  const auto s = summary(ref / "spin_summary.csv");
  // weak spectators shift the peak slightly and keep it above 0.9
  CHECK(std::stod(s.at("efficiency_at_tau")) > 0.9);
  CHECK(std::stod(s.at("tau_ms")) == Approx(3.0 / 76.0).epsilon(0.05));
}

TEST_CASE("pulse command") {
  const auto a = fresh_dir("pulse_a"), b = fresh_dir("pulse_b");
  const std::string small = " pulse --restarts 2 --budget 1500";
  CHECK(run("--config " + kReference + " --seed 5 --out " + a.string() + small) == 2);
  CHECK(run("--config " + kReference + " --seed 5 --out " + b.string() + small + " --threads 2") == 2);
  const auto text = slurp(a / "pulse.csv");
  CHECK(text == slurp(b / "pulse.csv"));
  CHECK(text.find("# seed: 5") != std::string::npos);
  CHECK(text.find("# config_hash: ") != std::string::npos);
  CHECK(text.find("# worst_fidelity: ") != std::string::npos);

  const auto c = fresh_dir("pulse_c");
  const auto cfg = write_config(c, kFlipConfig);
  REQUIRE(run("--config " + cfg.string() + " --out " + c.string() + " --format json pulse") == 0);
  const auto doc = nlohmann::json::parse(slurp(c / "pulse.json"));
  CHECK(doc["metadata"]["mean_fidelity"].get<double>() > 0.999);
  CHECK(doc["metadata"]["reached_floor"].get<bool>());
  CHECK(doc["segments"].size() == 1);

  const auto d = fresh_dir("pulse_d");
  CHECK(run("--out " + d.string() + " pulse") == 1);
}

TEST_CASE("experiment command") {
  const auto dir = fresh_dir("experiment");
  REQUIRE(run("--config " + kReference + " --out " + dir.string() + " experiment --ideal") == 0);
  const auto s = summary(dir / "experiment_summary.csv");
  CHECK(std::stod(s.at("final_polarization")) == Approx(1.5).epsilon(1e-6));
  const auto svg = slurp(dir / "experiment_bars.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("config_hash: ") != std::string::npos);
  CHECK(rows(dir / "experiment_steps.csv").size() == 18);

  const auto fit = fresh_dir("experiment_fit");
  const auto data = (kSource / "config" / "observed_steps.csv").string();
  REQUIRE(run("--config " + kReference + " --out " + fit.string() + " experiment --fit " + data) == 0);
  const auto f = summary(fit / "experiment_summary.csv");
  CHECK(std::stod(f.at("boost")) == Approx(0.48).epsilon(0.03 / 0.48));
  CHECK(std::stod(f.at("fidelity")) == Approx(0.81).epsilon(0.01 / 0.81));

  CHECK(run("--out " + fit.string() + " experiment --fit /nonexistent/data.csv") == 1);
  CHECK(run("--out " + fit.string() + " experiment --ideal --fit " + data) == 1);

  SUBCASE("identical invocations give identical files") {
    const auto again = fresh_dir("experiment_again");
    REQUIRE(run("--config " + kReference + " --out " + again.string() + " experiment --fit " + data) == 0);
    for (const char* name : {"experiment_summary.csv", "experiment_steps.csv", "experiment_bars.svg"}) {
      CHECK(slurp(fit / name) == slurp(again / name));
    }
  }
}
