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

#include "hbac/config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hbac::config {

namespace {

constexpr double kDegree = std::numbers::pi / 180.0;

const Json& require(const Json& node, const char* key) {
  if (!node.is_object() || !node.contains(key)) {
    throw std::invalid_argument(std::string("config is missing '") + key + "'");
  }
  return node.at(key);
}

template <typename T>
T get_or(const Json& node, const char* key, T fallback) {
  return node.contains(key) ? node.at(key).get<T>() : fallback;
}

std::size_t qubit_by_label(const std::vector<std::string>& labels, const Json& ref) {
  if (ref.is_number_unsigned()) return ref.get<std::size_t>();
  const auto name = ref.get<std::string>();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == name) return i + 1;
  }
  throw std::invalid_argument("schedule refers to unknown qubit '" + name + "'");
}

void rotation_for(const Json& node, spin::Axis& axis, double& angle) {
  axis = spin::parse_axis(require(node, "axis").get<std::string>());
  angle = node.contains("angle_deg") ? node.at("angle_deg").get<double>() * kDegree
                                     : require(node, "angle_rad").get<double>();
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  }
  return hex.str();
}

LoadedConfig load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  LoadedConfig cfg;
  const auto text = buf.str();
  try {
    cfg.tree = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("malformed config " + path.string() + ": " + e.what());
  }
  cfg.hash = sha256_hex(text);
  return cfg;
}

spin::SpinSystem spin_system(const Json& node) {
  try {
    std::vector<spin::Spin> spins;
    for (const auto& s : require(node, "spins")) {
      spins.push_back({require(s, "label").get<std::string>(),
                       spin::parse_species(require(s, "species").get<std::string>())});
    }
    auto shifts = node.contains("shifts_khz") ? node.at("shifts_khz").get<std::vector<double>>()
                                              : std::vector<double>(spins.size(), 0.0);
    const auto& table = require(node, "couplings_khz");
    const auto m = Eigen::Index(spins.size());
    Eigen::MatrixXd couplings = Eigen::MatrixXd::Zero(m, m);
    if (std::size_t(table.size()) != spins.size()) {
      throw std::invalid_argument("coupling table has the wrong number of rows");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto row = table.at(i).get<std::vector<double>>();
      if (Eigen::Index(row.size()) != m) {
        throw std::invalid_argument("coupling table row has the wrong length");
      }
      for (Eigen::Index j = 0; j < m; ++j) couplings(i, j) = row[j];
    }
    return spin::SpinSystem(std::move(spins), std::move(shifts), std::move(couplings));
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed spin system: ") + e.what());
  }
}

spin::ToggleSequence toggle_sequence(const Json& node) {
  try {
    if (node.contains("preset")) {
      const auto preset = node.at("preset").get<std::string>();
      const double dwell = require(node, "dwell_ms").get<double>();
      if (preset == "balanced_xyz") return spin::balanced_xyz_sequence(dwell);
      if (preset == "x_spin_lock") return spin::x_spin_lock_sequence(dwell);
      throw std::invalid_argument("unknown toggle preset '" + preset + "'");
    }
    spin::ToggleSequence seq;
    for (const auto& step : require(node, "steps")) {
      spin::ToggleStep ts;
      ts.dwell_ms = require(step, "dwell_ms").get<double>();
      if (step.contains("pulse")) {
        const auto& p = step.at("pulse");
        if (p.contains("both")) {
          rotation_for(p.at("both"), ts.pulse.carbon_axis, ts.pulse.carbon_angle);
          ts.pulse.proton_axis = ts.pulse.carbon_axis;
          ts.pulse.proton_angle = ts.pulse.carbon_angle;
        }
        if (p.contains("C")) rotation_for(p.at("C"), ts.pulse.carbon_axis, ts.pulse.carbon_angle);
        if (p.contains("H")) rotation_for(p.at("H"), ts.pulse.proton_axis, ts.pulse.proton_angle);
      }
      seq.steps.push_back(ts);
    }
    if (seq.steps.empty()) throw std::invalid_argument("toggle sequence is empty");
    return seq;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed toggle sequence: ") + e.what());
  }
}

cooling::BathParameters bath(const Json& node) {
  try {
    return cooling::BathParameters(cooling::Polarization(require(node, "p_bath").get<double>()),
                                   get_or(node, "eta", 1.0));
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed bath: ") + e.what());
  }
}

experiment::ErrorModel error_model(const Json& node) {
  try {
    experiment::ErrorModel m;
    m.refresh_decay = get_or(node, "refresh_decay", 0.0);
    m.gate_efficiency = get_or(node, "gate_efficiency", 1.0);
    m.compression_efficiency = get_or(node, "compression_efficiency", 1.0);
    m.validate();
    return m;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed error model: ") + e.what());
  }
}

experiment::ProtocolSchedule schedule(const Json& node) {
  try {
    experiment::ProtocolSchedule s;
    s.labels = require(node, "qubits").get<std::vector<std::string>>();
    s.qubits = s.labels.size();
    if (s.qubits == 0 || s.qubits > cooling::DiagonalState::kMaxQubits) {
      throw std::invalid_argument("schedule qubit count out of range");
    }
    for (const auto& step : require(node, "steps")) {
      if (step.contains("refresh")) {
        s.steps.push_back(experiment::RefreshStep{qubit_by_label(s.labels, step.at("refresh"))});
      } else if (step.contains("swap")) {
        const auto& q = step.at("swap");
        const auto a = qubit_by_label(s.labels, q.at(0));
        const auto b = qubit_by_label(s.labels, q.at(1));
        s.steps.push_back(experiment::GateStep{
            "swap(" + s.labels[a - 1] + "," + s.labels[b - 1] + ")", experiment::GateKind::Swap,
            cooling::swap_gate(a, b, s.qubits)});
      } else if (step.contains("compress")) {
        const auto& q = step.at("compress");
        const auto t = qubit_by_label(s.labels, q.at(0));
        const auto a = qubit_by_label(s.labels, q.at(1));
        const auto b = qubit_by_label(s.labels, q.at(2));
        s.steps.push_back(experiment::GateStep{
            "3BC(" + s.labels[t - 1] + ";" + s.labels[a - 1] + "," + s.labels[b - 1] + ")",
            experiment::GateKind::Compression, cooling::three_bit_compression(s.qubits, t, a, b)});
      } else {
        throw std::invalid_argument("schedule step must be refresh, swap or compress");
      }
    }
    s.validate();
    return s;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed schedule: ") + e.what());
  }
}

cooling::Permutation target_permutation(const Json& node, std::size_t qubits) {
  try {
    if (node.contains("swap")) {
      const auto& q = node.at("swap");
      return cooling::swap_gate(q.at(0).get<std::size_t>(), q.at(1).get<std::size_t>(), qubits);
    }
    if (node.contains("compress")) {
      const auto& q = node.at("compress");
      return cooling::three_bit_compression(qubits, q.at(0).get<std::size_t>(),
                                            q.at(1).get<std::size_t>(), q.at(2).get<std::size_t>());
    }
    const auto map = require(node, "permutation").get<std::vector<std::uint32_t>>();
    if (map.size() != (std::size_t{1} << qubits)) {
      throw std::invalid_argument("target permutation does not match the register size");
    }
    return cooling::Permutation(map);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed pulse target: ") + e.what());
  }
}

pulse::OptimizationConfig optimization(const Json& node) {
  try {
    pulse::OptimizationConfig c;
    c.segments = get_or(node, "segments", c.segments);
    c.restarts = get_or(node, "restarts", c.restarts);
    c.budget = get_or(node, "budget", c.budget);
    c.seed = get_or(node, "seed", c.seed);
    c.tolerance = get_or(node, "tolerance", c.tolerance);
    c.amplitude_penalty = get_or(node, "amplitude_penalty", c.amplitude_penalty);
    c.duration_penalty = get_or(node, "duration_penalty", c.duration_penalty);
    c.amplitude_floor_khz = get_or(node, "amplitude_floor_khz", c.amplitude_floor_khz);
    c.max_duration_ms = get_or(node, "max_duration_ms", c.max_duration_ms);
    c.min_start_duration_ms = get_or(node, "min_start_duration_ms", c.min_start_duration_ms);
    c.max_start_duration_ms = get_or(node, "max_start_duration_ms", c.max_start_duration_ms);
    c.optimize_offsets = get_or(node, "optimize_offsets", c.optimize_offsets);
    c.fidelity_floor = get_or(node, "fidelity_floor", c.fidelity_floor);
    c.threads = get_or(node, "threads", c.threads);
    return c;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed optimizer config: ") + e.what());
  }
}

pulse::RFDistribution rf_distribution(const Json& node) {
  try {
    if (node.contains("scales")) {
      const auto scales = node.at("scales").get<std::vector<double>>();
      const auto weights = require(node, "weights").get<std::vector<double>>();
      if (scales.size() != weights.size()) {
        throw std::invalid_argument("RF scales and weights differ in length");
      }
      std::vector<pulse::RFPoint> pts;
      for (std::size_t i = 0; i < scales.size(); ++i) pts.push_back({scales[i], weights[i]});
      return pulse::RFDistribution(std::move(pts));
    }
    return pulse::RFDistribution::gaussian(get_or<std::size_t>(node, "points", 5),
                                           get_or(node, "sigma", 0.062));
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed RF distribution: ") + e.what());
  }
}

Json pulse_to_json(const pulse::SegmentedPulse& pulse, const Json& metadata) {
  Json segs = Json::array();
  for (const auto& s : pulse.segments()) {
    segs.push_back({{"duration_ms", s.duration_ms},
                    {"amplitude_khz", s.amplitude_khz},
                    {"phase_rad", s.phase_rad},
                    {"offset_khz", s.offset_khz}});
  }
  return {{"metadata", metadata}, {"segments", segs}};
}

pulse::SegmentedPulse pulse_from_json(const Json& node) {
  try {
    std::vector<pulse::PulseSegment> segs;
    for (const auto& s : require(node, "segments")) {
      segs.push_back({require(s, "duration_ms").get<double>(),
                      require(s, "amplitude_khz").get<double>(),
                      get_or(s, "phase_rad", 0.0), get_or(s, "offset_khz", 0.0)});
    }
    return pulse::SegmentedPulse(std::move(segs));
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed pulse record: ") + e.what());
  }
}

void write_pulse_csv(std::ostream& out, const pulse::SegmentedPulse& pulse,
                     const Json& metadata) {
  for (const auto& [key, value] : metadata.items()) {
    out << "# " << key << ": " << value.dump() << '\n';
  }
  out << "duration_ms,amplitude_khz,phase_rad,offset_khz\n";
  std::ostringstream row;
  row << std::setprecision(17);
  for (const auto& s : pulse.segments()) {
    row.str("");
    row << s.duration_ms << ',' << s.amplitude_khz << ',' << s.phase_rad << ',' << s.offset_khz
        << '\n';
    out << row.str();
  }
}

pulse::SegmentedPulse read_pulse_csv(std::istream& in) {
  std::vector<pulse::PulseSegment> segs;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("duration_ms", 0) == 0) continue;
    }
    std::stringstream ss(line);
    pulse::PulseSegment s;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ss >> s.duration_ms >> c1 >> s.amplitude_khz >> c2 >> s.phase_rad >> c3 >>
          s.offset_khz) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw std::invalid_argument("malformed pulse row: " + line);
    }
    segs.push_back(s);
  }
  return pulse::SegmentedPulse(std::move(segs));
}

}  // namespace hbac::config
