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

// JSON configuration tree shared by every subcommand, plus pulse record I/O.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hbac/cooling.hpp"
#include "hbac/experiment.hpp"
#include "hbac/pulse.hpp"
#include "hbac/spin.hpp"

namespace hbac::config {

using Json = nlohmann::json;

struct LoadedConfig {
  Json tree;
  std::string hash;  // SHA-256 of the file bytes, hex
};

LoadedConfig load(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);

/// {"spins": [{"label": "Cm", "species": "C"}, ...],
///  "shifts_khz": [...], "couplings_khz": [[...], ...]}
spin::SpinSystem spin_system(const Json& node);

/// {"preset": "balanced_xyz" | "x_spin_lock", "dwell_ms": t} or
/// {"steps": [{"dwell_ms": t, "pulse": {"both" | "C" | "H": {"axis": "x",
///  "angle_deg": 90}}}, ...]}
spin::ToggleSequence toggle_sequence(const Json& node);

/// {"p_bath": P_H, "eta": eta}
cooling::BathParameters bath(const Json& node);

/// {"refresh_decay": c, "gate_efficiency": g, "compression_efficiency": g3}
experiment::ErrorModel error_model(const Json& node);

/// {"qubits": ["C1", "C2", "Cm"], "steps": [{"refresh": "Cm"},
///  {"swap": ["Cm", "C2"]}, {"compress": ["C1", "C2", "Cm"]}]}
experiment::ProtocolSchedule schedule(const Json& node);

/// {"swap": [i, j]}, {"compress": [target, a, b]} or {"permutation": [...]}
/// on an n-qubit register, qubits 1-based.
cooling::Permutation target_permutation(const Json& node, std::size_t qubits);

/// Fields of OptimizationConfig by name; missing keys keep their defaults.
pulse::OptimizationConfig optimization(const Json& node);

/// {"points": 5, "sigma": 0.062} or {"scales": [...], "weights": [...]}
pulse::RFDistribution rf_distribution(const Json& node);

Json pulse_to_json(const pulse::SegmentedPulse& pulse, const Json& metadata);
pulse::SegmentedPulse pulse_from_json(const Json& node);

/// Metadata lines prefixed with '#', then
/// duration_ms,amplitude_khz,phase_rad,offset_khz.
void write_pulse_csv(std::ostream& out, const pulse::SegmentedPulse& pulse,
                     const Json& metadata);
pulse::SegmentedPulse read_pulse_csv(std::istream& in);

}  // namespace hbac::config
