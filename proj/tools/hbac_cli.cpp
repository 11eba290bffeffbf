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

// Command-line front end for the HBAC toolkit.
//
//   hbac [--config FILE] [--out DIR] [--seed N] [--format csv|json] <command> ...
//
// Exit status: 0 success, 1 invalid input, 2 non-convergence or a best-effort
// result below the configured floor.

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "hbac/config.hpp"
#include "hbac/cooling.hpp"
#include "hbac/experiment.hpp"
#include "hbac/pulse.hpp"
#include "hbac/spin.hpp"
#include "plot.hpp"

namespace fs = std::filesystem;
using namespace hbac;
using config::Json;

namespace {

enum Exit : int { kOk = 0, kInvalid = 1, kBestEffort = 2 };

constexpr double kDefaultRefresh = 2.4e-5;

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
};

struct Context {
  Json tree = Json::object();
  std::string hash;
  std::string config_path;
  std::uint64_t seed = 1;
  fs::path out;
  bool json = false;
  std::string command;

  Json meta() const {
    return {{"tool", "hbac"},
            {"command", command},
            {"config", config_path},
            {"config_hash", hash},
            {"seed", seed}};
  }

  bool has(const char* key) const { return tree.contains(key); }
  const Json& section(const char* key) const {
    if (!tree.contains(key)) {
      throw std::invalid_argument(std::string("config needs a '") + key + "' section");
    }
    return tree.at(key);
  }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

struct Report {
  Json summary = Json::object();
  std::vector<std::pair<std::string, Table>> tables;
};

Context make_context(const Common& common, const std::string& command) {
  Context ctx;
  ctx.command = command;
  ctx.json = common.format == "json";
  if (!common.config_path.empty()) {
    auto loaded = config::load(common.config_path);
    ctx.tree = std::move(loaded.tree);
    ctx.hash = loaded.hash;
    ctx.config_path = common.config_path;
  } else {
    ctx.hash = config::sha256_hex("");
  }
  if (common.seed) {
    ctx.seed = *common.seed;
  } else if (ctx.tree.contains("optimization") && ctx.tree["optimization"].contains("seed")) {
    ctx.seed = ctx.tree["optimization"]["seed"].get<std::uint64_t>();
  }
  ctx.out = common.out_dir;
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec || !fs::is_directory(ctx.out)) {
    throw std::invalid_argument("cannot create output directory " + common.out_dir);
  }
  return ctx;
}

std::string csv_cell(const Json& v) {
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isnan(d)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, res.ptr);
  }
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    return quoted + "\"";
  }
  if (v.is_null()) return "nan";
  return v.dump();
}

// nlohmann writes NaN as null already; this keeps the choice explicit.
Json json_value(const Json& v) {
  if (v.is_number_float() && !std::isfinite(v.get<double>())) return nullptr;
  return v;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string csv_header(const Json& meta) {
  std::string s;
  for (const auto& [key, value] : meta.items()) {
    s += "# " + key + ": " + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
  }
  return s;
}

std::vector<std::string> comment_lines(const Json& meta) {
  std::vector<std::string> lines;
  for (const auto& [key, value] : meta.items()) {
    lines.push_back(key + ": " + (value.is_string() ? value.get<std::string>() : value.dump()));
  }
  return lines;
}

void emit(const Context& ctx, const std::string& stem, const Report& report) {
  const Json meta = ctx.meta();
  if (ctx.json) {
    Json doc{{"metadata", meta}, {"summary", Json::object()}, {"tables", Json::object()}};
    for (const auto& [k, v] : report.summary.items()) doc["summary"][k] = json_value(v);
    for (const auto& [name, table] : report.tables) {
      Json rows = Json::array();
      for (const auto& row : table.rows) {
        Json obj = Json::object();
        for (std::size_t c = 0; c < table.columns.size(); ++c) obj[table.columns[c]] = json_value(row[c]);
        rows.push_back(std::move(obj));
      }
      doc["tables"][name] = std::move(rows);
    }
    write_file(ctx.out / (stem + ".json"), doc.dump(2) + "\n");
  } else {
    std::string summary = csv_header(meta) + "key,value\n";
    for (const auto& [k, v] : report.summary.items()) summary += k + "," + csv_cell(v) + "\n";
    write_file(ctx.out / (stem + "_summary.csv"), summary);
    for (const auto& [name, table] : report.tables) {
      std::string text = csv_header(meta);
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        text += (c ? "," : "") + table.columns[c];
      }
      text += "\n";
      for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) text += (c ? "," : "") + csv_cell(row[c]);
        text += "\n";
      }
      write_file(ctx.out / (stem + "_" + name + ".csv"), text);
    }
  }
  for (const auto& [k, v] : report.summary.items()) {
    std::cout << k << ": " << (v.is_string() ? v.get<std::string>() : csv_cell(v)) << "\n";
  }
}

cooling::BathParameters default_bath(const Context& ctx) {
  if (ctx.has("bath")) return config::bath(ctx.tree.at("bath"));
  return cooling::BathParameters(cooling::Polarization(kDefaultRefresh), 1.0);
}

// ---------------------------------------------------------------- ppa

struct PpaArgs {
  std::optional<std::size_t> n;
  std::vector<double> p_refresh;
  std::size_t reset_qubit = 0;
  std::optional<std::size_t> max_rounds;
  std::string sweep;
};

std::pair<std::size_t, std::size_t> parse_sweep(const std::string& text) {
  static const std::regex form(R"(n=(\d+)(?:\.\.(\d+))?)");
  std::smatch m;
  if (!std::regex_match(text, m, form)) {
    throw std::invalid_argument("sweep must look like n=2..6");
  }
  const std::size_t lo = std::stoul(m[1]);
  const std::size_t hi = m[2].matched ? std::stoul(m[2]) : lo;
  if (lo < 1 || hi < lo || hi > cooling::DiagonalState::kMaxQubits) {
    throw std::invalid_argument("sweep range out of bounds");
  }
  return {lo, hi};
}

int cmd_ppa(const Context& ctx, const PpaArgs& args) {
  const Json node = ctx.has("ppa") ? ctx.tree.at("ppa") : Json::object();
  std::vector<double> ps = args.p_refresh;
  if (ps.empty()) ps.push_back(default_bath(ctx).delivered());

  Report report;
  int status = kOk;
  if (!args.sweep.empty()) {
    const auto [lo, hi] = parse_sweep(args.sweep);
    Table t{{"n", "p_refresh", "asymptote", "ratio", "scaling_estimate", "rounds", "converged"}, {}};
    std::size_t failures = 0;
    for (double p : ps) {
      for (std::size_t n = lo; n <= hi; ++n) {
        try {
          const auto a = cooling::asymptotic_polarization(n, p);
          t.rows.push_back({n, p, a.iterated, a.iterated / p, a.regime_estimate, a.rounds, true});
        } catch (const cooling::ConvergenceError& e) {
          std::cerr << "n=" << n << " p=" << p << ": " << e.what() << "\n";
          t.rows.push_back({n, p, std::nan(""), std::nan(""), std::nan(""), 0, false});
          ++failures;
        }
      }
    }
    report.summary = {{"sweep", args.sweep}, {"points", t.rows.size()}, {"failed", failures}};
    report.tables.emplace_back("sweep", std::move(t));
    status = failures ? kBestEffort : kOk;
  } else {
    const std::size_t n = args.n ? *args.n : node.value("n", std::size_t{3});
    const double p = ps.front();
    cooling::PpaOptions opts;
    opts.reset_qubit = args.reset_qubit;
    opts.max_rounds = args.max_rounds ? *args.max_rounds : node.value("max_rounds", opts.max_rounds);
    const auto traj = cooling::run_ppa(n, cooling::BathParameters(cooling::Polarization(p), 1.0), opts);

    Table t{{"round"}, {}};
    for (std::size_t q = 1; q <= n; ++q) t.columns.push_back("p" + std::to_string(q));
    for (std::size_t r = 0; r < traj.rounds.size(); ++r) {
      std::vector<Json> row{r + 1};
      for (double v : traj.rounds[r]) row.push_back(v);
      t.rows.push_back(std::move(row));
    }
    report.summary = {{"n", n},
                      {"p_refresh", p},
                      {"reset_qubit", opts.reset_qubit ? opts.reset_qubit : n},
                      {"rounds", traj.rounds.size()},
                      {"converged", traj.converged},
                      {"asymptote", traj.asymptote},
                      {"asymptote_over_p_refresh", traj.asymptote / p}};

    if (traj.rounds.size() >= 2) {
      plot::LineChart chart;
      chart.title = "Partner-pairing cooling, n = " + std::to_string(n);
      chart.x_label = "round";
      chart.y_label = "polarization / P'";
      chart.comments = comment_lines(ctx.meta());
      chart.y.assign(n, {});
      for (std::size_t q = 0; q < n; ++q) chart.series.push_back("qubit " + std::to_string(q + 1));
      for (const auto& row : t.rows) {
        chart.x.push_back(row[0].get<double>());
        for (std::size_t q = 0; q < n; ++q) chart.y[q].push_back(row[q + 1].get<double>() / p);
      }
      write_file(ctx.out / "ppa_trajectory.svg", plot::line_svg(chart));
    }
    report.tables.emplace_back("trajectory", std::move(t));
    if (!traj.converged) {
      std::cerr << "warning: trajectory did not settle within " << opts.max_rounds << " rounds\n";
      status = kBestEffort;
    }
  }
  emit(ctx, "ppa", report);
  return status;
}

// ---------------------------------------------------------------- spin

struct SpinArgs {
  std::string source;
  std::string target;
  std::optional<double> horizon;
  std::optional<std::size_t> points;
};

spin::Matrix named_hamiltonian(const spin::SpinSystem& sys, const std::string& name) {
  if (name == "natural") return spin::natural_hamiltonian(sys);
  if (name == "exchange") return spin::exchange_hamiltonian(sys);
  if (name == "register") return spin::register_hamiltonian(sys);
  throw std::invalid_argument("average_hamiltonian must be natural, exchange or register");
}

int cmd_spin(const Context& ctx, const SpinArgs& args) {
  const auto sys = config::spin_system(ctx.section("spin_system"));
  const Json node = ctx.has("transfer") ? ctx.tree.at("transfer") : Json::object();
  const std::string src = !args.source.empty() ? args.source : node.value("source", std::string());
  const std::string tgt = !args.target.empty() ? args.target : node.value("target", std::string());
  if (src.empty() || tgt.empty()) {
    throw std::invalid_argument("transfer needs a source and a target spin");
  }
  const std::size_t s = sys.index_of(src), t = sys.index_of(tgt);
  const double horizon = args.horizon ? *args.horizon : node.value("horizon_ms", 0.1);
  const std::size_t points = args.points ? *args.points : node.value("points", std::size_t{201});
  if (!(horizon > 0.0) || points < 2) {
    throw std::invalid_argument("transfer curve needs a positive horizon and at least two points");
  }

  Report report;
  Table curve{{"t_ms", "efficiency"}, {}};
  plot::LineChart chart;
  chart.title = "Polarization transfer " + src + " -> " + tgt;
  chart.x_label = "t (ms)";
  chart.y_label = "efficiency";
  chart.comments = comment_lines(ctx.meta());
  chart.y.assign(1, {});
  for (std::size_t i = 0; i < points; ++i) {
    const double time = horizon * double(i) / double(points - 1);
    const double eta = spin::transfer_efficiency(sys, s, t, time);
    curve.rows.push_back({time, eta});
    chart.x.push_back(time);
    chart.y[0].push_back(eta);
  }
  const auto peak = spin::optimal_transfer_time(sys, s, t, horizon);
  report.summary = {{"source", src},
                    {"target", tgt},
                    {"tau_ms", peak.time_ms},
                    {"efficiency_at_tau", peak.efficiency}};
  report.tables.emplace_back("transfer", std::move(curve));

  if (ctx.has("toggle_sequence")) {
    const auto seq = config::toggle_sequence(ctx.tree.at("toggle_sequence"));
    const std::string which = ctx.tree.value("average_hamiltonian", std::string("natural"));
    const auto avg = spin::toggling_average(sys, named_hamiltonian(sys, which), seq);
    Table dump{{"row", "col", "re", "im"}, {}};
    for (Eigen::Index r = 0; r < avg.rows(); ++r) {
      for (Eigen::Index c = 0; c < avg.cols(); ++c) {
        dump.rows.push_back({r, c, avg(r, c).real(), avg(r, c).imag()});
      }
    }
    report.summary["average_hamiltonian"] = which;
    report.summary["cycle_time_ms"] = seq.cycle_time();
    if (which == "natural") {
      report.summary["max_deviation_from_exchange"] =
          (avg - spin::exchange_hamiltonian(sys)).cwiseAbs().maxCoeff();
    }
    report.tables.emplace_back("average", std::move(dump));
  }
  write_file(ctx.out / "spin_transfer.svg", plot::line_svg(chart));
  emit(ctx, "spin", report);
  return kOk;
}

// ---------------------------------------------------------------- pulse

struct PulseArgs {
  std::optional<std::size_t> segments;
  std::optional<std::size_t> restarts;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> threads;
};

int cmd_pulse(const Context& ctx, const PulseArgs& args) {
  const auto sys = config::spin_system(ctx.section("register"));
  const auto& pulse_node = ctx.section("pulse");
  if (!pulse_node.contains("target")) throw std::invalid_argument("pulse needs a target");
  const auto target = config::target_permutation(pulse_node.at("target"), sys.size());
  auto cfg = config::optimization(ctx.has("optimization") ? ctx.tree.at("optimization") : Json::object());
  cfg.seed = ctx.seed;
  if (args.segments) cfg.segments = *args.segments;
  if (args.restarts) cfg.restarts = *args.restarts;
  if (args.budget) cfg.budget = *args.budget;
  if (args.threads) cfg.threads = *args.threads;
  const auto dist = config::rf_distribution(ctx.has("rf_distribution") ? ctx.tree.at("rf_distribution")
                                                                        : Json::object());

  const auto res = pulse::optimize_pulse(sys, target, cfg, dist);

  const pulse::PulseSimulator sim(sys);
  const auto unitary = pulse::permutation_unitary(target);
  Json rf = Json::array();
  for (const auto& p : dist.points()) {
    rf.push_back({{"scale", p.scale},
                  {"weight", p.weight},
                  {"fidelity", pulse::entanglement_fidelity(unitary, sim.propagator(res.pulse, p.scale))}});
  }
  Json meta = ctx.meta();
  meta["mean_fidelity"] = res.fidelity;
  meta["worst_fidelity"] = res.worst_fidelity;
  meta["objective"] = res.objective;
  meta["evaluations"] = res.evaluations;
  meta["reached_floor"] = res.reached_floor;
  meta["fidelity_floor"] = cfg.fidelity_floor;
  meta["duration_ms"] = res.pulse.duration();
  meta["mean_amplitude_khz"] = res.pulse.mean_amplitude();
  meta["segments"] = cfg.segments;
  meta["restarts"] = cfg.restarts;
  meta["budget"] = cfg.budget;
  meta["rf_points"] = rf;

  if (ctx.json) {
    write_file(ctx.out / "pulse.json", config::pulse_to_json(res.pulse, meta).dump(2) + "\n");
  } else {
    std::ostringstream out;
    config::write_pulse_csv(out, res.pulse, meta);
    write_file(ctx.out / "pulse.csv", out.str());
  }
  std::cout << "mean_fidelity: " << csv_cell(res.fidelity) << "\n"
            << "worst_fidelity: " << csv_cell(res.worst_fidelity) << "\n"
            << "duration_ms: " << csv_cell(res.pulse.duration()) << "\n"
            << "mean_amplitude_khz: " << csv_cell(res.pulse.mean_amplitude()) << "\n"
            << "evaluations: " << res.evaluations << "\n";
  if (!res.reached_floor) {
    std::cerr << "best effort: mean fidelity below " << cfg.fidelity_floor << "\n";
    return kBestEffort;
  }
  return kOk;
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
  bool ideal = false;
  std::string fit;
  bool tie_compression = false;
};

int cmd_experiment(const Context& ctx, const ExperimentArgs& args) {
  const auto schedule = ctx.has("schedule") ? config::schedule(ctx.tree.at("schedule"))
                                            : experiment::ProtocolSchedule::six_step();
  const auto bath = default_bath(ctx);

  experiment::ErrorModel model = experiment::ErrorModel::ideal();
  std::vector<experiment::StepReport> observed;
  Report report;
  std::string mode = "ideal";
  if (!args.fit.empty()) {
    std::ifstream in(args.fit);
    if (!in) throw std::invalid_argument("cannot open data file " + args.fit);
    observed = experiment::read_reports_csv(in, schedule.qubits);
    experiment::FitOptions opts;
    opts.tie_compression_to_gate = args.tie_compression;
    if (ctx.has("error_model")) {
      opts.compression_efficiency = config::error_model(ctx.tree.at("error_model")).compression_efficiency;
    }
    const auto fit = experiment::fit_error_model(schedule, bath, observed, opts);
    model = fit.model;
    mode = "fit";
    report.summary["data"] = args.fit;
    report.summary["observations"] = fit.observations;
    report.summary["rms_residual"] = fit.rms_residual;
    report.summary["tied_compression"] = args.tie_compression;
  } else if (!args.ideal && ctx.has("error_model")) {
    model = config::error_model(ctx.tree.at("error_model"));
    mode = "model";
  }

  const auto ideal = experiment::run_protocol(schedule, bath, experiment::ErrorModel::ideal());
  const auto run = experiment::run_protocol(schedule, bath, model);
  const auto summary = experiment::protocol_fidelity(run, ideal.back().polarizations.front());

  std::vector<std::vector<double>> obs(schedule.steps.size(),
                                       std::vector<double>(schedule.qubits, std::nan("")));
  auto unc = obs;
  for (const auto& r : observed) {
    for (std::size_t q = 0; q < schedule.qubits; ++q) {
      obs[r.step - 1][q] = r.polarizations[q];
      unc[r.step - 1][q] = q < r.uncertainty.size() ? r.uncertainty[q] : std::nan("");
    }
  }

  Table steps{{"step", "label", "qubit", "ideal", "model", "observed", "uncertainty"}, {}};
  for (std::size_t i = 0; i < run.size(); ++i) {
    for (std::size_t q = 0; q < schedule.qubits; ++q) {
      const std::string label = schedule.labels.empty() ? std::to_string(q + 1) : schedule.labels[q];
      steps.rows.push_back({run[i].step, run[i].label, label, ideal[i].polarizations[q],
                            run[i].polarizations[q], obs[i][q], unc[i][q]});
    }
  }

  // The plot reads back the table rows so it always matches the CSV.
  plot::BarChart chart;
  chart.title = "Polarization per step (units of P')";
  chart.y_label = "polarization / P'";
  chart.comments = comment_lines(ctx.meta());
  for (std::size_t q = 0; q < schedule.qubits; ++q) {
    chart.series.push_back(steps.rows[q][2].get<std::string>());
  }
  for (std::size_t i = 0; i < run.size(); ++i) {
    plot::BarGroup g;
    g.label = "step " + std::to_string(i + 1);
    for (std::size_t q = 0; q < schedule.qubits; ++q) {
      const auto& row = steps.rows[i * schedule.qubits + q];
      auto number = [](const Json& v) { return v.is_number() ? v.get<double>() : std::nan(""); };
      g.ideal.push_back(number(row[3]));
      g.model.push_back(number(row[4]));
      g.observed.push_back(number(row[5]));
      g.uncertainty.push_back(number(row[6]));
    }
    chart.groups.push_back(std::move(g));
  }
  write_file(ctx.out / "experiment_bars.svg", plot::grouped_bar_svg(chart));

  report.summary["mode"] = mode;
  report.summary["refresh_decay"] = model.refresh_decay;
  report.summary["gate_efficiency"] = model.gate_efficiency;
  report.summary["compression_efficiency"] = model.compression_efficiency;
  report.summary["final_polarization"] = run.back().polarizations.front();
  report.summary["fidelity"] = summary.fidelity;
  report.summary["per_step_error"] = summary.per_step_error;
  report.summary["boost"] = summary.boost;
  report.tables.emplace_back("steps", std::move(steps));
  emit(ctx, "experiment", report);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat-bath algorithmic cooling toolkit"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "JSON configuration file");
  app.add_option("--out", common.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", common.seed, "random seed (defaults to optimization.seed, then 1)");
  app.add_option("--format", common.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  PpaArgs ppa_args;
  auto* ppa = app.add_subcommand("ppa", "partner-pairing cooling trajectories and limits");
  ppa->add_option("--n", ppa_args.n, "register size")->check(CLI::Range(1, 24));
  ppa->add_option("--p-refresh", ppa_args.p_refresh, "refresh polarization P' (several for a sweep)")
      ->check(CLI::Range(0.0, 1.0));
  ppa->add_option("--reset-qubit", ppa_args.reset_qubit, "qubit refreshed each round (default n)");
  ppa->add_option("--max-rounds", ppa_args.max_rounds, "round limit");
  ppa->add_option("--sweep", ppa_args.sweep, "asymptote table over a size range, e.g. n=2..6");

  SpinArgs spin_args;
  auto* spin_cmd = app.add_subcommand("spin", "transfer curve, swap time and average Hamiltonian");
  spin_cmd->add_option("--source", spin_args.source, "spin label the polarization starts on");
  spin_cmd->add_option("--target", spin_args.target, "spin label it is moved to");
  spin_cmd->add_option("--horizon", spin_args.horizon, "curve length in ms");
  spin_cmd->add_option("--points", spin_args.points, "curve samples");

  PulseArgs pulse_args;
  auto* pulse_cmd = app.add_subcommand("pulse", "design a robust register pulse");
  pulse_cmd->add_option("--segments", pulse_args.segments, "piecewise-constant segments");
  pulse_cmd->add_option("--restarts", pulse_args.restarts, "random starts");
  pulse_cmd->add_option("--budget", pulse_args.budget, "objective evaluations per start");
  pulse_cmd->add_option("--threads", pulse_args.threads, "worker threads (0 = all cores)");

  ExperimentArgs exp_args;
  auto* exp_cmd = app.add_subcommand("experiment", "six-step protocol with an error model");
  auto* ideal_flag = exp_cmd->add_flag("--ideal", exp_args.ideal, "error-free protocol");
  exp_cmd->add_option("--fit", exp_args.fit, "fit the error model to a step,qubit,polarization CSV")
      ->excludes(ideal_flag);
  exp_cmd->add_flag("--tie-compression", exp_args.tie_compression,
                    "use the swap efficiency for the compression gate as well");

  for (auto* sub : {ppa, spin_cmd, pulse_cmd, exp_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }

  try {
    if (*ppa) return cmd_ppa(make_context(common, "ppa"), ppa_args);
    if (*spin_cmd) return cmd_spin(make_context(common, "spin"), spin_args);
    if (*pulse_cmd) return cmd_pulse(make_context(common, "pulse"), pulse_args);
    if (*exp_cmd) return cmd_experiment(make_context(common, "experiment"), exp_args);
  } catch (const cooling::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBestEffort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
