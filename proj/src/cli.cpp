// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#include "qramp/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qramp/version.hpp"

namespace qramp {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

nlohmann::json parse_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ValidationError("--set expects key=value, got '" + kv + "'");
  const std::string key = kv.substr(0, eq);
  const std::string value = kv.substr(eq + 1);
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(value);
  } catch (const nlohmann::json::parse_error&) {
    parsed = value;  // bare strings stay strings
  }
  return nlohmann::json{{key, parsed}};
}

}  // namespace

RunConfig RunConfig::from_file(const std::filesystem::path& path,
                               const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed config " + path.string() + ": " +
                          e.what());
  }
  for (const auto& kv : overrides) {
    const nlohmann::json patch = parse_override(kv);
    for (auto it = patch.begin(); it != patch.end(); ++it)
      doc[it.key()] = it.value();
  }
  return from_json(std::move(doc));
}

RunConfig RunConfig::from_json(nlohmann::json merged) {
  require(merged.is_object(), "config must be a JSON object");
  return RunConfig{std::move(merged)};
}

Scenario RunConfig::scenario() const {
  require(has("model"), "config: missing 'model'");
  require(has("g1") && has("g2"), "config: missing 'g1'/'g2'");
  require(has("g_min") && has("g_max"), "config: missing 'g_min'/'g_max'");

  nlohmann::json j;
  j["model"] = get<std::string>("model");
  j["g1"] = get<double>("g1");
  j["g2"] = get<double>("g2");
  j["range"] = {get<double>("g_min"), get<double>("g_max")};
  const std::string family = j["model"];
  if (family == "two_qubit") {
    j["delta"] = get_or<double>("delta", 1.0);
    j["fidelity_mode"] = get_or<std::string>("fidelity_mode", "pure");
  } else if (family == "two_component") {
    j["mass_ratio"] = get_or<double>("mass_ratio", 40.0 / 6.0);
    j["cutoff_c"] = get_or<int>("cutoff_c", 14);
    j["fidelity_mode"] = get_or<std::string>("fidelity_mode", "pure");
  } else if (family == "three_component") {
    j["mass_ratio"] = get_or<double>("mass_ratio", 40.0 / 6.0);
    j["cutoff_c"] = get_or<int>("cutoff_c", 14);
    j["cutoff_k"] = get_or<int>("cutoff_k", 2);
    j["g_spectator"] = get_or<double>("g_spectator", 0.0);
    j["fidelity_mode"] = get_or<std::string>("fidelity_mode", "reduced");
  } else {
    throw ValidationError("config: unknown model family '" + family + "'");
  }
  j["threshold"] = get_or<double>("threshold", 0.99);
  return scenario_from_json(j);
}

std::filesystem::path RunConfig::output_dir() const {
  require(has("output_dir"), "config: missing 'output_dir'");
  return get<std::string>("output_dir");
}

FileMeta RunConfig::meta() const {
  FileMeta m;
  m.config_hash_hex = hash_hex(config_hash(raw));
  m.seed = get_or<std::uint64_t>("seed", 1234);
  return m;
}

OptimizeOptions RunConfig::optimize_options() const {
  OptimizeOptions opt;
  opt.n_restarts = get_or<int>("restarts", 10);
  opt.seed = get_or<std::uint64_t>("seed", 1234);
  opt.max_iterations = get_or<int>("max_iterations", 500);
  opt.stop_fidelity = get_or<double>("stop_fidelity", -1.0);
  opt.prop = propagator_options();
  opt.trajectory_samples = get_or<int>("trajectory_samples", 201);
  return opt;
}

PropagatorOptions RunConfig::propagator_options() const {
  PropagatorOptions prop;
  prop.rtol = get_or<double>("rtol", 1e-9);
  prop.atol = get_or<double>("atol", 1e-12);
  require(prop.rtol > 0 && prop.atol > 0, "config: tolerances must be > 0");
  return prop;
}

std::vector<int> RunConfig::m_schedule() const {
  if (has("M")) return {get<int>("M")};
  std::vector<int> schedule =
      get_or<std::vector<int>>("m_schedule", default_m_schedule());
  require(!schedule.empty(), "config: m_schedule must not be empty");
  return schedule;
}

namespace {

void apply_cache_dir(const RunConfig& cfg) {
  if (cfg.has("integral_cache_dir"))
    set_integral_cache_dir(cfg.get<std::string>("integral_cache_dir"));
}

}  // namespace

int cmd_optimize(const RunConfig& cfg) {
  const Scenario scenario = cfg.scenario();
  require(cfg.has("T"), "optimize: missing duration 'T'");
  const double duration = cfg.get<double>("T");
  require(duration > 0.0, "optimize: T must be positive");
  const std::vector<int> schedule = cfg.m_schedule();
  const double eps_m = cfg.get_or<double>("eps_m", 1e-4);
  const OptimizeOptions opt = cfg.optimize_options();
  const auto out_dir = cfg.output_dir();
  const FileMeta meta = cfg.meta();
  apply_cache_dir(cfg);

  std::cerr << "optimize: model=" << cfg.get<std::string>("model")
            << " T=" << duration << " schedule_size=" << schedule.size()
            << "\n";

  const PreparedScenario ps = PreparedScenario::prepare(scenario);
  const EscalationResult esc =
      escalate_m(ps, duration, schedule, eps_m, opt);
  OptimizationOutcome outcome = esc.best_outcome;
  outcome.trajectory = esc.best_outcome.trajectory;

  const ControlProtocol protocol(duration, outcome.knots, scenario.range);
  write_outcome(out_dir / "outcome.json", scenario, outcome, meta);
  write_trajectory_csv(out_dir / "trajectory.csv", outcome.trajectory,
                       protocol, meta);
  write_field_csv(out_dir / "field.csv", protocol,
                  cfg.get_or<int>("field_samples", 1001), meta);
  std::cerr << "optimize: best_fidelity=" << outcome.best_fidelity
            << " M=" << outcome.m_points << "\n";
  return kExitOk;
}

int cmd_qsl(const RunConfig& cfg) {
  const Scenario scenario = cfg.scenario();
  require(cfg.has("t_bracket"), "qsl: missing 't_bracket' [lo, hi]");
  const auto bracket = cfg.get<std::vector<double>>("t_bracket");
  require(bracket.size() == 2 && bracket[0] > 0 && bracket[1] > bracket[0],
          "qsl: t_bracket must be [lo, hi] with 0 < lo < hi");
  const double resolution = cfg.get_or<double>("resolution", 0.01);
  const double threshold = cfg.get_or<double>("threshold", scenario.threshold);
  const std::vector<int> schedule = cfg.m_schedule();
  const OptimizeOptions opt = cfg.optimize_options();
  const auto out_dir = cfg.output_dir();
  const FileMeta meta = cfg.meta();
  apply_cache_dir(cfg);

  std::vector<std::pair<double, double>> ranges;
  if (cfg.has("range_sweep")) {
    for (const auto& pair :
         cfg.get<std::vector<std::vector<double>>>("range_sweep")) {
      require(pair.size() == 2, "qsl: range_sweep entries must be [lo, hi]");
      ranges.emplace_back(pair[0], pair[1]);
    }
    require(!ranges.empty(), "qsl: range_sweep must not be empty");
  } else {
    ranges.emplace_back(scenario.range.g_min, scenario.range.g_max);
  }

  std::vector<std::array<double, 3>> widening;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    Scenario s = scenario;
    s.range = RangeScenario(ranges[i].first, ranges[i].second);
    const PreparedScenario ps = PreparedScenario::prepare(s);

    const double overlap = fidelity_pure(
        ps.scenario.mode == FidelityMode::pure
            ? ps.ini
            : embed_with_spectator(ps.tar,
                                   static_cast<int>(ps.model.dim_spectator), 0),
        ps.scenario.mode == FidelityMode::pure
            ? ps.tar
            : ps.ini);
    if (threshold <= overlap)
      std::cerr << "qsl: warning: threshold " << threshold
                << " is at or below the initial overlap " << overlap
                << "; estimate degenerates to the bracket floor\n";

    const QSLEstimate est = estimate_qsl(
        ps, threshold, schedule, {bracket[0], bracket[1]}, resolution, opt);
    const std::string suffix = ranges.size() > 1 ? "_" + std::to_string(i) : "";
    write_qsl_json(out_dir / ("qsl" + suffix + ".json"), est, meta);
    write_scan_csv(out_dir / ("scan" + suffix + ".csv"), est.scan, meta);
    widening.push_back({s.range.g_min, s.range.g_max, est.t_qsl});
    std::cerr << "qsl: range [" << s.range.g_min << ", " << s.range.g_max
              << "] -> T_QSL = " << est.t_qsl << "\n";
  }

  if (ranges.size() > 1) {
    std::ostringstream os;
    os << "# qramp " << kVersion << "\n# config_hash=" << meta.config_hash_hex
       << " seed=" << meta.seed << "\ng_min,g_max,T_QSL\n";
    for (const auto& row : widening)
      os << row[0] << ',' << row[1] << ',' << row[2] << "\n";
    std::filesystem::create_directories(out_dir);
    std::ofstream file(out_dir / "widening.csv", std::ios::binary);
    file << os.str();
  }
  return kExitOk;
}

int cmd_noise(const RunConfig& cfg) {
  require(cfg.has("outcome"), "noise: missing 'outcome' record path");
  const std::filesystem::path outcome_path = cfg.get<std::string>("outcome");
  require(cfg.has("sigma_list"), "noise: missing 'sigma_list'");
  const auto sigmas = cfg.get<std::vector<double>>("sigma_list");
  require(!sigmas.empty(), "noise: sigma_list must not be empty");
  for (const double s : sigmas)
    require(s >= 0.0, "noise: sigma values must be >= 0");
  const int n = cfg.get_or<int>("n_realizations", 100);
  require(n >= 1, "noise: n_realizations must be >= 1");
  const auto out_dir = cfg.output_dir();
  const FileMeta meta = cfg.meta();
  apply_cache_dir(cfg);

  const StoredOutcome stored = read_outcome(outcome_path);
  const PreparedScenario ps = PreparedScenario::prepare(stored.scenario);
  const PropagatorOptions prop = cfg.propagator_options();

  std::vector<NoiseReport> reports;
  for (const double sigma : sigmas) {
    NoiseConfig nc;
    nc.sigma = sigma;
    nc.n_realizations = n;
    nc.seed = meta.seed;
    nc.clamp_noisy = cfg.get_or<bool>("clamp_noisy", false);
    reports.push_back(noise_ensemble(ps, stored.outcome, nc, prop));
    std::cerr << "noise: sigma=" << sigma
              << " mean_f=" << reports.back().mean_f
              << " sem=" << reports.back().sem_f << "\n";
  }
  write_noise_sweep_csv(out_dir / "noise.csv", reports, meta);
  write_noise_reports_json(out_dir / "noise_samples.json", reports, meta);
  return kExitOk;
}

int cmd_converge(const RunConfig& cfg) {
  require(cfg.has("outcome"), "converge: missing 'outcome' record path");
  const std::filesystem::path outcome_path = cfg.get<std::string>("outcome");
  require(cfg.has("cutoffs"), "converge: missing 'cutoffs' list");
  const auto cutoffs = cfg.get<std::vector<int>>("cutoffs");
  require(!cutoffs.empty(), "converge: cutoffs must not be empty");
  const auto out_dir = cfg.output_dir();
  const FileMeta meta = cfg.meta();
  apply_cache_dir(cfg);

  const StoredOutcome stored = read_outcome(outcome_path);
  const Scenario& s = stored.scenario;

  // Alternative params per cutoff; C for two-component runs, K for
  // three-component runs. Shrinking cutoffs is rejected before any compute.
  std::vector<ModelParams> alternatives;
  for (const int cutoff : cutoffs) {
    if (const auto* fm = std::get_if<FermionModelParams>(&s.model)) {
      require(cutoff >= fm->cutoff_c,
              "converge: cutoff " + std::to_string(cutoff) +
                  " below original C = " + std::to_string(fm->cutoff_c));
      alternatives.push_back(FermionModelParams{fm->mass_ratio, cutoff});
    } else if (const auto* tc = std::get_if<ThreeComponentParams>(&s.model)) {
      require(cutoff >= tc->cutoff_k,
              "converge: cutoff " + std::to_string(cutoff) +
                  " below original K = " + std::to_string(tc->cutoff_k));
      alternatives.push_back(
          ThreeComponentParams{tc->base, cutoff, tc->g_spectator});
    } else {
      throw ValidationError("converge: two-qubit outcomes have no cutoff");
    }
  }

  const PropagatorOptions prop = cfg.propagator_options();
  const int samples = cfg.get_or<int>("trajectory_samples", 201);

  std::ostringstream os;
  os << "# qramp " << kVersion << "\n# config_hash=" << meta.config_hash_hex
     << " seed=" << meta.seed << "\ncutoff,final_fidelity,delta\n";
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    // Final fidelity via the same two-sample path the optimizer used, so an
    // identical cutoff reproduces the stored fidelity exactly.
    const Trajectory probe =
        reevaluate_protocol(s, stored.outcome, alternatives[i], prop, 2);
    const double f_final = probe.fidelities[probe.fidelities.size() - 1];
    const double delta = f_final - stored.outcome.best_fidelity;

    const Trajectory traj =
        reevaluate_protocol(s, stored.outcome, alternatives[i], prop, samples);
    const ControlProtocol protocol(stored.outcome.duration,
                                   stored.outcome.knots, s.range);
    write_trajectory_csv(
        out_dir / ("trajectory_" + std::to_string(cutoffs[i]) + ".csv"), traj,
        protocol, meta);
    char row[128];
    std::snprintf(row, sizeof(row), "%d,%.12g,%.12g\n", cutoffs[i], f_final,
                  delta);
    os << row;
    std::cerr << "converge: cutoff=" << cutoffs[i] << " F=" << f_final
              << " delta=" << delta << "\n";
  }
  std::filesystem::create_directories(out_dir);
  std::ofstream file(out_dir / "converge.csv", std::ios::binary);
  file << os.str();
  return kExitOk;
}

int cmd_spectrum(const RunConfig& cfg) {
  const Scenario scenario = cfg.scenario();
  const double g_from = cfg.get_or<double>("g_from", scenario.g1);
  const double g_to = cfg.get_or<double>("g_to", scenario.g2);
  const int g_steps = cfg.get_or<int>("g_steps", 21);
  const int n_eigs = cfg.get_or<int>("n_eigs", 5);
  require(g_steps >= 1, "spectrum: g_steps must be >= 1");
  require(n_eigs >= 1, "spectrum: n_eigs must be >= 1");
  const auto out_dir = cfg.output_dir();
  const FileMeta meta = cfg.meta();
  apply_cache_dir(cfg);

  const ModelInstance model = [&] {
    const PreparedScenario ps = PreparedScenario::prepare(scenario);
    return ps.model;
  }();

  std::ostringstream os;
  os << "# qramp " << kVersion << "\n# config_hash=" << meta.config_hash_hex
     << " seed=" << meta.seed << "\ng";
  for (int e = 0; e < n_eigs; ++e) os << ",E" << e;
  os << "\n";
  for (int i = 0; i < g_steps; ++i) {
    const double g =
        g_steps == 1
            ? g_from
            : g_from + (g_to - g_from) * static_cast<double>(i) / (g_steps - 1);
    const Spectrum spec = full_spectrum(model.hamiltonian_at(g));
    os << g;
    for (int e = 0; e < n_eigs && e < spec.energies.size(); ++e) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), ",%.12g", spec.energies[e]);
      os << buf;
    }
    os << "\n";
  }
  std::filesystem::create_directories(out_dir);
  std::ofstream file(out_dir / "spectrum.csv", std::ios::binary);
  file << os.str();
  return kExitOk;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Bounded-control ramp optimizer for small quantum systems"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  struct SubArgs {
    std::string config;
    std::vector<std::string> sets;
  };
  std::map<std::string, SubArgs> args;
  std::map<std::string, int (*)(const RunConfig&)> handlers{
      {"optimize", cmd_optimize}, {"qsl", cmd_qsl},
      {"noise", cmd_noise},       {"converge", cmd_converge},
      {"spectrum", cmd_spectrum}};
  std::map<std::string, std::string> descriptions{
      {"optimize", "optimize a ramp at fixed duration (escalating M)"},
      {"qsl", "estimate the quantum speed limit over a duration bracket"},
      {"noise", "Monte-Carlo noise sweep over an optimized outcome"},
      {"converge", "re-evaluate an outcome under larger basis cutoffs"},
      {"spectrum", "dump the lowest eigenvalues as a function of g"}};

  for (auto& [name, handler] : handlers) {
    CLI::App* sub = app.add_subcommand(name, descriptions[name]);
    auto& a = args[name];
    sub->add_option("--config", a.config, "JSON run configuration")
        ->required();
    sub->add_option("--set", a.sets,
                    "override a config key, e.g. --set seed=7");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const RunConfig cfg = RunConfig::from_file(args[name].config,
                                               args[name].sets);
    return handlers[name](cfg);
  } catch (const BracketError& e) {
    std::cerr << "error (bracketing): " << e.what() << "\n";
    return kExitBracket;
  } catch (const ValidationError& e) {
    std::cerr << "error (validation): " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "error (numerical): " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace qramp
