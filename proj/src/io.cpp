// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#include "qramp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qramp/version.hpp"

namespace qramp {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ValidationError("cannot open for writing: " + path.string());
  out << body;
}

std::string csv_header(const FileMeta& meta) {
  std::ostringstream os;
  os << "# qramp " << kVersion << "\n";
  os << "# config_hash=" << meta.config_hash_hex << " seed=" << meta.seed
     << "\n";
  return os.str();
}

nlohmann::json meta_json(const FileMeta& meta) {
  return {{"tool_version", kVersion},
          {"config_hash", meta.config_hash_hex},
          {"seed", meta.seed}};
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd from_std(const std::vector<double>& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

}  // namespace

std::uint64_t config_hash(const nlohmann::json& config) {
  const std::string s = config.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  if (const auto* tq = std::get_if<TwoQubitParams>(&s.model)) {
    j["model"] = "two_qubit";
    j["delta"] = tq->delta;
  } else if (const auto* fm = std::get_if<FermionModelParams>(&s.model)) {
    j["model"] = "two_component";
    j["mass_ratio"] = fm->mass_ratio;
    j["cutoff_c"] = fm->cutoff_c;
  } else {
    const auto& tc = std::get<ThreeComponentParams>(s.model);
    j["model"] = "three_component";
    j["mass_ratio"] = tc.base.mass_ratio;
    j["cutoff_c"] = tc.base.cutoff_c;
    j["cutoff_k"] = tc.cutoff_k;
    j["g_spectator"] = tc.g_spectator;
  }
  j["g1"] = s.g1;
  j["g2"] = s.g2;
  j["range"] = {s.range.g_min, s.range.g_max};
  j["fidelity_mode"] = s.mode == FidelityMode::pure ? "pure" : "reduced";
  j["threshold"] = s.threshold;
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s{TwoQubitParams{},
             j.at("g1").get<double>(),
             j.at("g2").get<double>(),
             RangeScenario(j.at("range").at(0).get<double>(),
                           j.at("range").at(1).get<double>()),
             FidelityMode::pure,
             j.value("threshold", 0.99)};
  const std::string family = j.at("model").get<std::string>();
  if (family == "two_qubit") {
    s.model = TwoQubitParams{j.value("delta", 1.0)};
  } else if (family == "two_component") {
    s.model = FermionModelParams{j.at("mass_ratio").get<double>(),
                                 j.at("cutoff_c").get<int>()};
  } else if (family == "three_component") {
    s.model = ThreeComponentParams{
        FermionModelParams{j.at("mass_ratio").get<double>(),
                           j.at("cutoff_c").get<int>()},
        j.at("cutoff_k").get<int>(), j.at("g_spectator").get<double>()};
  } else {
    throw ValidationError("scenario_from_json: unknown model family '" +
                          family + "'");
  }
  const std::string mode = j.value("fidelity_mode", std::string("pure"));
  if (mode == "pure")
    s.mode = FidelityMode::pure;
  else if (mode == "reduced")
    s.mode = FidelityMode::reduced;
  else
    throw ValidationError("scenario_from_json: unknown fidelity_mode '" +
                          mode + "'");
  return s;
}

nlohmann::json protocol_to_json(const ControlProtocol& p) {
  return {{"duration", p.duration()},
          {"range", {p.range().g_min, p.range().g_max}},
          {"knots", to_std(p.knots())}};
}

ControlProtocol protocol_from_json(const nlohmann::json& j) {
  return ControlProtocol(
      j.at("duration").get<double>(),
      from_std(j.at("knots").get<std::vector<double>>()),
      RangeScenario(j.at("range").at(0).get<double>(),
                    j.at("range").at(1).get<double>()));
}

void write_outcome(const std::filesystem::path& path, const Scenario& s,
                   const OptimizationOutcome& outcome, const FileMeta& meta) {
  nlohmann::json j;
  j["scenario"] = scenario_to_json(s);
  j["T"] = outcome.duration;
  j["M"] = outcome.m_points;
  j["best_fidelity"] = outcome.best_fidelity;
  j["knots"] = to_std(outcome.knots);
  j["seed"] = meta.seed;
  j["iterations"] = outcome.iterations;
  j["gradient_norm"] = outcome.gradient_norm;
  j["restarts_used"] = outcome.restarts_used;
  j["meta"] = meta_json(meta);
  write_file(path, j.dump(2) + "\n");
}

StoredOutcome read_outcome(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open outcome file: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed outcome record " + path.string() + ": " +
                          e.what());
  }
  try {
    StoredOutcome out{scenario_from_json(j.at("scenario")), {}};
    out.outcome.duration = j.at("T").get<double>();
    out.outcome.m_points = j.at("M").get<int>();
    out.outcome.best_fidelity = j.at("best_fidelity").get<double>();
    out.outcome.knots = from_std(j.at("knots").get<std::vector<double>>());
    out.outcome.iterations = j.value("iterations", 0);
    out.outcome.gradient_norm = j.value("gradient_norm", 0.0);
    out.outcome.restarts_used = j.value("restarts_used", 0);
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("invalid outcome record " + path.string() + ": " +
                          e.what());
  }
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj, const ControlProtocol& p,
                          const FileMeta& meta) {
  std::ostringstream os;
  os << csv_header(meta) << "t,g,F\n";
  for (Eigen::Index i = 0; i < traj.times.size(); ++i)
    os << fmt(traj.times[i]) << ',' << fmt(p.eval_field(traj.times[i])) << ','
       << fmt(traj.fidelities[i]) << "\n";
  write_file(path, os.str());
}

void write_field_csv(const std::filesystem::path& path,
                     const ControlProtocol& p, int n_samples,
                     const FileMeta& meta) {
  std::ostringstream os;
  os << csv_header(meta) << "t,g\n";
  for (int i = 0; i < n_samples; ++i) {
    const double t = p.duration() * static_cast<double>(i) / (n_samples - 1);
    os << fmt(t) << ',' << fmt(p.eval_field(t)) << "\n";
  }
  write_file(path, os.str());
}

void write_scan_csv(const std::filesystem::path& path,
                    const std::vector<QSLScanPoint>& scan,
                    const FileMeta& meta) {
  std::ostringstream os;
  os << csv_header(meta) << "T,M_used,F_max\n";
  for (const auto& row : scan)
    os << fmt(row.duration) << ',' << row.m_used << ','
       << fmt(row.best_fidelity) << "\n";
  write_file(path, os.str());
}

void write_qsl_json(const std::filesystem::path& path, const QSLEstimate& est,
                    const FileMeta& meta) {
  nlohmann::json j;
  j["t_qsl"] = est.t_qsl;
  j["threshold"] = est.threshold;
  j["resolution"] = est.resolution;
  nlohmann::json scan = nlohmann::json::array();
  for (const auto& row : est.scan)
    scan.push_back({{"T", row.duration},
                    {"F_max", row.best_fidelity},
                    {"M_used", row.m_used}});
  j["scan"] = scan;
  j["knots_at_qsl"] = to_std(est.outcome_at_qsl.knots);
  j["meta"] = meta_json(meta);
  write_file(path, j.dump(2) + "\n");
}

void write_noise_sweep_csv(const std::filesystem::path& path,
                           const std::vector<NoiseReport>& reports,
                           const FileMeta& meta) {
  std::ostringstream os;
  os << csv_header(meta) << "sigma,mean_f,std_f,sem_f\n";
  for (const auto& r : reports)
    os << fmt(r.sigma) << ',' << fmt(r.mean_f) << ',' << fmt(r.std_f) << ','
       << fmt(r.sem_f) << "\n";
  write_file(path, os.str());
}

void write_noise_reports_json(const std::filesystem::path& path,
                              const std::vector<NoiseReport>& reports,
                              const FileMeta& meta) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["sigma"] = r.sigma;
    j["mean_f"] = r.mean_f;
    j["std_f"] = r.std_f;
    j["sem_f"] = r.sem_f;
    j["failures"] = r.failures;
    j["valid"] = r.valid;
    j["rng_algorithm"] = r.rng_algorithm;
    j["samples"] = to_std(r.samples);
    arr.push_back(std::move(j));
  }
  nlohmann::json doc;
  doc["reports"] = std::move(arr);
  doc["meta"] = meta_json(meta);
  write_file(path, doc.dump(2) + "\n");
}

}  // namespace qramp
