// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qramp/optimizer.hpp"
#include "qramp/robustness.hpp"

namespace qramp {

/// FNV-1a over a canonical JSON dump; identifies a run configuration in
/// every output file header.
std::uint64_t config_hash(const nlohmann::json& config);
std::string hash_hex(std::uint64_t h);

/// Provenance stamped into every output file.
struct FileMeta {
  std::string config_hash_hex = "0";
  std::uint64_t seed = 0;
};

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

/// Serialized protocol record: {duration, range:[g_min,g_max], knots:[...]}.
nlohmann::json protocol_to_json(const ControlProtocol& p);
ControlProtocol protocol_from_json(const nlohmann::json& j);

/// Outcome record: {scenario, T, M, best_fidelity, knots, seed, iterations,
/// gradient_norm} plus provenance fields.
void write_outcome(const std::filesystem::path& path, const Scenario& s,
                   const OptimizationOutcome& outcome, const FileMeta& meta);
struct StoredOutcome {
  Scenario scenario;
  OptimizationOutcome outcome;
};
StoredOutcome read_outcome(const std::filesystem::path& path);

/// CSV with a provenance header block; columns `t,g,F`.
void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj, const ControlProtocol& p,
                          const FileMeta& meta);

/// CSV `t,g` sampling the control field densely.
void write_field_csv(const std::filesystem::path& path,
                     const ControlProtocol& p, int n_samples,
                     const FileMeta& meta);

/// CSV `T,M_used,F_max` from a QSL scan.
void write_scan_csv(const std::filesystem::path& path,
                    const std::vector<QSLScanPoint>& scan,
                    const FileMeta& meta);

void write_qsl_json(const std::filesystem::path& path, const QSLEstimate& est,
                    const FileMeta& meta);

/// CSV `sigma,mean_f,std_f,sem_f`.
void write_noise_sweep_csv(const std::filesystem::path& path,
                           const std::vector<NoiseReport>& reports,
                           const FileMeta& meta);

/// Full reports including raw samples and the RNG algorithm name.
void write_noise_reports_json(const std::filesystem::path& path,
                              const std::vector<NoiseReport>& reports,
                              const FileMeta& meta);

}  // namespace qramp
