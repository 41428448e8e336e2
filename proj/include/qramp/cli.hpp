// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qramp/io.hpp"

namespace qramp {

/// Exit code contract: 0 success, 2 validation, 3 numerical, 4 bracketing.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitNumerical = 3,
  kExitBracket = 4,
};

/// One run configuration: a flat JSON document, optionally overridden by
/// command-line `--set key=value` pairs. Every command validates the full
/// configuration before any expensive computation starts.
struct RunConfig {
  nlohmann::json raw;

  static RunConfig from_file(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});
  static RunConfig from_json(nlohmann::json merged);

  Scenario scenario() const;
  std::filesystem::path output_dir() const;
  FileMeta meta() const;

  bool has(const std::string& key) const { return raw.contains(key); }
  template <class T>
  T get(const std::string& key) const {
    try {
      return raw.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("config key '" + key + "': " + e.what());
    }
  }
  template <class T>
  T get_or(const std::string& key, const T& fallback) const {
    if (!raw.contains(key)) return fallback;
    return get<T>(key);
  }

  OptimizeOptions optimize_options() const;
  PropagatorOptions propagator_options() const;
  std::vector<int> m_schedule() const;
};

int cmd_optimize(const RunConfig& cfg);
int cmd_qsl(const RunConfig& cfg);
int cmd_noise(const RunConfig& cfg);
int cmd_converge(const RunConfig& cfg);
int cmd_spectrum(const RunConfig& cfg);

/// Full argv dispatch with the exit-code mapping; used by the binary and by
/// tests.
int run_cli(int argc, const char* const* argv);

}  // namespace qramp
