// Copyright 2026 The QDTP Authors
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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qdtp/metrics.hpp"
#include "qdtp/mitigation.hpp"
#include "qdtp/recursions.hpp"
#include "qdtp/scenario.hpp"
#include "qdtp/simulator.hpp"

namespace qdtp {

/// Process exit codes shared by every subcommand.
enum class ExitCode : int { kOk = 0, kConfig = 2, kInvariant = 3, kIo = 4 };

/// One reproducible experiment: a scenario file run under one configuration
/// for each seed. Manifest files are JSON:
///   {"name": "...", "scenario": "path", "sqf_d_ms": 3.0 | null,
///    "mitigation": {"n": 10, "k": 3} | null, "seeds": [1, 2],
///    "output_dir": "results", "sampling_interval_ms": 100}
/// Relative paths resolve against the manifest's directory.
struct ExperimentManifest {
  std::string name;
  std::filesystem::path scenario;
  std::optional<QdtpConfig> sqf;
  std::optional<MitigationParams> mitigation;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir = "results";
  Nanos sampling_interval{100 * kMillisecond};

  /// Throws ConfigError on an empty name or seed list, or mitigation without
  /// a forwarder.
  void validate() const;
  [[nodiscard]] std::string to_json() const;

  static ExperimentManifest parse(std::string_view json_text, const std::filesystem::path& base_dir);
  static ExperimentManifest load(const std::filesystem::path& path);
};

/// Invariant checks of one completed run.
struct RunChecks {
  CheckResult oracle;
  CheckResult conservation;
  LittleCheck little_server;
  std::optional<LittleCheck> little_sqf;
  CheckResult queue_samples;  ///< online samples match the rebuilt series

  [[nodiscard]] bool ok() const noexcept {
    return oracle.ok && conservation.ok && little_server.ok && (!little_sqf || little_sqf->ok) && queue_samples.ok;
  }
  [[nodiscard]] std::string describe() const;
};

RunChecks check_run(const TraceSeries& trace);

struct RunOutcome {
  std::uint64_t seed = 0;
  std::filesystem::path directory;  ///< empty when artifacts were not written
  TraceSeries trace;
  RunChecks checks;
};

/// Runs every seed of the manifest. With `write_artifacts`, each run lands in
/// output_dir/name/seed_<seed>/ and a copy of the manifest is kept in
/// output_dir/name/manifest.json; a different manifest already claiming that
/// name is a ConfigError.
std::vector<RunOutcome> run_experiment(const ExperimentManifest& manifest, bool write_artifacts = true);

/// Post-processing of a run directory for `qdtp analyze`.
struct AnalysisReport {
  TraceSeries trace;
  LittleCheck little_server;
  std::optional<LittleCheck> little_sqf;
  std::vector<std::filesystem::path> written;

  [[nodiscard]] bool ok() const noexcept { return little_server.ok && (!little_sqf || little_sqf->ok); }
};

/// Loads `dir`, validates Little's law on each queue, and writes
/// summary.json plus figure_service_time_histogram.csv (Freedman-Diaconis
/// bins from the packets served outside the attack window, reused for those
/// served inside it). Throws IoError when `dir` holds no run.
AnalysisReport analyze_directory(const std::filesystem::path& dir);

}  // namespace qdtp
