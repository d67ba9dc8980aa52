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

#include "qdtp/experiment.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qdtp/errors.hpp"
#include "qdtp/scenario_io.hpp"
#include "qdtp/trace_io.hpp"

namespace qdtp {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CheckResult compare_samples(const TraceSeries& trace, QueueKind kind) {
  const auto& online = trace.queue(kind);
  if (online.empty()) return {false, std::string(to_string(kind)) + " series is empty"};
  const auto rebuilt =
      queue_series(trace.per_packet, kind, trace.sampling_interval, trace.forwarder, online.back().time);
  if (rebuilt != online) {
    return {false, std::string(to_string(kind)) + " queue samples disagree with the per-packet reconstruction"};
  }
  return {};
}

}  // namespace

void ExperimentManifest::validate() const {
  if (name.empty()) throw ConfigError("manifest: name must not be empty");
  if (seeds.empty()) throw ConfigError("manifest '" + name + "': seeds must not be empty");
  if (mitigation && !sqf) throw ConfigError("manifest '" + name + "': mitigation requires sqf_d_ms");
  if (mitigation) mitigation->validate();
  if (sampling_interval <= Nanos::zero()) throw ConfigError("manifest '" + name + "': sampling interval must be > 0");
}

std::string ExperimentManifest::to_json() const {
  json root;
  root["name"] = name;
  root["scenario"] = scenario.string();
  root["sqf_d_ms"] = sqf ? json(to_millis(sqf->spacing())) : json(nullptr);
  root["mitigation"] =
      mitigation ? json{{"n", mitigation->n_threshold}, {"k", mitigation->k_factor}} : json(nullptr);
  root["seeds"] = seeds;
  root["output_dir"] = output_dir.string();
  root["sampling_interval_ms"] = to_millis(sampling_interval);
  return root.dump(2);
}

ExperimentManifest ExperimentManifest::parse(std::string_view json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("manifest: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("manifest: expected a JSON object");
  ExperimentManifest m;
  try {
    for (const auto& [key, value] : root.items()) {
      if (key != "name" && key != "scenario" && key != "sqf_d_ms" && key != "mitigation" && key != "seeds" &&
          key != "output_dir" && key != "sampling_interval_ms" && key != "description") {
        throw ConfigError("manifest: unknown field '" + key + "'");
      }
    }
    m.name = root.at("name").get<std::string>();
    std::filesystem::path scenario = root.at("scenario").get<std::string>();
    m.scenario = scenario.is_absolute() ? scenario : base_dir / scenario;
    if (root.contains("sqf_d_ms") && !root["sqf_d_ms"].is_null()) {
      m.sqf = QdtpConfig::from_millis(root["sqf_d_ms"].get<double>());
    }
    if (root.contains("mitigation") && !root["mitigation"].is_null()) {
      m.mitigation = MitigationParams{root["mitigation"].at("n").get<std::size_t>(),
                                      root["mitigation"].at("k").get<double>()};
    }
    m.seeds = root.at("seeds").get<std::vector<std::uint64_t>>();
    if (root.contains("output_dir")) {
      std::filesystem::path out = root["output_dir"].get<std::string>();
      m.output_dir = out.is_absolute() ? out : base_dir / out;
    }
    if (root.contains("sampling_interval_ms")) {
      m.sampling_interval = from_millis(root["sampling_interval_ms"].get<double>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  m.validate();
  return m;
}

ExperimentManifest ExperimentManifest::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.parent_path());
}

std::string RunChecks::describe() const {
  std::ostringstream os;
  auto line = [&](const char* what, bool ok, const std::string& detail) {
    os << "  " << what << ": " << (ok ? "ok" : "FAILED");
    if (!ok && !detail.empty()) os << " (" << detail << ")";
    os << '\n';
  };
  line("oracle equivalence", oracle.ok, oracle.detail);
  line("conservation", conservation.ok, conservation.detail);
  line("queue samples", queue_samples.ok, queue_samples.detail);
  line("little's law (server)", little_server.ok, "");
  if (little_sqf) line("little's law (sqf)", little_sqf->ok, "");
  return os.str();
}

RunChecks check_run(const TraceSeries& trace) {
  RunChecks checks;
  checks.oracle = check_oracle_equivalence(trace);
  checks.conservation = check_conservation(trace);
  checks.little_server = little_law_check(trace.per_packet, trace.server_queue, QueueKind::kServer,
                                          trace.sampling_interval, trace.forwarder);
  if (trace.forwarder) {
    checks.little_sqf = little_law_check(trace.per_packet, trace.sqf_queue, QueueKind::kSqf, trace.sampling_interval,
                                         trace.forwarder);
  }
  checks.queue_samples = compare_samples(trace, QueueKind::kServer);
  if (checks.queue_samples.ok && trace.forwarder) checks.queue_samples = compare_samples(trace, QueueKind::kSqf);
  return checks;
}

std::vector<RunOutcome> run_experiment(const ExperimentManifest& manifest, bool write_artifacts) {
  manifest.validate();
  const Scenario base = load_scenario(manifest.scenario);

  const auto experiment_dir = manifest.output_dir / manifest.name;
  if (write_artifacts) {
    const auto marker = experiment_dir / "manifest.json";
    const std::string text = manifest.to_json();
    if (std::filesystem::exists(marker) && read_file(marker) != text + "\n") {
      throw ConfigError("output directory already holds a different experiment named '" + manifest.name + "'");
    }
    std::error_code ec;
    std::filesystem::create_directories(experiment_dir, ec);
    if (ec) throw IoError("cannot create " + experiment_dir.string() + ": " + ec.message());
    std::ofstream out(marker);
    if (!out) throw IoError("cannot write " + marker.string());
    out << text << '\n';
  }

  SimulationOptions options;
  options.sampling_interval = manifest.sampling_interval;

  std::vector<RunOutcome> outcomes;
  for (std::uint64_t seed : manifest.seeds) {
    Scenario scenario = base;
    scenario.seed = seed;
    RunOutcome outcome;
    outcome.seed = seed;
    outcome.trace = simulate(scenario, manifest.sqf, manifest.mitigation, options);
    outcome.checks = check_run(outcome.trace);
    if (write_artifacts) {
      outcome.directory = experiment_dir / ("seed_" + std::to_string(seed));
      write_trace(outcome.directory, outcome.trace);
    }
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

AnalysisReport analyze_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  AnalysisReport report;
  report.trace = load_trace(dir);
  const auto& trace = report.trace;
  if (trace.per_packet.empty()) throw IoError(dir.string() + ": packets.csv holds no packets");

  report.little_server = little_law_check(trace.per_packet, trace.server_queue, QueueKind::kServer,
                                          trace.sampling_interval, trace.forwarder);
  if (trace.forwarder) {
    report.little_sqf = little_law_check(trace.per_packet, trace.sqf_queue, QueueKind::kSqf, trace.sampling_interval,
                                         trace.forwarder);
  }

  const auto summary = dir / "summary.json";
  write_summary_json(summary, trace);
  report.written.push_back(summary);

  // Split by whether service began inside the attack window.
  std::vector<PacketRecord> calm;
  std::vector<PacketRecord> attacked;
  for (const auto& r : trace.per_packet) {
    if (!r.completed()) continue;
    const bool inside = trace.attack_start && trace.attack_end && *r.service_start >= *trace.attack_start &&
                        *r.service_start <= *trace.attack_end;
    (inside ? attacked : calm).push_back(r);
  }
  const auto calm_services = service_times(calm);
  const auto attacked_services = service_times(attacked);
  const auto& basis = calm_services.empty() ? attacked_services : calm_services;
  if (!basis.empty()) {
    const auto edges = extend_edges(freedman_diaconis_edges(basis), attacked_services);
    const auto calm_hist = histogram(calm_services, edges);
    const auto attacked_hist = histogram(attacked_services, edges);
    const auto path = dir / "figure_service_time_histogram.csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(9);
    out << "bin_low_ms,bin_high_ms,no_attack,under_attack\n";
    out << ',' << edges.front() * 1e3 << ',' << calm_hist.below << ',' << attacked_hist.below << '\n';
    for (std::size_t i = 0; i < calm_hist.counts.size(); ++i) {
      out << edges[i] * 1e3 << ',' << edges[i + 1] * 1e3 << ',' << calm_hist.counts[i] << ','
          << attacked_hist.counts[i] << '\n';
    }
    out << edges.back() * 1e3 << ",," << calm_hist.above << ',' << attacked_hist.above << '\n';
    if (!out) throw IoError("write failed: " + path.string());
    report.written.push_back(path);
  }
  return report;
}

}  // namespace qdtp
