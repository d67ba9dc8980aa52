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

// qdtp: experiment driver for the shaping forwarder.
//
//   qdtp simulate  --scenario FILE [--sqf-d MS] [--mitigation N,K] --out DIR
//   qdtp simulate  --manifest FILE [--out DIR]
//   qdtp forward   --listen ADDR --upstream ADDR --d-us US [--mitigation N,K]
//                  [--capacity N] [--control ADDR]
//   qdtp stub      --listen ADDR --out DIR [service model options]
//   qdtp send      --target ADDR --count N [--interval-us US] [--attack]
//   qdtp analyze   DIR
//   qdtp scenario validate FILE

#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "qdtp/datagram.hpp"
#include "qdtp/errors.hpp"
#include "qdtp/experiment.hpp"
#include "qdtp/forwarder.hpp"
#include "qdtp/scenario_io.hpp"
#include "qdtp/server_stub.hpp"
#include "qdtp/trace_io.hpp"

namespace {

using namespace qdtp;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

int code(ExitCode c) { return static_cast<int>(c); }

struct SimulateOptions {
  std::string scenario;
  std::string manifest;
  std::optional<double> sqf_d_ms;
  std::string mitigation;
  std::string out;
  std::vector<std::uint64_t> seeds;
  double sampling_ms = 100.0;
};

int cmd_simulate(const SimulateOptions& opt) {
  ExperimentManifest manifest;
  if (!opt.manifest.empty()) {
    manifest = ExperimentManifest::load(opt.manifest);
    if (!opt.out.empty()) manifest.output_dir = opt.out;
    if (!opt.seeds.empty()) manifest.seeds = opt.seeds;
  } else {
    if (opt.scenario.empty()) throw ConfigError("simulate: one of --scenario or --manifest is required");
    if (opt.out.empty()) throw ConfigError("simulate: --out is required with --scenario");
    const Scenario scenario = load_scenario(opt.scenario);
    manifest.name = std::filesystem::path(opt.scenario).stem().string();
    manifest.scenario = opt.scenario;
    if (opt.sqf_d_ms) manifest.sqf = QdtpConfig::from_millis(*opt.sqf_d_ms);
    if (!opt.mitigation.empty()) manifest.mitigation = MitigationParams::parse(opt.mitigation);
    manifest.seeds = opt.seeds.empty() ? std::vector<std::uint64_t>{scenario.seed} : opt.seeds;
    manifest.output_dir = opt.out;
    manifest.sampling_interval = from_millis(opt.sampling_ms);
  }

  const auto outcomes = run_experiment(manifest);
  bool ok = true;
  for (const auto& run : outcomes) {
    std::cout << manifest.name << " seed " << run.seed << " -> " << run.directory.string() << '\n'
              << run.checks.describe();
    ok = ok && run.checks.ok();
  }
  return code(ok ? ExitCode::kOk : ExitCode::kInvariant);
}

struct ForwardOptions {
  std::string listen;
  std::string upstream;
  std::int64_t d_us = 0;
  std::string mitigation;
  std::optional<std::size_t> capacity;
  std::string control;
  double stats_interval_s = 1.0;
};

int cmd_forward(const ForwardOptions& opt) {
  ForwarderConfig cfg;
  cfg.listen = SocketAddress::parse(opt.listen);
  cfg.upstream = SocketAddress::parse(opt.upstream);
  cfg.spacing = Nanos{opt.d_us * 1000};
  if (!opt.mitigation.empty()) cfg.mitigation = MitigationParams::parse(opt.mitigation);
  cfg.queue_capacity = opt.capacity;
  if (!opt.control.empty()) cfg.control = SocketAddress::parse(opt.control);
  cfg.stats_interval = from_seconds(opt.stats_interval_s);
  run_forwarder(cfg, g_stop, std::cout);
  return code(ExitCode::kOk);
}

struct StubOptions {
  std::string listen;
  std::string out;
  std::string mode = "constant";
  double mean_ms = 3.0;
  double variance_ms2 = 0.0;
  double outlier_probability = 0.001;
  double outlier_scale = 1000.0;
  std::uint64_t seed = 1;
  double duration_s = 0.0;
};

int cmd_stub(const StubOptions& opt) {
  StubConfig cfg;
  cfg.listen = SocketAddress::parse(opt.listen);
  cfg.service.mode = parse_service_mode(opt.mode);
  cfg.service.mean = opt.mean_ms * 1e-3;
  cfg.service.variance = opt.variance_ms2 * 1e-6;
  cfg.service.outlier_probability = opt.outlier_probability;
  cfg.service.outlier_scale = opt.outlier_scale;
  cfg.seed = opt.seed;

  ServerStub stub(cfg);
  stub.start();
  std::cerr << "stub listening on " << stub.listen_address().to_string() << '\n';
  const Nanos until = opt.duration_s > 0 ? from_seconds(opt.duration_s) : Nanos::max();
  while (!g_stop && stub.clock().now() < until) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  stub.stop();

  std::filesystem::create_directories(opt.out);
  write_packets_csv(std::filesystem::path(opt.out) / "packets.csv", stub.records());
  std::cerr << "stub processed " << stub.processed() << " of " << stub.received() << " packets\n";
  return code(ExitCode::kOk);
}

struct SendOptions {
  std::string target;
  std::size_t count = 100;
  std::int64_t interval_us = 0;
  std::uint32_t source = 0;
  bool attack = false;
};

int cmd_send(const SendOptions& opt) {
  const auto target = SocketAddress::parse(opt.target);
  auto sock = UdpSocket::bind(SocketAddress::parse("0.0.0.0:0"));
  MonotonicClock clock;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < opt.count && !g_stop; ++i) {
    if (opt.interval_us > 0) sleep_until(clock, Nanos{static_cast<std::int64_t>(i) * opt.interval_us * 1000});
    const auto bytes = encode_datagram({opt.source, i, opt.attack, 21'500});
    if (!sock.send_to(bytes, target)) ++failed;
  }
  std::cerr << "sent " << opt.count - failed << " datagrams to " << target.to_string() << '\n';
  return code(ExitCode::kOk);
}

int cmd_analyze(const std::string& dir) {
  const auto report = analyze_directory(dir);
  std::cout << summary_json(report.trace) << '\n';
  auto print = [](const char* which, const LittleCheck& c) {
    std::cerr << "little's law (" << which << "): " << (c.ok ? "ok" : "VIOLATED") << " integral "
              << static_cast<double>(c.sampled_integral_ns) * 1e-9 << " s vs sojourn sum "
              << static_cast<double>(c.sojourn_sum_ns) * 1e-9 << " s (tolerance "
              << static_cast<double>(c.tolerance_ns) * 1e-9 << " s)\n";
  };
  print("server", report.little_server);
  if (report.little_sqf) print("sqf", *report.little_sqf);
  return code(report.ok() ? ExitCode::kOk : ExitCode::kInvariant);
}

int cmd_validate(const std::string& file) {
  const Scenario s = load_scenario(file);
  std::cout << file << ": ok (" << s.normal_sources.size() << " normal source(s), "
            << (s.attack ? "attack" : "no attack") << ", horizon " << s.horizon << " s)\n";
  return code(ExitCode::kOk);
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  CLI::App app{"Quasi-deterministic traffic shaping: simulation, live forwarding and analysis"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run the discrete-event simulator");
  simulate->add_option("--scenario", sim.scenario, "Scenario JSON file");
  simulate->add_option("--manifest", sim.manifest, "Experiment manifest JSON file");
  simulate->add_option("--sqf-d", sim.sqf_d_ms, "Forwarder spacing D in milliseconds");
  simulate->add_option("--mitigation", sim.mitigation, "Drop rule parameters N,K");
  simulate->add_option("--out", sim.out, "Output directory");
  simulate->add_option("--seed", sim.seeds, "Seed(s) overriding the scenario or manifest");
  simulate->add_option("--sampling-ms", sim.sampling_ms, "Queue sampling interval in milliseconds");

  ForwardOptions fwd;
  auto* forward = app.add_subcommand("forward", "Run the live UDP shaping forwarder");
  forward->add_option("--listen", fwd.listen, "Listen address host:port")->required();
  forward->add_option("--upstream", fwd.upstream, "Protected server host:port")->required();
  forward->add_option("--d-us", fwd.d_us, "Spacing D in microseconds")->required();
  forward->add_option("--mitigation", fwd.mitigation, "Drop rule parameters N,K");
  forward->add_option("--capacity", fwd.capacity, "Queue capacity in packets (default unbounded)");
  forward->add_option("--control", fwd.control, "Control socket host:port accepting 'DROP <seconds>'");
  forward->add_option("--stats-interval", fwd.stats_interval_s, "Seconds between stats lines");

  StubOptions stb;
  auto* stub = app.add_subcommand("stub", "Run the server stub and record packets.csv");
  stub->add_option("--listen", stb.listen, "Listen address host:port")->required();
  stub->add_option("--out", stb.out, "Directory for packets.csv")->required();
  stub->add_option("--mode", stb.mode, "constant | gaussian | gaussian_with_outliers");
  stub->add_option("--mean-ms", stb.mean_ms, "Mean service time (ms)");
  stub->add_option("--variance-ms2", stb.variance_ms2, "Service time variance (ms^2)");
  stub->add_option("--outlier-prob", stb.outlier_probability, "Outlier probability");
  stub->add_option("--outlier-scale", stb.outlier_scale, "Outlier mean multiplier");
  stub->add_option("--seed", stb.seed, "Service time seed");
  stub->add_option("--duration", stb.duration_s, "Stop after this many seconds (default: until signalled)");

  SendOptions snd;
  auto* send = app.add_subcommand("send", "Send telemetry datagrams (load generator)");
  send->add_option("--target", snd.target, "Destination host:port")->required();
  send->add_option("--count", snd.count, "Number of datagrams");
  send->add_option("--interval-us", snd.interval_us, "Gap between datagrams; 0 sends a burst");
  send->add_option("--source", snd.source, "Source id in the datagram header");
  send->add_flag("--attack", snd.attack, "Mark datagrams as attack traffic");

  std::string analyze_dir;
  auto* analyze = app.add_subcommand("analyze", "Summarize a run directory and check Little's law");
  analyze->add_option("dir", analyze_dir, "Run directory with packets.csv")->required();

  std::string validate_file;
  auto* scenario = app.add_subcommand("scenario", "Scenario file utilities");
  scenario->require_subcommand(1);
  auto* validate = scenario->add_subcommand("validate", "Check a scenario file");
  validate->add_option("file", validate_file, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(ExitCode::kConfig);
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (forward->parsed()) return cmd_forward(fwd);
    if (stub->parsed()) return cmd_stub(stb);
    if (send->parsed()) return cmd_send(snd);
    if (analyze->parsed()) return cmd_analyze(analyze_dir);
    if (validate->parsed()) return cmd_validate(validate_file);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return code(ExitCode::kConfig);
  } catch (const ContractViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return code(ExitCode::kInvariant);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return code(ExitCode::kIo);
  } catch (const StartupError& e) {
    std::cerr << "startup error: " << e.what() << '\n';
    return code(ExitCode::kIo);
  }
  return code(ExitCode::kConfig);
}
