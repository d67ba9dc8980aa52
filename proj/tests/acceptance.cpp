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


// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qdtp/experiment.hpp"
#include "qdtp/forwarder.hpp"
#include "qdtp/metrics.hpp"
#include "qdtp/recursions.hpp"
#include "qdtp/scenario_io.hpp"
#include "qdtp/simulator.hpp"
#include "support/test_support.hpp"
#include "support/udp_sink.hpp"

namespace {

using namespace qdtp;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const fs::path kSource = QDTP_SOURCE_DIR;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Manifest runs shared by the reproduction criteria.
class ManifestRuns {
 public:
  const TraceSeries& get(const std::string& name) {
    auto it = traces_.find(name);
    if (it == traces_.end()) {
      const auto m = ExperimentManifest::load(kSource / "manifests" / (name + ".json"));
      auto outcomes = run_experiment(m, /*write_artifacts=*/false);
      it = traces_.emplace(name, std::move(outcomes.front().trace)).first;
    }
    return it->second;
  }
  std::map<std::string, TraceSeries>& all() { return traces_; }

 private:
  std::map<std::string, TraceSeries> traces_;
};

bool all_zero(const std::vector<Nanos>& v) {
  return std::all_of(v.begin(), v.end(), [](Nanos x) { return x == Nanos{0}; });
}

void zero_wait_when_spacing_exceeds_service(Verdict& v) {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  int sequences = 0;
  std::size_t packets = 0;
  for (int c = 0; c < 1000; ++c) {
    const auto n = test::random_length(rng, 1, 2000);
    const auto pattern = test::pattern_for_case(c);
    const auto arrivals = test::random_arrivals(rng, n, pattern);
    const QdtpConfig cfg(Nanos{static_cast<std::int64_t>(test::random_length(rng, 1'000'000, 5'000'000))});
    const auto services = test::random_services(rng, n, Nanos{1'000}, cfg.spacing() - Nanos{1});
    if (!check_result1(services, cfg)) {
      v.require(false, "generated services not below D");
      return;
    }
    const auto core = server_waits(qdtp_schedule(arrivals, cfg), services).waits;
    const auto trace = simulate(Workload::from_sequences(arrivals, services), cfg, std::nullopt);
    std::vector<Nanos> simulated;
    for (const auto& r : trace.per_packet) simulated.push_back(*r.service_start - *r.forwarded);
    if (!all_zero(core) || !all_zero(simulated) || simulated.size() != n) {
      v.require(false, "non-zero wait in case " + std::to_string(c));
      return;
    }
    ++sequences;
    packets += n;
  }
  const double elapsed = seconds_since(start);
  v.require(elapsed < 10.0, "runtime under 10 s");
  v.detail << " sequences=" << sequences << " packets=" << packets << " runtime=" << elapsed << "s";
}

void oracle_equivalence_on_manifests(Verdict& v, ManifestRuns& runs) {
  const auto start = Clock::now();
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(kSource / "manifests")) {
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  std::size_t admitted = 0;
  for (const auto& name : names) {
    const auto& trace = runs.get(name);
    const auto r = check_oracle_equivalence(trace);
    v.require(r.ok, name + ": " + r.detail);
    for (const auto& p : trace.per_packet) admitted += p.dropped() ? 0 : 1;
  }
  const double elapsed = seconds_since(start);
  v.require(!names.empty(), "bundled manifests present");
  v.require(elapsed < 120.0, "runtime under 2 min");
  v.detail << " manifests=" << names.size() << " admitted_packets=" << admitted << " runtime=" << elapsed << "s";
}

std::int64_t server_backlog_at(const TraceSeries& trace, Nanos at) {
  std::int64_t n = 0;
  for (const auto& r : trace.per_packet) {
    const auto stay = queue_stay(r, QueueKind::kServer, trace.forwarder);
    if (stay && stay->enter <= at && (!stay->leave || *stay->leave > at)) ++n;
  }
  return n;
}

void server_flood_without_shaping(Verdict& v, ManifestRuns& runs) {
  const auto& plain = runs.get("fig3_no_sqf");
  const auto& outliers = runs.get("fig3_no_sqf_outliers");
  const auto scenario = load_scenario(kSource / "scenarios" / "flood_60s.json");

  const auto peak = peak_length(plain.server_queue);
  v.require(std::abs(static_cast<double>(peak) - 400'000.0) <= 0.05 * 400'000.0, "peak within 5% of 400000");

  const auto backlog = server_backlog_at(plain, *plain.attack_end);
  const double oracle = static_cast<double>(backlog) * scenario.service_under_attack.mean;
  const double drain = to_seconds(drain_time(plain, QueueKind::kServer));
  v.require(std::abs(drain - oracle) <= 0.10 * oracle, "drain within 10% of backlog x mean service");

  const double attack_duration = scenario.attack->duration;
  const double drain_outliers = to_seconds(drain_time(outliers, QueueKind::kServer));
  v.require(drain_outliers >= 10.0 * attack_duration, "outlier drain >= 10x attack duration");
  v.detail << " peak=" << peak << " backlog=" << backlog << " drain=" << drain << "s oracle=" << oracle
           << "s drain_with_outliers=" << drain_outliers << "s";
}

double mean_server_sojourn_ms(const TraceSeries& trace) {
  return summarize(server_sojourns_of(trace.per_packet)).mean * 1e3;
}

void shaping_above_service_mean(Verdict& v, ManifestRuns& runs) {
  const auto& attack = runs.get("fig10_d3200_attack");
  const auto& calm = runs.get("fig10_d3200_no_attack");
  const auto peak = std::max(peak_length(attack.server_queue), peak_length(calm.server_queue));
  v.require(peak <= 2, "server queue <= 2 at every sample");
  const double a = mean_server_sojourn_ms(attack);
  const double b = mean_server_sojourn_ms(calm);
  v.require(std::abs(a - b) <= 0.05 * b, "attack sojourn within 5% of no-attack");
  const auto with = compare_runs(runs.get("fig7_without_sqf"), runs.get("fig7_with_sqf"), QueueKind::kServer);
  v.detail << " server_peak=" << peak << " sojourn_attack=" << a << "ms sojourn_no_attack=" << b
           << "ms fig7_peak_ratio=" << with.peak_ratio;
}

void shaping_below_service_mean(Verdict& v, ManifestRuns& runs) {
  const double a = mean_server_sojourn_ms(runs.get("fig8_d2700_attack"));
  const double b = mean_server_sojourn_ms(runs.get("fig8_d2700_no_attack"));
  v.require(a >= 1.05 * b, "attack sojourn >= 1.05x no-attack");
  v.detail << " sojourn_attack=" << a << "ms sojourn_no_attack=" << b << "ms ratio=" << a / b;
}

void mitigation_cap(Verdict& v, ManifestRuns& runs) {
  const auto& trace = runs.get("fig12_mitigation");
  const auto manifest = ExperimentManifest::load(kSource / "manifests" / "fig12_mitigation.json");
  const auto scenario = load_scenario(manifest.scenario);
  const auto sampled = peak_length(trace.sqf_queue);
  const auto exact = max_occupancy(trace.per_packet, QueueKind::kSqf, true);
  v.require(sampled <= 12 && exact <= 12, "SQF peak <= 12");
  std::size_t admitted = 0;
  std::size_t offered = 0;
  for (const auto& r : trace.per_packet) {
    if (!r.is_attack) continue;
    ++offered;
    admitted += r.dropped() ? 0 : 1;
  }
  const double kd = manifest.mitigation->k_factor * to_seconds(manifest.sqf->spacing());
  const double bound = 1.2 * std::ceil(scenario.attack->duration / kd) *
                       static_cast<double>(manifest.mitigation->n_threshold + 1);
  v.require(static_cast<double>(admitted) <= bound, "admitted flood packets within bound");
  v.detail << " sqf_peak_sampled=" << sampled << " sqf_peak_exact=" << exact << " admitted_flood=" << admitted
           << " of " << offered << " bound=" << bound;
}

void live_pacing(Verdict& v) {
  const auto start = Clock::now();
  test::UdpSink sink;
  ForwarderConfig cfg;
  cfg.listen = SocketAddress::loopback(0);
  cfg.upstream = sink.address();
  cfg.spacing = 3 * kMillisecond;
  cfg.record_timeline = true;
  Forwarder fwd(cfg);
  fwd.start();
  test::send_burst(fwd.listen_address(), 1000);
  const auto deadline = Clock::now() + std::chrono::seconds(10);
  ForwarderStats stats;
  do {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
    stats = fwd.snapshot_stats();
  } while ((stats.received < 1000 || stats.queue_len > 0) && Clock::now() < deadline);
  sink.wait_for(1000, std::chrono::seconds(2));
  fwd.stop();

  const auto timeline = fwd.timeline();
  v.require(stats.received == 1000 && stats.forwarded == 1000, "all 1000 datagrams forwarded");
  v.require(sink.count() == 1000, "all 1000 datagrams delivered");
  v.require(stats.pacing_violations == 0, "zero pacing violations");
  std::vector<Nanos> received;
  for (const auto& e : timeline) received.push_back(e.received);
  const auto planned = qdtp_schedule(received, QdtpConfig(cfg.spacing)).times;
  Nanos worst_late{0};
  Nanos worst_early{0};
  for (std::size_t i = 0; i < timeline.size(); ++i) {
    if (!timeline[i].departed) {
      v.require(false, "datagram without departure");
      break;
    }
    const Nanos err = *timeline[i].departed - planned[i];
    worst_late = std::max(worst_late, err);
    worst_early = std::min(worst_early, err);
  }
  v.require(worst_early >= Nanos{0} && worst_late <= cfg.tolerance, "departure - planned within [0, eps]");
  v.detail << " forwarded=" << stats.forwarded << " violations=" << stats.pacing_violations
           << " min_gap_us=" << (stats.inter_departure_min ? to_millis(*stats.inter_departure_min) * 1e3 : -1.0)
           << " max_late_us=" << to_millis(worst_late) * 1e3 << " runtime=" << seconds_since(start) << "s";
}

void property_suites(Verdict& v) {
  const std::string filter =
      "RecursionProperties.LindleyGrowthCondition:RecursionProperties.MonotoneInSpacing:"
      "RecursionProperties.IdentityWhenSpacingBelowEveryGap:SimulatorProperties.FcfsOrderPreserved:"
      "SimulatorProperties.Conservation:SimulatorProperties.LittleLawOnSampledQueues";
  const std::string cmd = std::string("'") + QDTP_PROPERTY_TESTS + "' --gtest_brief=1 --gtest_filter=" + filter + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    v.require(false, "launch property tests");
    return;
  }
  std::string output;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
  const int status = ::pclose(pipe);
  const bool ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;
  v.require(ok, "property suites green");
  v.require(output.find("6 tests") != std::string::npos, "all six suites ran");
  v.detail << " suites=6 cases_per_suite>=" << test::kPropertyCases;
  if (!ok) v.detail << "\n" << output;
}

}  // namespace

int main() {
  ManifestRuns runs;
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Verdict&)> check;
  };
  const std::vector<Criterion> criteria{
      {1, "zero server wait when D > max T", zero_wait_when_spacing_exceeds_service},
      {2, "simulator equals recursions on all manifests", [&](Verdict& v) { oracle_equivalence_on_manifests(v, runs); }},
      {3, "unshaped flood: peak and drain time", [&](Verdict& v) { server_flood_without_shaping(v, runs); }},
      {4, "D = 3.2 ms: bounded server queue, same sojourn", [&](Verdict& v) { shaping_above_service_mean(v, runs); }},
      {5, "D = 2.7 ms: sojourn rises under attack", [&](Verdict& v) { shaping_below_service_mean(v, runs); }},
      {6, "mitigation N=10 K=3 caps SQF queue", [&](Verdict& v) { mitigation_cap(v, runs); }},
      {7, "live loopback pacing of a 1000-datagram burst", live_pacing},
      {8, "randomized property suites", property_suites},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      c.check(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    failed += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " |" << v.detail.str()
              << std::endl;
  }
  std::cout << (failed == 0 ? "ALL CRITERIA PASS" : std::to_string(failed) + " CRITERIA FAILED") << std::endl;
  return failed == 0 ? 0 : 1;
}
