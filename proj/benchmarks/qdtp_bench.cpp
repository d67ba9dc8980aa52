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


#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "qdtp/mitigation.hpp"
#include "qdtp/recursions.hpp"
#include "qdtp/scenario_io.hpp"
#include "qdtp/simulator.hpp"

namespace {

using qdtp::Nanos;

// Bursty arrivals: exponential gaps with mean 1 ms.
std::vector<Nanos> make_arrivals(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(1.0 / 1e6);
  std::vector<Nanos> out;
  out.reserve(count);
  std::int64_t now = 0;
  for (std::size_t i = 0; i < count; ++i) {
    now += static_cast<std::int64_t>(gap(rng));
    out.emplace_back(now);
  }
  return out;
}

std::vector<Nanos> make_services(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> draw(500'000, 3'000'000);
  std::vector<Nanos> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.emplace_back(draw(rng));
  return out;
}

void BM_LindleyWaits(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto arrivals = make_arrivals(n, 1);
  const auto services = make_services(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(qdtp::lindley_waits(arrivals, services));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LindleyWaits)->Range(1 << 10, 1 << 20);

void BM_QdtpSchedule(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto arrivals = make_arrivals(n, 3);
  const auto cfg = qdtp::QdtpConfig::from_millis(3.2);
  for (auto _ : state) benchmark::DoNotOptimize(qdtp::qdtp_schedule(arrivals, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QdtpSchedule)->Range(1 << 10, 1 << 20);

void BM_ServerWaitsBehindShaper(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto arrivals = make_arrivals(n, 4);
  const auto services = make_services(n, 5);
  const auto schedule = qdtp::qdtp_schedule(arrivals, qdtp::QdtpConfig::from_millis(3.2));
  for (auto _ : state) benchmark::DoNotOptimize(qdtp::server_waits(schedule, services));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ServerWaitsBehindShaper)->Range(1 << 10, 1 << 20);

void BM_MitigationFlood(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  // Sustained flood at 15 kpps keeps the rule renewing.
  std::vector<Nanos> arrivals;
  arrivals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) arrivals.emplace_back(static_cast<std::int64_t>(i) * 66'667);
  const auto spacing = qdtp::kMillisecond * 3;
  for (auto _ : state) {
    qdtp::MitigationPolicy policy(qdtp::MitigationParams{}, spacing);
    std::size_t admitted = 0;
    for (const auto a : arrivals) {
      if (qdtp::mitigation_step(policy, a) == qdtp::MitigationPolicy::Decision::kAdmit) ++admitted;
    }
    benchmark::DoNotOptimize(admitted);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MitigationFlood)->Range(1 << 10, 1 << 20);

void BM_SimulateScenario(benchmark::State& state) {
  const auto scenario = qdtp::load_scenario(QDTP_SOURCE_DIR "/scenarios/no_attack_short.json");
  const auto workload = qdtp::make_workload(scenario);
  std::optional<qdtp::QdtpConfig> sqf;
  if (state.range(0) != 0) sqf = qdtp::QdtpConfig::from_millis(3.2);
  for (auto _ : state) benchmark::DoNotOptimize(qdtp::simulate(workload, sqf, std::nullopt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(workload.arrivals.size()));
}
BENCHMARK(BM_SimulateScenario)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
