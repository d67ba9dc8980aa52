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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qdtp/simulator.hpp"
#include "qdtp/time.hpp"

namespace qdtp {

/// Descriptive statistics of a list of durations, in seconds. Variance is the
/// population variance (divisor n); percentiles use the nearest-rank rule.
struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double min = 0.0;
  double max = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
  double p999 = 0.0;
};

/// Throws ContractViolation on an empty list.
SummaryStats summarize(std::span<const Nanos> values);

// Per-packet duration extractors over completed, non-dropped records.
std::vector<Nanos> service_times(std::span<const PacketRecord> records);
std::vector<Nanos> server_waits_of(std::span<const PacketRecord> records);
std::vector<Nanos> sqf_delays_of(std::span<const PacketRecord> records);
std::vector<Nanos> server_sojourns_of(std::span<const PacketRecord> records);

/// Queue occupancy rebuilt from per-packet instants and sampled at multiples
/// of `interval`, from 0 through the first grid point at or after `until`
/// (default: the latest instant in the records). The sample at s counts
/// packets with enter <= s < leave. Throws ContractViolation when a packet
/// leaves before it enters.
std::vector<QueueSample> queue_series(std::span<const PacketRecord> records, QueueKind kind, Nanos interval,
                                      bool has_forwarder, std::optional<Nanos> until = std::nullopt);

std::int64_t peak_length(std::span<const QueueSample> series);

/// Exact maximum occupancy of a queue over the whole run, from per-packet
/// instants rather than samples. Exits at an instant are applied before
/// entries at the same instant.
std::int64_t max_occupancy(std::span<const PacketRecord> records, QueueKind kind, bool has_forwarder);

/// Time integral of a sampled queue against the summed per-packet stays.
/// Each packet can move the sampled integral by less than one interval, so
/// the pair must agree within count * interval.
struct LittleCheck {
  long double sampled_integral_ns = 0;
  long double sojourn_sum_ns = 0;
  long double tolerance_ns = 0;
  std::size_t packets = 0;
  bool ok = true;
};

LittleCheck little_law_check(std::span<const PacketRecord> records, std::span<const QueueSample> series,
                             QueueKind kind, Nanos interval, bool has_forwarder);

struct ComparisonRow {
  Nanos time{};
  std::int64_t a = 0;
  std::int64_t b = 0;
  double ratio = 1.0;  ///< a / b; 1 when both are 0, +inf when only b is 0
};

struct RunComparison {
  QueueKind kind = QueueKind::kServer;
  std::vector<ComparisonRow> rows;
  std::int64_t peak_a = 0;
  std::int64_t peak_b = 0;
  double peak_ratio = 1.0;
  std::optional<Nanos> drain_a;
  std::optional<Nanos> drain_b;
};

/// Aligns two runs' queue series on their common grid. The shorter series is
/// extended with its last value. Throws ContractViolation when the sampling
/// intervals or grid origins differ.
RunComparison compare_runs(const TraceSeries& a, const TraceSeries& b, QueueKind kind);

struct Histogram {
  std::vector<double> edges;  ///< size = counts.size() + 1, seconds
  std::vector<std::size_t> counts;
  std::size_t below = 0;  ///< values under the first edge
  std::size_t above = 0;  ///< values at or over the last edge
};

/// Fixed-width edges sized by the Freedman-Diaconis rule,
/// width = 2 * IQR / cbrt(n), spanning [min, max] of `values`.
std::vector<double> freedman_diaconis_edges(std::span<const Nanos> values);

/// Adds bins of the same width on either side of fixed-width `edges` until
/// every value is covered or the grid holds `max_bins` bins.
std::vector<double> extend_edges(std::span<const double> edges, std::span<const Nanos> values,
                                 std::size_t max_bins = 10'000);
Histogram histogram(std::span<const Nanos> values, std::span<const double> edges);

}  // namespace qdtp
