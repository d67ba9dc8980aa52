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

#include "qdtp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qdtp/errors.hpp"

namespace qdtp {

namespace {

double nearest_rank(const std::vector<Nanos>& sorted, double p) {
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return to_seconds(sorted[rank - 1]);
}

template <typename Fn>
std::vector<Nanos> extract(std::span<const PacketRecord> records, Fn&& fn) {
  std::vector<Nanos> out;
  for (const auto& r : records) {
    if (r.dropped() || !r.completed()) continue;
    out.push_back(fn(r));
  }
  return out;
}

}  // namespace

SummaryStats summarize(std::span<const Nanos> values) {
  if (values.empty()) throw ContractViolation("summarize: empty list");
  std::vector<Nanos> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  long double sum = 0;
  for (Nanos v : sorted) sum += static_cast<long double>(v.count());
  const long double n = static_cast<long double>(sorted.size());
  const long double mean_ns = sum / n;
  long double sq = 0;
  for (Nanos v : sorted) {
    const long double d = static_cast<long double>(v.count()) - mean_ns;
    sq += d * d;
  }

  SummaryStats s;
  s.count = sorted.size();
  s.mean = static_cast<double>(mean_ns * 1e-9L);
  s.variance = static_cast<double>(sq / n * 1e-18L);
  s.min = to_seconds(sorted.front());
  s.max = to_seconds(sorted.back());
  s.p50 = nearest_rank(sorted, 0.50);
  s.p95 = nearest_rank(sorted, 0.95);
  s.p99 = nearest_rank(sorted, 0.99);
  s.p999 = nearest_rank(sorted, 0.999);
  return s;
}

std::vector<Nanos> service_times(std::span<const PacketRecord> records) {
  return extract(records, [](const PacketRecord& r) { return *r.service_end - *r.service_start; });
}

std::vector<Nanos> server_waits_of(std::span<const PacketRecord> records) {
  return extract(records, [](const PacketRecord& r) { return *r.service_start - r.server_entry(); });
}

std::vector<Nanos> sqf_delays_of(std::span<const PacketRecord> records) {
  return extract(records, [](const PacketRecord& r) { return r.server_entry() - r.arrival; });
}

std::vector<Nanos> server_sojourns_of(std::span<const PacketRecord> records) {
  return extract(records, [](const PacketRecord& r) { return *r.service_end - r.server_entry(); });
}

std::vector<QueueSample> queue_series(std::span<const PacketRecord> records, QueueKind kind, Nanos interval,
                                      bool has_forwarder, std::optional<Nanos> until) {
  if (interval <= Nanos::zero()) throw ContractViolation("queue_series: interval must be > 0");

  std::vector<std::pair<Nanos, int>> steps;
  Nanos latest = Nanos::zero();
  for (const auto& r : records) {
    latest = std::max(latest, r.arrival);
    for (const auto& t : {r.forwarded, r.service_start, r.service_end}) {
      if (t) latest = std::max(latest, *t);
    }
    const auto stay = queue_stay(r, kind, has_forwarder);
    if (!stay) continue;
    steps.emplace_back(stay->enter, +1);
    if (stay->leave) {
      if (*stay->leave < stay->enter) {
        throw ContractViolation("queue_series: packet " + std::to_string(r.id) + " leaves before it enters");
      }
      steps.emplace_back(*stay->leave, -1);
    }
  }
  std::sort(steps.begin(), steps.end());
  const Nanos end = until.value_or(latest);

  std::vector<QueueSample> out;
  std::int64_t length = 0;
  std::size_t i = 0;
  for (Nanos s = Nanos::zero();; s += interval) {
    for (; i < steps.size() && steps[i].first <= s; ++i) length += steps[i].second;
    out.push_back({s, length});
    if (s >= end) break;
  }
  return out;
}

std::int64_t peak_length(std::span<const QueueSample> series) {
  std::int64_t peak = 0;
  for (const auto& s : series) peak = std::max(peak, s.length);
  return peak;
}

std::int64_t max_occupancy(std::span<const PacketRecord> records, QueueKind kind, bool has_forwarder) {
  std::vector<std::pair<Nanos, int>> steps;
  for (const auto& r : records) {
    const auto stay = queue_stay(r, kind, has_forwarder);
    if (!stay) continue;
    steps.emplace_back(stay->enter, +1);
    if (stay->leave) steps.emplace_back(*stay->leave, -1);
  }
  std::sort(steps.begin(), steps.end());
  std::int64_t length = 0;
  std::int64_t peak = 0;
  for (const auto& [at, delta] : steps) {
    length += delta;
    peak = std::max(peak, length);
  }
  return peak;
}

LittleCheck little_law_check(std::span<const PacketRecord> records, std::span<const QueueSample> series,
                             QueueKind kind, Nanos interval, bool has_forwarder) {
  LittleCheck check;
  for (const auto& s : series) check.sampled_integral_ns += static_cast<long double>(s.length) * interval.count();
  for (const auto& r : records) {
    const auto stay = queue_stay(r, kind, has_forwarder);
    if (!stay) continue;
    if (!stay->leave) throw ContractViolation("little_law_check: trace is incomplete");
    check.sojourn_sum_ns += static_cast<long double>((*stay->leave - stay->enter).count());
    ++check.packets;
  }
  check.tolerance_ns = static_cast<long double>(check.packets) * interval.count();
  check.ok = std::fabs(check.sampled_integral_ns - check.sojourn_sum_ns) <= check.tolerance_ns;
  return check;
}

RunComparison compare_runs(const TraceSeries& a, const TraceSeries& b, QueueKind kind) {
  if (a.sampling_interval != b.sampling_interval) throw ContractViolation("compare_runs: sampling intervals differ");
  const auto& sa = a.queue(kind);
  const auto& sb = b.queue(kind);
  if (sa.empty() || sb.empty()) throw ContractViolation("compare_runs: empty series");
  if (sa.front().time != sb.front().time) throw ContractViolation("compare_runs: sampling grids are disjoint");

  RunComparison report;
  report.kind = kind;
  const std::size_t n = std::max(sa.size(), sb.size());
  report.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ComparisonRow row;
    row.time = sa.front().time + a.sampling_interval * static_cast<std::int64_t>(i);
    row.a = i < sa.size() ? sa[i].length : sa.back().length;
    row.b = i < sb.size() ? sb[i].length : sb.back().length;
    if (row.a == row.b) {
      row.ratio = 1.0;
    } else if (row.b == 0) {
      row.ratio = std::numeric_limits<double>::infinity();
    } else {
      row.ratio = static_cast<double>(row.a) / static_cast<double>(row.b);
    }
    report.rows.push_back(row);
  }
  report.peak_a = peak_length(sa);
  report.peak_b = peak_length(sb);
  if (report.peak_a == report.peak_b) {
    report.peak_ratio = 1.0;
  } else if (report.peak_b == 0) {
    report.peak_ratio = std::numeric_limits<double>::infinity();
  } else {
    report.peak_ratio = static_cast<double>(report.peak_a) / static_cast<double>(report.peak_b);
  }
  auto drain_or_none = [kind](const TraceSeries& t) -> std::optional<Nanos> {
    try {
      return drain_time(t, kind);
    } catch (const ContractViolation&) {
      return std::nullopt;
    }
  };
  report.drain_a = drain_or_none(a);
  report.drain_b = drain_or_none(b);
  return report;
}

std::vector<double> freedman_diaconis_edges(std::span<const Nanos> values) {
  if (values.empty()) throw ContractViolation("freedman_diaconis_edges: empty list");
  std::vector<double> sorted;
  sorted.reserve(values.size());
  for (Nanos v : values) sorted.push_back(to_seconds(v));
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double iqr = quantile(0.75) - quantile(0.25);
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
  if (!(width > 0.0)) width = hi > lo ? (hi - lo) : 1e-6;
  // Cap the bin count so a few huge outliers cannot explode the histogram.
  constexpr std::size_t kMaxBins = 10'000;
  auto bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
  bins = std::clamp<std::size_t>(bins, 1, kMaxBins);
  width = hi > lo ? (hi - lo) / static_cast<double>(bins) : width;

  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) edges[i] = lo + width * static_cast<double>(i);
  edges.back() = std::nextafter(std::max(hi, edges.back()), std::numeric_limits<double>::infinity());
  return edges;
}

std::vector<double> extend_edges(std::span<const double> edges, std::span<const Nanos> values,
                                 std::size_t max_bins) {
  if (edges.size() < 2) throw ContractViolation("extend_edges: need at least two edges");
  std::vector<double> out(edges.begin(), edges.end());
  if (values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = to_seconds(*lo_it);
  const double hi = to_seconds(*hi_it);
  const double width = edges[1] - edges[0];
  const double origin = edges.front();
  const auto bins = out.size() - 1;
  const std::size_t room = max_bins > bins ? max_bins - bins : 0;
  const auto below = lo < origin ? static_cast<std::size_t>(std::ceil((origin - lo) / width)) : 0;
  const auto add_low = std::min(below, room);
  const auto above = hi >= out.back() ? static_cast<std::size_t>(std::floor((hi - out.back()) / width)) + 1 : 0;
  const auto add_high = std::min(above, room - add_low);
  std::vector<double> grown;
  grown.reserve(out.size() + add_low + add_high);
  for (std::size_t i = add_low; i > 0; --i) grown.push_back(origin - width * static_cast<double>(i));
  grown.insert(grown.end(), out.begin(), out.end());
  const double top = out.back();
  for (std::size_t i = 1; i <= add_high; ++i) grown.push_back(top + width * static_cast<double>(i));
  return grown;
}

Histogram histogram(std::span<const Nanos> values, std::span<const double> edges) {
  if (edges.size() < 2) throw ContractViolation("histogram: need at least two edges");
  if (!std::is_sorted(edges.begin(), edges.end())) throw ContractViolation("histogram: edges unsorted");
  Histogram h;
  h.edges.assign(edges.begin(), edges.end());
  h.counts.assign(edges.size() - 1, 0);
  for (Nanos v : values) {
    const double x = to_seconds(v);
    if (x < edges.front()) {
      ++h.below;
    } else if (x >= edges.back()) {
      ++h.above;
    } else {
      const auto it = std::upper_bound(edges.begin(), edges.end(), x);
      ++h.counts[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
  }
  return h;
}

}  // namespace qdtp
