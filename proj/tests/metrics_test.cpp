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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qdtp/errors.hpp"
#include "qdtp/metrics.hpp"
#include "qdtp/simulator.hpp"
#include "support/test_support.hpp"

namespace qdtp {
namespace {

using test::millis;

TEST(Summarize, ConstantValuesHaveZeroVariance) {
  const auto s = summarize(millis({3, 3, 3}));
  EXPECT_EQ(s.count, 3U);
  EXPECT_DOUBLE_EQ(s.mean, 0.003);
  EXPECT_DOUBLE_EQ(s.variance, 0.0);
}

TEST(Summarize, PopulationVariance) {
  const auto s = summarize(millis({2, 4}));
  EXPECT_NEAR(s.mean, 0.003, 1e-15);
  EXPECT_NEAR(s.variance * 1e6, 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(s.min, 0.002);
  EXPECT_DOUBLE_EQ(s.max, 0.004);
}

TEST(Summarize, NearestRankPercentiles) {
  std::vector<Nanos> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i * kMillisecond);
  const auto s = summarize(v);
  EXPECT_DOUBLE_EQ(s.p50, 0.050);
  EXPECT_DOUBLE_EQ(s.p95, 0.095);
  EXPECT_DOUBLE_EQ(s.p99, 0.099);
  EXPECT_DOUBLE_EQ(s.p999, 0.100);
}

TEST(Summarize, EmptyListIsContractViolation) {
  EXPECT_THROW(summarize(std::vector<Nanos>{}), ContractViolation);
}

TEST(Summarize, CalmServiceModelStatistics) {
  const auto draws = service_draws(5, 100'000);
  const auto model = ServiceModel::gaussian(0.00298, 5.5e-9);
  std::vector<Nanos> v;
  for (const auto& d : draws) v.push_back(model.sample(d));
  const auto s = summarize(v);
  EXPECT_NEAR(s.mean, 0.00298, 0.01 * 0.00298);
  EXPECT_NEAR(s.variance, 5.5e-9, 0.1 * 5.5e-9);
}

TEST(SummarizeProperties, PermutationInvariant) {
  std::mt19937_64 rng(41);
  for (int c = 0; c < test::kPropertyCases; ++c) {
    auto v = test::random_services(rng, test::random_length(rng, 1, 300), Nanos{1}, 50 * kMillisecond);
    const auto before = summarize(v);
    std::shuffle(v.begin(), v.end(), rng);
    const auto after = summarize(v);
    ASSERT_DOUBLE_EQ(before.mean, after.mean) << "case " << c;
    ASSERT_DOUBLE_EQ(before.variance, after.variance) << "case " << c;
    ASSERT_EQ(before.min, after.min);
    ASSERT_EQ(before.max, after.max);
    ASSERT_EQ(before.p50, after.p50);
    ASSERT_EQ(before.p99, after.p99);
  }
}

PacketRecord served(std::uint64_t id, Nanos a, std::optional<Nanos> t, Nanos start, Nanos end) {
  PacketRecord r;
  r.id = id;
  r.arrival = a;
  r.forwarded = t;
  r.service_start = start;
  r.service_end = end;
  return r;
}

std::vector<std::int64_t> lengths(const std::vector<QueueSample>& series) {
  std::vector<std::int64_t> out;
  for (const auto& q : series) out.push_back(q.length);
  return out;
}

TEST(QueueSeries, OnePacketOccupiesUntilServiceEnds) {
  const std::vector<PacketRecord> records{served(0, Nanos{0}, std::nullopt, Nanos{0}, 3 * kMillisecond)};
  const auto series = queue_series(records, QueueKind::kServer, kMillisecond, false, 5 * kMillisecond);
  EXPECT_EQ(lengths(series), (std::vector<std::int64_t>{1, 1, 1, 0, 0, 0}));
  EXPECT_EQ(series[3].time, 3 * kMillisecond);
}

TEST(QueueSeries, EmptyRecordsGiveAllZeroSeries) {
  const auto series = queue_series({}, QueueKind::kServer, kMillisecond, false, 3 * kMillisecond);
  ASSERT_FALSE(series.empty());
  for (const auto& q : series) EXPECT_EQ(q.length, 0);
}

TEST(QueueSeries, DepartureBeforeArrivalIsContractViolation) {
  const std::vector<PacketRecord> records{served(0, 5 * kMillisecond, std::nullopt, Nanos{0}, kMillisecond)};
  EXPECT_THROW(queue_series(records, QueueKind::kServer, kMillisecond, false), ContractViolation);
}

TEST(QueueSeries, SqfQueueUsesForwardInstant) {
  const std::vector<PacketRecord> records{served(0, Nanos{0}, 2 * kMillisecond, 2 * kMillisecond, 3 * kMillisecond)};
  EXPECT_EQ(lengths(queue_series(records, QueueKind::kSqf, kMillisecond, true, 3 * kMillisecond)),
            (std::vector<std::int64_t>{1, 1, 0, 0}));
  EXPECT_EQ(lengths(queue_series(records, QueueKind::kServer, kMillisecond, true, 3 * kMillisecond)),
            (std::vector<std::int64_t>{0, 0, 1, 0}));
}

TEST(MaxOccupancy, SeesPeaksBetweenSamples) {
  // Five packets arrive together between two samples and are gone by the next.
  std::vector<PacketRecord> records;
  const Nanos a = 10 * kMillisecond;
  for (int i = 0; i < 5; ++i) {
    records.push_back(served(static_cast<std::uint64_t>(i), a, std::nullopt, a + i * kMicrosecond,
                             a + (i + 1) * kMicrosecond));
  }
  EXPECT_EQ(peak_length(queue_series(records, QueueKind::kServer, 100 * kMillisecond, false)), 0);
  EXPECT_EQ(max_occupancy(records, QueueKind::kServer, false), 5);
}

TEST(Extractors, SplitSojournIntoParts) {
  const std::vector<PacketRecord> records{served(0, Nanos{0}, 2 * kMillisecond, 3 * kMillisecond, 7 * kMillisecond)};
  EXPECT_EQ(service_times(records), millis({4}));
  EXPECT_EQ(server_waits_of(records), millis({1}));
  EXPECT_EQ(sqf_delays_of(records), millis({2}));
  EXPECT_EQ(server_sojourns_of(records), millis({5}));
}

TraceSeries run_of(const std::vector<std::int64_t>& server_lengths, Nanos interval = 100 * kMillisecond) {
  TraceSeries t;
  t.sampling_interval = interval;
  for (std::size_t i = 0; i < server_lengths.size(); ++i) {
    t.server_queue.push_back({static_cast<std::int64_t>(i) * interval, server_lengths[i]});
    t.sqf_queue.push_back({static_cast<std::int64_t>(i) * interval, 0});
  }
  return t;
}

TEST(CompareRuns, IdenticalRunsHaveUnitRatios) {
  const auto a = run_of({0, 3, 5, 2, 0});
  const auto report = compare_runs(a, a, QueueKind::kServer);
  ASSERT_EQ(report.rows.size(), 5U);
  for (const auto& row : report.rows) EXPECT_DOUBLE_EQ(row.ratio, 1.0);
  EXPECT_DOUBLE_EQ(report.peak_ratio, 1.0);
}

TEST(CompareRuns, ShorterSeriesIsPaddedAndZeroDenominatorIsInfinite) {
  const auto report = compare_runs(run_of({4, 8, 2}), run_of({2, 0}), QueueKind::kServer);
  ASSERT_EQ(report.rows.size(), 3U);
  EXPECT_DOUBLE_EQ(report.rows[0].ratio, 2.0);
  EXPECT_TRUE(std::isinf(report.rows[1].ratio));
  EXPECT_EQ(report.rows[2].b, 0);
  EXPECT_DOUBLE_EQ(report.peak_ratio, 4.0);
}

TEST(CompareRuns, DisjointGridsAreRejected) {
  EXPECT_THROW(compare_runs(run_of({1, 2}), run_of({1, 2}, 50 * kMillisecond), QueueKind::kServer), ContractViolation);
  auto shifted = run_of({1, 2});
  for (auto& q : shifted.server_queue) q.time += Nanos{7};
  EXPECT_THROW(compare_runs(run_of({1, 2}), shifted, QueueKind::kServer), ContractViolation);
}

TEST(Histogram, FreedmanDiaconisCoversTheData) {
  std::mt19937_64 rng(43);
  const auto v = test::random_services(rng, 5000, from_millis(2.0), from_millis(4.0));
  const auto edges = freedman_diaconis_edges(v);
  ASSERT_GE(edges.size(), 2U);
  const auto h = histogram(v, edges);
  EXPECT_EQ(h.below, 0U);
  EXPECT_EQ(h.above, 0U);
  std::size_t total = 0;
  for (auto c : h.counts) total += c;
  EXPECT_EQ(total, v.size());
}

TEST(Histogram, ExtendedEdgesKeepWidthAndCoverNewData) {
  const std::vector<double> edges{0.001, 0.002, 0.003};
  const auto grown = extend_edges(edges, millis({0.5, 7.5}));
  EXPECT_NEAR(grown.front(), 0.0, 1e-12);
  EXPECT_GT(grown.back(), 0.0075);
  for (std::size_t i = 1; i < grown.size(); ++i) EXPECT_NEAR(grown[i] - grown[i - 1], 0.001, 1e-12);
  const auto h = histogram(millis({0.5, 7.5}), grown);
  EXPECT_EQ(h.below + h.above, 0U);
  EXPECT_EQ(extend_edges(edges, millis({1e6}), 5).size(), 6U);
}

TEST(Histogram, OutOfRangeValuesAreCountedSeparately) {
  const std::vector<double> edges{0.001, 0.002};
  const auto h = histogram(millis({0.5, 1.5, 2.0, 9.0}), edges);
  EXPECT_EQ(h.below, 1U);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{1}));
  EXPECT_EQ(h.above, 2U);
}

TEST(LittleLaw, IncompleteTraceIsRejected) {
  std::vector<PacketRecord> records{served(0, Nanos{0}, std::nullopt, Nanos{0}, kMillisecond)};
  records[0].service_end.reset();
  EXPECT_THROW(little_law_check(records, {}, QueueKind::kServer, kMillisecond, false), ContractViolation);
}

}  // namespace
}  // namespace qdtp
