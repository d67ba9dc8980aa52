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
#include <chrono>
#include <string>
#include <thread>
#include <vector>

#include "qdtp/datagram.hpp"
#include "qdtp/errors.hpp"
#include "qdtp/forwarder.hpp"
#include "qdtp/recursions.hpp"
#include "qdtp/simulator.hpp"
#include "support/udp_sink.hpp"

namespace qdtp {
namespace {

using namespace std::chrono_literals;

constexpr Nanos kD = 3 * kMillisecond;
constexpr Nanos kEps = kDefaultPacingTolerance;

ForwarderConfig config_for(const test::UdpSink& sink) {
  ForwarderConfig cfg;
  cfg.listen = SocketAddress::loopback(0);
  cfg.upstream = sink.address();
  cfg.spacing = kD;
  cfg.record_timeline = true;
  return cfg;
}

/// Waits until `received` datagrams were taken in and none is left queued.
ForwarderStats settle(const Forwarder& fwd, std::uint64_t received, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto s = fwd.snapshot_stats();
    if ((s.received >= received && s.queue_len == 0) || std::chrono::steady_clock::now() > deadline) return s;
    std::this_thread::sleep_for(5ms);
  }
}

std::vector<Nanos> received_instants(const std::vector<TimelineEntry>& timeline) {
  std::vector<Nanos> out;
  for (const auto& e : timeline) out.push_back(e.received);
  return out;
}

TEST(Forwarder, StatsStartAtZero) {
  test::UdpSink sink;
  Forwarder fwd(config_for(sink));
  fwd.start();
  const auto s = fwd.snapshot_stats();
  EXPECT_EQ(s.received, 0U);
  EXPECT_EQ(s.forwarded, 0U);
  EXPECT_EQ(s.dropped_mitigation + s.dropped_capacity + s.queue_len + s.pacing_violations, 0U);
  EXPECT_TRUE(s.conserved());
  fwd.stop();
}

TEST(Forwarder, WidelySpacedDatagramsPassUntouched) {
  test::UdpSink sink;
  Forwarder fwd(config_for(sink));
  fwd.start();
  test::send_burst(fwd.listen_address(), 1);
  std::this_thread::sleep_for(std::chrono::nanoseconds(10 * kD));
  test::send_burst(fwd.listen_address(), 1);
  const auto stats = settle(fwd, 2, 2s);
  fwd.stop();
  ASSERT_EQ(stats.forwarded, 2U);
  for (const auto& e : fwd.timeline()) {
    ASSERT_TRUE(e.departed);
    EXPECT_EQ(*e.planned, e.received);
    EXPECT_LT((*e.departed - e.received).count(), kEps.count());
  }
}

TEST(Forwarder, BurstIsPacedAndForwardedVerbatim) {
  test::UdpSink sink;
  Forwarder fwd(config_for(sink));
  fwd.start();
  const auto sent = test::send_burst(fwd.listen_address(), 100);
  const auto stats = settle(fwd, 100, 5s);
  ASSERT_TRUE(sink.wait_for(100, 2s));
  fwd.stop();

  EXPECT_EQ(stats.received, 100U);
  EXPECT_EQ(stats.forwarded, 100U);
  EXPECT_EQ(stats.dropped_mitigation + stats.dropped_capacity, 0U);
  EXPECT_EQ(stats.pacing_violations, 0U);
  EXPECT_TRUE(stats.conserved());

  const auto timeline = fwd.timeline();
  ASSERT_EQ(timeline.size(), 100U);
  const auto planned = qdtp_schedule(received_instants(timeline), QdtpConfig(kD)).times;
  for (std::size_t i = 0; i < timeline.size(); ++i) {
    EXPECT_EQ(*timeline[i].planned, planned[i]);
    if (i > 0) {
      EXPECT_GE((*timeline[i].departed - *timeline[i - 1].departed).count(), (kD - kEps).count());
    }
  }
  const Nanos span = *timeline.back().departed - *timeline.front().departed;
  EXPECT_NEAR(to_millis(span), 297.0, to_millis(kEps) + to_millis(timeline.back().received - timeline.front().received));

  const auto got = sink.payloads();
  ASSERT_EQ(got.size(), sent.size());
  for (std::size_t i = 0; i < sent.size(); ++i) {
    ASSERT_TRUE(std::equal(got[i].begin(), got[i].end(), sent[i].begin(), sent[i].end())) << "datagram " << i;
  }
}

TEST(Forwarder, MitigationAdmitsOneWindowOfABurst) {
  test::UdpSink sink;
  auto cfg = config_for(sink);
  cfg.mitigation = MitigationParams{10, 3.0};
  Forwarder fwd(cfg);
  fwd.start();
  test::send_burst(fwd.listen_address(), 1000, 9, true);
  const auto stats = settle(fwd, 1000, 5s);
  fwd.stop();

  EXPECT_EQ(stats.received, 1000U);
  EXPECT_TRUE(stats.conserved());
  EXPECT_EQ(stats.forwarded + stats.dropped_mitigation, 1000U - stats.queue_len);

  // Replay the rule on the recorded receive instants.
  const auto timeline = fwd.timeline();
  MitigationPolicy policy(*cfg.mitigation, kD);
  std::vector<Nanos> admitted;
  for (const auto& e : timeline) {
    const bool drop = mitigation_step(policy, e.received) == MitigationPolicy::Decision::kDrop;
    EXPECT_EQ(drop, e.drop == DropReason::kMitigation) << "sequence " << e.sequence;
    if (!drop) admitted.push_back(e.received);
  }
  ASSERT_FALSE(admitted.empty());
  const Nanos first = timeline.front().received;
  const auto in_first_window = std::count_if(admitted.begin(), admitted.end(), [&](Nanos t) { return t < first + kD; });
  EXPECT_LE(in_first_window, 11);
  // After the first trip nothing is admitted for K * D.
  const auto trip = std::find_if(timeline.begin(), timeline.end(), [](const TimelineEntry& e) { return e.drop != DropReason::kNone; });
  ASSERT_NE(trip, timeline.end());
  for (Nanos t : admitted) EXPECT_TRUE(t < trip->received || t >= trip->received + 3 * kD);
}

TEST(Forwarder, ControlSocketForcesDrops) {
  test::UdpSink sink;
  auto cfg = config_for(sink);
  cfg.control = SocketAddress::loopback(0);
  Forwarder fwd(cfg);
  fwd.start();
  auto client = UdpSocket::bind(SocketAddress::loopback(0));
  auto ask = [&](const std::string& text) {
    client.send_to(std::as_bytes(std::span(text.data(), text.size())), *fwd.control_address());
    std::array<std::byte, 64> buf{};
    const auto n = client.receive(buf, nullptr, kSecond);
    return n ? std::string(reinterpret_cast<const char*>(buf.data()), *n) : std::string("timeout");
  };
  EXPECT_EQ(ask("DROP nonsense\n"), "ERR expected 'DROP <seconds>'\n");
  EXPECT_EQ(ask("HELLO\n"), "ERR expected 'DROP <seconds>'\n");
  EXPECT_EQ(ask("DROP 5\n"), "OK\n");
  test::send_burst(fwd.listen_address(), 20);
  const auto stats = settle(fwd, 20, 2s);
  fwd.stop();
  EXPECT_EQ(stats.dropped_mitigation, 20U);
  EXPECT_EQ(stats.forwarded, 0U);
}

TEST(Forwarder, CapacityBoundDropsWithoutBlocking) {
  test::UdpSink sink;
  auto cfg = config_for(sink);
  cfg.queue_capacity = 5;
  Forwarder fwd(cfg);
  fwd.start();
  test::send_burst(fwd.listen_address(), 50);
  const auto stats = settle(fwd, 50, 3s);
  fwd.stop();
  EXPECT_EQ(stats.received, 50U);
  EXPECT_GT(stats.dropped_capacity, 0U);
  EXPECT_TRUE(stats.conserved());
}

TEST(Forwarder, BusyListenPortIsStartupError) {
  test::UdpSink sink;
  auto cfg = config_for(sink);
  auto taken = UdpSocket::bind(SocketAddress::loopback(0));
  cfg.listen = taken.local_address();
  EXPECT_THROW(Forwarder{cfg}, StartupError);
}

TEST(Forwarder, SpacingBelowClockResolutionIsRejected) {
  test::UdpSink sink;
  auto cfg = config_for(sink);
  cfg.spacing = Nanos{0};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.spacing = clock_resolution() - Nanos{1};
  EXPECT_THROW(Forwarder{cfg}, ConfigError);
}

TEST(ForwarderStats, JsonLineHasEveryCounter) {
  ForwarderStats s;
  s.received = 3;
  s.forwarded = 2;
  s.queue_len = 1;
  const auto line = s.to_json();
  EXPECT_EQ(line.find('\n'), std::string::npos);
  for (const char* key : {"received", "forwarded", "dropped_mitigation", "dropped_capacity", "queue_len",
                          "pacing_violations", "send_errors"}) {
    EXPECT_NE(line.find(key), std::string::npos) << key;
  }
  EXPECT_TRUE(s.conserved());
}

TEST(Datagram, EncodeDecodeRoundTrip) {
  const DatagramHeader h{7, 123456789012ULL, true, -4500};
  const auto bytes = encode_datagram(h);
  EXPECT_EQ(bytes.size(), kDatagramSize);
  EXPECT_EQ(decode_datagram(bytes), h);
  auto bad = bytes;
  bad[0] = std::byte{'X'};
  EXPECT_FALSE(decode_datagram(bad));
  EXPECT_FALSE(decode_datagram(std::span(bytes).first(10)));
}

TEST(SocketAddress, ParsesHostPort) {
  EXPECT_EQ(SocketAddress::parse("127.0.0.1:9000"), SocketAddress::loopback(9000));
  EXPECT_EQ(SocketAddress::parse("localhost:9000").port(), 9000);
  EXPECT_EQ(SocketAddress::parse(":7000").to_string(), "0.0.0.0:7000");
  EXPECT_THROW(SocketAddress::parse("127.0.0.1"), ConfigError);
  EXPECT_THROW(SocketAddress::parse("127.0.0.1:99999"), ConfigError);
}

}  // namespace
}  // namespace qdtp
