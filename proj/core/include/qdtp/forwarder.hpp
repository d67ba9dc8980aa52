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

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qdtp/mitigation.hpp"
#include "qdtp/pacing_clock.hpp"
#include "qdtp/pi_mutex.hpp"
#include "qdtp/simulator.hpp"
#include "qdtp/udp_socket.hpp"

namespace qdtp {

struct ForwarderConfig {
  SocketAddress listen;
  SocketAddress upstream;
  Nanos spacing{3 * kMillisecond};
  std::optional<MitigationParams> mitigation;
  std::optional<std::size_t> queue_capacity;  ///< unbounded when absent
  std::optional<SocketAddress> control;       ///< accepts "DROP <seconds>\n"
  Nanos stats_interval{kSecond};
  Nanos tolerance{kDefaultPacingTolerance};
  Nanos spin_window{kDefaultSpinWindow};
  int receive_buffer_bytes = 8 << 20;
  /// Run the pacer under SCHED_FIFO when the OS allows it.
  bool realtime_pacer = true;
  /// Keep a per-packet timeline (receive, planned and actual departure).
  bool record_timeline = false;

  /// Throws ConfigError when the spacing is below the monotonic clock
  /// resolution or a bounded capacity is zero.
  void validate() const;
};

/// Counters and queue length taken under one lock, so
/// received == forwarded + dropped_mitigation + dropped_capacity + queue_len.
struct ForwarderStats {
  std::uint64_t received = 0;
  std::uint64_t forwarded = 0;
  std::uint64_t dropped_mitigation = 0;
  std::uint64_t dropped_capacity = 0;
  std::uint64_t queue_len = 0;
  std::optional<Nanos> inter_departure_min;
  std::uint64_t pacing_violations = 0;  ///< departure gaps below D - tolerance
  std::uint64_t send_errors = 0;

  [[nodiscard]] bool conserved() const noexcept {
    return received == forwarded + dropped_mitigation + dropped_capacity + queue_len;
  }
  /// One line of JSON, no trailing newline.
  [[nodiscard]] std::string to_json() const;
};

struct TimelineEntry {
  std::uint64_t sequence = 0;
  Nanos received{};
  DropReason drop = DropReason::kNone;
  std::optional<Nanos> planned;
  std::optional<Nanos> departed;
};

/// Live UDP shaping forwarder. Datagrams received on `listen` are admitted by
/// the mitigation rule and the capacity bound, queued FIFO and sent verbatim
/// to `upstream` at t_{n+1} = max(t_n + D, a_{n+1}) on the monotonic clock.
///
/// Threads: ingress (receive and enqueue, never blocks on sending), pacer
/// (dequeue and timed send) and optionally control. They share the FIFO,
/// counters and mitigation state under one mutex.
class Forwarder {
 public:
  /// Validates the configuration and binds all sockets. Throws ConfigError or
  /// StartupError.
  explicit Forwarder(ForwarderConfig config);
  ~Forwarder();

  Forwarder(const Forwarder&) = delete;
  Forwarder& operator=(const Forwarder&) = delete;

  void start();
  /// Stops and joins all threads. Queued datagrams are discarded but stay
  /// counted in queue_len.
  void stop();

  [[nodiscard]] ForwarderStats snapshot_stats() const;
  [[nodiscard]] std::vector<TimelineEntry> timeline() const;

  /// Drops every arrival for the next `duration`.
  void force_drop(Nanos duration);

  [[nodiscard]] SocketAddress listen_address() const { return ingress_.local_address(); }
  [[nodiscard]] std::optional<SocketAddress> control_address() const;
  [[nodiscard]] const MonotonicClock& clock() const noexcept { return clock_; }
  [[nodiscard]] const ForwarderConfig& config() const noexcept { return config_; }
  /// True once the pacer thread runs with real-time priority.
  [[nodiscard]] bool pacer_realtime() const noexcept { return pacer_realtime_; }

 private:
  struct Queued {
    std::uint64_t sequence;
    Nanos received;
    std::vector<std::byte> payload;
  };

  void ingress_loop();
  void pacer_loop();
  void control_loop();

  ForwarderConfig config_;
  MonotonicClock clock_;
  UdpSocket ingress_;
  UdpSocket egress_;
  std::optional<UdpSocket> control_;

  mutable PiMutex mu_;
  std::condition_variable_any cv_;
  std::deque<Queued> fifo_;
  MitigationPolicy policy_;
  ForwarderStats stats_;
  std::vector<TimelineEntry> timeline_;
  std::optional<Nanos> last_planned_;
  std::optional<Nanos> last_departed_;
  std::uint64_t next_sequence_ = 0;

  std::atomic<bool> stopping_{false};
  std::atomic<bool> pacer_realtime_{false};
  bool started_ = false;
  std::thread ingress_thread_;
  std::thread pacer_thread_;
  std::thread control_thread_;
};

/// Runs a forwarder until `stop` becomes true, writing a stats line to `out`
/// every stats_interval.
void run_forwarder(const ForwarderConfig& config, const std::atomic<bool>& stop, std::ostream& out);

}  // namespace qdtp
