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
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "qdtp/pacing_clock.hpp"
#include "qdtp/pi_mutex.hpp"
#include "qdtp/scenario.hpp"
#include "qdtp/simulator.hpp"
#include "qdtp/udp_socket.hpp"

namespace qdtp {

struct StubConfig {
  SocketAddress listen;
  ServiceModel service = ServiceModel::constant(0.003);
  std::uint64_t seed = 1;
  Nanos spin_window{kDefaultSpinWindow};
  int receive_buffer_bytes = 8 << 20;
  /// Run the service thread under SCHED_FIFO when the OS allows it.
  bool realtime_service = true;
};

/// Stand-in for the protected server: timestamps each datagram on receipt and
/// "processes" packets FCFS by holding each for a service time drawn from the
/// configured model. Records use the packets.csv schema with no forward
/// instant; source and attack flag come from the datagram header when it
/// parses.
class ServerStub {
 public:
  explicit ServerStub(StubConfig config);
  ~ServerStub();

  ServerStub(const ServerStub&) = delete;
  ServerStub& operator=(const ServerStub&) = delete;

  void start();
  void stop();

  /// Snapshot of every received packet so far, in arrival order.
  [[nodiscard]] std::vector<PacketRecord> records() const;
  [[nodiscard]] std::size_t received() const;
  [[nodiscard]] std::size_t processed() const;

  [[nodiscard]] SocketAddress listen_address() const { return socket_.local_address(); }
  [[nodiscard]] const MonotonicClock& clock() const noexcept { return clock_; }

 private:
  void receive_loop();
  void service_loop();
  Nanos next_service_time();

  StubConfig config_;
  MonotonicClock clock_;
  UdpSocket socket_;
  std::mt19937_64 rng_;

  mutable PiMutex mu_;
  std::condition_variable_any cv_;
  std::deque<std::size_t> pending_;
  std::vector<PacketRecord> records_;
  std::size_t processed_ = 0;

  std::atomic<bool> stopping_{false};
  bool started_ = false;
  std::thread receive_thread_;
  std::thread service_thread_;
};

}  // namespace qdtp
