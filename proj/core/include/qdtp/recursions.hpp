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

#include <span>
#include <vector>

#include "qdtp/time.hpp"

namespace qdtp {

/// Spacing parameter of the forwarding policy: consecutive forwarding
/// instants are at least `spacing` apart.
class QdtpConfig {
 public:
  /// Throws ConfigError unless spacing > 0.
  explicit QdtpConfig(Nanos spacing);
  static QdtpConfig from_millis(double millis);

  [[nodiscard]] Nanos spacing() const noexcept { return spacing_; }

  friend bool operator==(const QdtpConfig&, const QdtpConfig&) = default;

 private:
  Nanos spacing_;
};

/// Forwarding instants t_n and the shaping delays q_n = t_n - a_n.
struct ForwardSchedule {
  std::vector<Nanos> times;
  std::vector<Nanos> delays;

  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
};

enum class WaitRole {
  kServerAlone,   ///< server fed directly by the LAN
  kBehindShaper,  ///< server fed by the shaping forwarder
};

struct WaitSequence {
  WaitRole role = WaitRole::kServerAlone;
  std::vector<Nanos> waits;

  [[nodiscard]] std::size_t size() const noexcept { return waits.size(); }
};

/// FIFO waiting times of a single server fed at `arrivals` with per-packet
/// service times `services`:
///   L_0 = 0,  L_{n+1} = max(L_n + T_n - (a_{n+1} - a_n), 0).
/// Throws ContractViolation on length mismatch, unsorted or negative
/// arrivals, or non-positive service times. Empty input yields empty output.
WaitSequence lindley_waits(std::span<const Nanos> arrivals, std::span<const Nanos> services);

/// Forwarding instants t_0 = a_0, t_{n+1} = max(t_n + D, a_{n+1}).
ForwardSchedule qdtp_schedule(std::span<const Nanos> arrivals, const QdtpConfig& cfg);

/// Shaping delays from their own recursion, Q_0 = 0,
/// Q_{n+1} = max(Q_n + D - (a_{n+1} - a_n), 0). Equal element-wise to
/// qdtp_schedule(arrivals, cfg).delays; the two are kept as independent routes.
std::vector<Nanos> qdtp_delays(std::span<const Nanos> arrivals, const QdtpConfig& cfg);

/// Server waiting times behind the forwarder,
/// W_0 = 0, W_{n+1} = max(W_n + T_n - (t_{n+1} - t_n), 0).
WaitSequence server_waits(const ForwardSchedule& schedule, std::span<const Nanos> services);

/// True iff D > max T_n. When it holds, server_waits(qdtp_schedule(a, cfg), T)
/// is identically zero for every arrival sequence a. D == max T_n also gives
/// zero waits but is reported as false to keep the strict inequality.
bool check_result1(std::span<const Nanos> services, const QdtpConfig& cfg);

/// Per-packet sojourn from system entry to end of service: q_n + W_n + T_n.
std::vector<Nanos> end_to_end_delay(std::span<const Nanos> arrivals, const ForwardSchedule& schedule,
                                    const WaitSequence& waits, std::span<const Nanos> services);

}  // namespace qdtp
