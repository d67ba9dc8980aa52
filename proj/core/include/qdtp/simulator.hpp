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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qdtp/mitigation.hpp"
#include "qdtp/recursions.hpp"
#include "qdtp/scenario.hpp"
#include "qdtp/time.hpp"

namespace qdtp {

enum class DropReason { kNone, kMitigation, kCapacity };

std::string_view to_string(DropReason reason);
DropReason parse_drop_reason(std::string_view text);

/// Lifecycle of one packet. Instants are relative to the run origin.
/// For delivered packets: arrival <= server_entry() <= service_start <= service_end.
struct PacketRecord {
  std::uint64_t id = 0;
  std::uint32_t source = 0;
  bool is_attack = false;
  Nanos arrival{};
  std::optional<Nanos> forwarded;  ///< absent without a forwarder
  std::optional<Nanos> service_start;
  std::optional<Nanos> service_end;
  DropReason drop = DropReason::kNone;

  [[nodiscard]] bool dropped() const noexcept { return drop != DropReason::kNone; }
  [[nodiscard]] bool completed() const noexcept { return service_end.has_value(); }
  /// Instant the packet joins the server queue.
  [[nodiscard]] Nanos server_entry() const noexcept { return forwarded.value_or(arrival); }

  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

enum class QueueKind { kSqf, kServer };

std::string_view to_string(QueueKind kind);

/// Interval [enter, leave) a packet spends in the given queue; leave is absent
/// while the packet is still there. Empty for dropped packets and for packets
/// that never joined the queue.
struct QueueStay {
  Nanos enter{};
  std::optional<Nanos> leave;
};
std::optional<QueueStay> queue_stay(const PacketRecord& record, QueueKind kind, bool has_forwarder);

struct QueueSample {
  Nanos time{};
  std::int64_t length = 0;

  friend bool operator==(const QueueSample&, const QueueSample&) = default;
};

/// Output of one simulated (or recorded) run.
struct TraceSeries {
  Nanos sampling_interval{100 * kMillisecond};
  std::vector<QueueSample> sqf_queue;
  std::vector<QueueSample> server_queue;
  std::vector<PacketRecord> per_packet;
  std::optional<Nanos> attack_start;
  std::optional<Nanos> attack_end;
  /// Packets passed through a shaping forwarder. `sqf` holds its spacing when
  /// known; recorded live traces may lack it.
  bool forwarder = false;
  std::optional<QdtpConfig> sqf;
  std::optional<MitigationParams> mitigation;

  [[nodiscard]] const std::vector<QueueSample>& queue(QueueKind kind) const {
    return kind == QueueKind::kSqf ? sqf_queue : server_queue;
  }
};

struct SimulationOptions {
  Nanos sampling_interval{100 * kMillisecond};
  /// Bound on the ingress queue (the forwarder's, or the server's when there
  /// is no forwarder). Unbounded by default.
  std::optional<std::size_t> queue_capacity;
  /// Stop processing events after this instant; packets still queued stay
  /// incomplete. Runs to completion by default.
  std::optional<Nanos> stop_at;
};

/// Event-driven simulation of a single FCFS server, optionally behind the
/// shaping forwarder and its mitigation rule. Events at one instant are
/// handled in the order departure, mitigation expiry, arrival, forward; a
/// queue sample at instant s reflects every event at or before s.
///
/// Throws ConfigError when mitigation is requested without a forwarder.
TraceSeries simulate(const Workload& workload, const std::optional<QdtpConfig>& sqf,
                     const std::optional<MitigationParams>& mitigation, const SimulationOptions& options = {});

TraceSeries simulate(const Scenario& scenario, const std::optional<QdtpConfig>& sqf,
                     const std::optional<MitigationParams>& mitigation, const SimulationOptions& options = {});

/// Time from the end of the attack until the named queue is first empty.
/// Zero without an attack or when the queue is already empty at attack end.
/// Throws ContractViolation if any delivered packet is incomplete.
Nanos drain_time(const TraceSeries& trace, QueueKind kind);

/// Decides one arrival with the mitigation rule.
inline MitigationPolicy::Decision mitigation_step(MitigationPolicy& policy, Nanos arrival) {
  return policy.on_arrival(arrival);
}

struct CheckResult {
  bool ok = true;
  std::string detail;

  explicit operator bool() const noexcept { return ok; }
};

/// Re-derives forwarding instants and waits of the admitted packets with the
/// closed-form recursions and compares them to the trace, exactly. Fails for
/// a forwarder trace whose spacing is unknown.
CheckResult check_oracle_equivalence(const TraceSeries& trace);

/// Every packet is completed, dropped or still queued, never two at once;
/// service order equals arrival order among admitted packets.
CheckResult check_conservation(const TraceSeries& trace);

}  // namespace qdtp
