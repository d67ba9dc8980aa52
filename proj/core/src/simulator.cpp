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

#include "qdtp/simulator.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <sstream>

#include "qdtp/errors.hpp"

namespace qdtp {

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::kNone:
      return "";
    case DropReason::kMitigation:
      return "mitigation";
    case DropReason::kCapacity:
      return "capacity";
  }
  return "";
}

DropReason parse_drop_reason(std::string_view text) {
  if (text.empty() || text == "none") return DropReason::kNone;
  if (text == "mitigation") return DropReason::kMitigation;
  if (text == "capacity") return DropReason::kCapacity;
  throw ContractViolation("unknown drop reason '" + std::string(text) + "'");
}

std::string_view to_string(QueueKind kind) { return kind == QueueKind::kSqf ? "sqf" : "server"; }

std::optional<QueueStay> queue_stay(const PacketRecord& record, QueueKind kind, bool has_forwarder) {
  if (record.dropped()) return std::nullopt;
  if (kind == QueueKind::kSqf) {
    if (!has_forwarder) return std::nullopt;
    return QueueStay{record.arrival, record.forwarded};
  }
  if (has_forwarder && !record.forwarded) return std::nullopt;
  return QueueStay{record.server_entry(), record.service_end};
}

namespace {

constexpr Nanos kNever = Nanos::max();

// Event kinds in tie-break order.
enum class Event { kDeparture = 0, kExpiry = 1, kArrival = 2, kForward = 3 };

class Engine {
 public:
  Engine(const Workload& workload, const std::optional<QdtpConfig>& sqf,
         const std::optional<MitigationParams>& mitigation, const SimulationOptions& options)
      : workload_(workload), sqf_(sqf), options_(options) {
    if (mitigation) {
      if (!sqf) throw ConfigError("simulate: mitigation requires a forwarder spacing D");
      policy_.emplace(*mitigation, sqf->spacing());
    }
    if (options.sampling_interval <= Nanos::zero()) throw ConfigError("simulate: sampling interval must be > 0");
    if (options.queue_capacity && *options.queue_capacity == 0) throw ConfigError("simulate: capacity must be >= 1");
    if (workload.services.size() < workload.arrivals.size()) {
      throw ConfigError("simulate: service process shorter than the arrival stream");
    }

    trace_.sampling_interval = options.sampling_interval;
    trace_.attack_start = workload.attack_start;
    trace_.attack_end = workload.attack_end;
    trace_.forwarder = sqf.has_value();
    trace_.sqf = sqf;
    trace_.mitigation = mitigation;
    trace_.per_packet.resize(workload.arrivals.size());
    for (std::size_t i = 0; i < workload.arrivals.size(); ++i) {
      const Arrival& a = workload.arrivals[i];
      if (i > 0 && a.time < workload.arrivals[i - 1].time) throw ContractViolation("simulate: arrivals unsorted");
      if (a.time < Nanos::zero()) throw ContractViolation("simulate: negative arrival instant");
      auto& r = trace_.per_packet[i];
      r.id = i;
      r.source = a.source;
      r.is_attack = a.is_attack;
      r.arrival = a.time;
    }
  }

  TraceSeries run() && {
    Nanos last_event = Nanos::zero();
    for (;;) {
      const auto [when, event] = next_event();
      if (when == kNever) break;
      if (options_.stop_at && when > *options_.stop_at) {
        last_event = *options_.stop_at;
        break;
      }
      sample_before(when);
      dispatch(event, when);
      last_event = when;
    }
    sample_through(last_event);
    return std::move(trace_);
  }

 private:
  std::pair<Nanos, Event> next_event() const {
    std::pair<Nanos, Event> best{kNever, Event::kForward};
    auto consider = [&](Nanos when, Event e) {
      if (when < best.first || (when == best.first && e < best.second)) best = {when, e};
    };
    consider(departure_at_, Event::kDeparture);
    if (policy_ && policy_->dropping_until()) consider(*policy_->dropping_until(), Event::kExpiry);
    if (next_arrival_ < workload_.arrivals.size()) consider(workload_.arrivals[next_arrival_].time, Event::kArrival);
    consider(forward_at_, Event::kForward);
    return best;
  }

  void dispatch(Event event, Nanos now) {
    switch (event) {
      case Event::kDeparture:
        on_departure(now);
        break;
      case Event::kExpiry:
        policy_->advance(now);
        break;
      case Event::kArrival:
        on_arrival(next_arrival_++, now);
        break;
      case Event::kForward:
        on_forward(now);
        break;
    }
  }

  void on_arrival(std::size_t id, Nanos now) {
    auto& record = trace_.per_packet[id];
    if (policy_ && policy_->on_arrival(now) == MitigationPolicy::Decision::kDrop) {
      record.drop = DropReason::kMitigation;
      return;
    }
    const std::size_t ingress_len = sqf_ ? sqf_fifo_.size() : server_len_;
    if (options_.queue_capacity && ingress_len >= *options_.queue_capacity) {
      record.drop = DropReason::kCapacity;
      return;
    }
    if (!sqf_) {
      enter_server(id, now);
      return;
    }
    sqf_fifo_.push_back(id);
    if (forward_at_ == kNever) {
      forward_at_ = last_forward_ ? std::max(*last_forward_ + sqf_->spacing(), now) : now;
    }
  }

  void on_forward(Nanos now) {
    const std::size_t id = sqf_fifo_.front();
    sqf_fifo_.pop_front();
    trace_.per_packet[id].forwarded = now;
    last_forward_ = now;
    forward_at_ = sqf_fifo_.empty() ? kNever : now + sqf_->spacing();
    enter_server(id, now);
  }

  void enter_server(std::size_t id, Nanos now) {
    ++server_len_;
    if (in_service_) {
      server_fifo_.push_back(id);
    } else {
      start_service(id, now);
    }
  }

  void start_service(std::size_t id, Nanos now) {
    in_service_ = id;
    trace_.per_packet[id].service_start = now;
    departure_at_ = now + workload_.services.service_time(id, server_len_);
  }

  void on_departure(Nanos now) {
    trace_.per_packet[*in_service_].service_end = now;
    in_service_.reset();
    departure_at_ = kNever;
    --server_len_;
    if (!server_fifo_.empty()) {
      const std::size_t next = server_fifo_.front();
      server_fifo_.pop_front();
      start_service(next, now);
    }
  }

  void push_sample(Nanos at) {
    trace_.sqf_queue.push_back({at, static_cast<std::int64_t>(sqf_fifo_.size())});
    trace_.server_queue.push_back({at, static_cast<std::int64_t>(server_len_)});
    next_sample_ += options_.sampling_interval;
  }

  // Samples strictly before `when` see the state after all earlier events.
  void sample_before(Nanos when) {
    while (next_sample_ < when) push_sample(next_sample_);
  }

  // Samples up to and including the first grid point at or after `end`.
  void sample_through(Nanos end) {
    while (next_sample_ <= end) push_sample(next_sample_);
    if (!options_.stop_at && trace_.server_queue.back().time < end) push_sample(next_sample_);
  }

  const Workload& workload_;
  std::optional<QdtpConfig> sqf_;
  SimulationOptions options_;
  std::optional<MitigationPolicy> policy_;
  TraceSeries trace_;

  std::size_t next_arrival_ = 0;
  std::deque<std::size_t> sqf_fifo_;
  Nanos forward_at_ = kNever;
  std::optional<Nanos> last_forward_;

  std::deque<std::size_t> server_fifo_;
  std::optional<std::size_t> in_service_;
  std::size_t server_len_ = 0;
  Nanos departure_at_ = kNever;

  Nanos next_sample_ = Nanos::zero();
};

}  // namespace

TraceSeries simulate(const Workload& workload, const std::optional<QdtpConfig>& sqf,
                     const std::optional<MitigationParams>& mitigation, const SimulationOptions& options) {
  return Engine(workload, sqf, mitigation, options).run();
}

TraceSeries simulate(const Scenario& scenario, const std::optional<QdtpConfig>& sqf,
                     const std::optional<MitigationParams>& mitigation, const SimulationOptions& options) {
  return simulate(make_workload(scenario), sqf, mitigation, options);
}

Nanos drain_time(const TraceSeries& trace, QueueKind kind) {
  for (const auto& r : trace.per_packet) {
    if (!r.dropped() && !r.completed()) {
      throw ContractViolation("drain_time: packet " + std::to_string(r.id) + " never completed");
    }
  }
  if (!trace.attack_end) return Nanos::zero();
  const Nanos attack_end = *trace.attack_end;

  // +1 at entry, -1 at exit; exits sort first at equal instants.
  std::vector<std::pair<Nanos, int>> steps;
  steps.reserve(trace.per_packet.size() * 2);
  for (const auto& r : trace.per_packet) {
    if (r.dropped()) continue;
    const auto stay = queue_stay(r, kind, trace.forwarder);
    if (!stay) continue;
    steps.emplace_back(stay->enter, +1);
    steps.emplace_back(*stay->leave, -1);
  }
  std::sort(steps.begin(), steps.end());

  std::int64_t length = 0;
  std::size_t i = 0;
  for (; i < steps.size() && steps[i].first <= attack_end; ++i) length += steps[i].second;
  if (length == 0) return Nanos::zero();
  while (i < steps.size()) {
    const Nanos at = steps[i].first;
    for (; i < steps.size() && steps[i].first == at; ++i) length += steps[i].second;
    if (length == 0) return at - attack_end;
  }
  throw ContractViolation("drain_time: queue never empties");
}

CheckResult check_oracle_equivalence(const TraceSeries& trace) {
  std::vector<Nanos> arrivals;
  std::vector<Nanos> forwarded;
  std::vector<Nanos> starts;
  std::vector<Nanos> services;
  for (const auto& r : trace.per_packet) {
    if (r.dropped() || !r.completed()) continue;
    arrivals.push_back(r.arrival);
    forwarded.push_back(r.server_entry());
    starts.push_back(*r.service_start);
    services.push_back(*r.service_end - *r.service_start);
  }

  auto mismatch = [](const char* what, std::size_t n, Nanos expected, Nanos got) {
    std::ostringstream os;
    os << what << " mismatch at admitted packet " << n << ": recursion " << expected.count() << " ns, simulator "
       << got.count() << " ns";
    return CheckResult{false, os.str()};
  };

  if (trace.forwarder && !trace.sqf) return {false, "forwarder spacing unknown"};
  if (trace.sqf) {
    const auto schedule = qdtp_schedule(arrivals, *trace.sqf);
    const auto q = qdtp_delays(arrivals, *trace.sqf);
    for (std::size_t n = 0; n < arrivals.size(); ++n) {
      if (schedule.times[n] != forwarded[n]) return mismatch("t_n", n, schedule.times[n], forwarded[n]);
      if (q[n] != forwarded[n] - arrivals[n]) return mismatch("Q_n", n, q[n], forwarded[n] - arrivals[n]);
    }
    const auto w = server_waits(schedule, services);
    for (std::size_t n = 0; n < arrivals.size(); ++n) {
      if (w.waits[n] != starts[n] - forwarded[n]) return mismatch("W_n", n, w.waits[n], starts[n] - forwarded[n]);
    }
    return {};
  }
  const auto l = lindley_waits(arrivals, services);
  for (std::size_t n = 0; n < arrivals.size(); ++n) {
    if (forwarded[n] != arrivals[n]) return mismatch("t_n", n, arrivals[n], forwarded[n]);
    if (l.waits[n] != starts[n] - arrivals[n]) return mismatch("L_n", n, l.waits[n], starts[n] - arrivals[n]);
  }
  return {};
}

CheckResult check_conservation(const TraceSeries& trace) {
  std::size_t completed = 0;
  std::size_t dropped = 0;
  std::size_t queued = 0;
  std::optional<Nanos> last_start;
  std::optional<Nanos> last_entry;
  for (const auto& r : trace.per_packet) {
    if (r.dropped()) {
      if (r.forwarded || r.service_start || r.service_end) {
        return {false, "packet " + std::to_string(r.id) + " is both dropped and delivered"};
      }
      ++dropped;
      continue;
    }
    if (r.completed()) {
      ++completed;
    } else {
      ++queued;
    }
    if (r.forwarded && *r.forwarded < r.arrival) return {false, "packet " + std::to_string(r.id) + " forwarded early"};
    if (r.service_start) {
      if (*r.service_start < r.server_entry()) {
        return {false, "packet " + std::to_string(r.id) + " served before reaching the server"};
      }
      if (last_start && *r.service_start < *last_start) {
        return {false, "FCFS violated at packet " + std::to_string(r.id)};
      }
      last_start = r.service_start;
    }
    if (r.forwarded) {
      if (last_entry && *r.forwarded < *last_entry) return {false, "forward order violated at " + std::to_string(r.id)};
      last_entry = r.forwarded;
    }
    if (r.service_end && (!r.service_start || *r.service_end < *r.service_start)) {
      return {false, "packet " + std::to_string(r.id) + " has an inconsistent service interval"};
    }
  }
  if (completed + dropped + queued != trace.per_packet.size()) return {false, "packet accounting mismatch"};
  return {};
}

}  // namespace qdtp
