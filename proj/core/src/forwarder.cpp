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

#include "qdtp/forwarder.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <latch>
#include <ostream>
#include <sstream>

#include "qdtp/errors.hpp"

namespace qdtp {

namespace {

constexpr std::size_t kMaxDatagram = 65536;
constexpr Nanos kPollInterval{50 * kMillisecond};

}  // namespace

void ForwarderConfig::validate() const {
  if (spacing <= Nanos::zero() || spacing < clock_resolution()) {
    throw ConfigError("startup error: spacing D (" + std::to_string(spacing.count()) +
                      " ns) is below the monotonic clock resolution (" + std::to_string(clock_resolution().count()) +
                      " ns)");
  }
  if (queue_capacity && *queue_capacity == 0) throw ConfigError("queue capacity must be >= 1 when bounded");
  if (mitigation) mitigation->validate();
  if (stats_interval <= Nanos::zero()) throw ConfigError("stats interval must be > 0");
}

std::string ForwarderStats::to_json() const {
  std::ostringstream os;
  os << "{\"received\":" << received << ",\"forwarded\":" << forwarded
     << ",\"dropped_mitigation\":" << dropped_mitigation << ",\"dropped_capacity\":" << dropped_capacity
     << ",\"queue_len\":" << queue_len << ",\"inter_departure_min_us\":";
  if (inter_departure_min) {
    os << static_cast<double>(inter_departure_min->count()) / 1e3;
  } else {
    os << "null";
  }
  os << ",\"pacing_violations\":" << pacing_violations << ",\"send_errors\":" << send_errors << '}';
  return os.str();
}

Forwarder::Forwarder(ForwarderConfig config)
    : config_((config.validate(), std::move(config))),
      ingress_(UdpSocket::bind(config_.listen)),
      egress_(UdpSocket::bind(SocketAddress::parse("0.0.0.0:0"))),
      policy_(config_.mitigation.value_or(MitigationParams{}), config_.spacing, config_.mitigation.has_value()) {
  ingress_.set_receive_buffer(config_.receive_buffer_bytes);
  if (config_.control) control_.emplace(UdpSocket::bind(*config_.control));
}

Forwarder::~Forwarder() { stop(); }

std::optional<SocketAddress> Forwarder::control_address() const {
  if (!control_) return std::nullopt;
  return control_->local_address();
}

void Forwarder::start() {
  if (started_) return;
  started_ = true;
  stopping_ = false;
  // Return only once every thread runs, so traffic sent right after start()
  // is not stamped late by threads still being scheduled.
  std::latch ready(control_ ? 3 : 2);
  ingress_thread_ = std::thread([this, &ready] {
    ready.count_down();
    ingress_loop();
  });
  pacer_thread_ = std::thread([this, &ready] {
    if (config_.realtime_pacer) pacer_realtime_ = request_realtime_priority();
    ready.count_down();
    pacer_loop();
  });
  if (control_) {
    control_thread_ = std::thread([this, &ready] {
      ready.count_down();
      control_loop();
    });
  }
  ready.wait();
}

void Forwarder::stop() {
  if (!started_) return;
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto* t : {&ingress_thread_, &pacer_thread_, &control_thread_}) {
    if (t->joinable()) t->join();
  }
  started_ = false;
}

ForwarderStats Forwarder::snapshot_stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

std::vector<TimelineEntry> Forwarder::timeline() const {
  std::lock_guard lock(mu_);
  return timeline_;
}

void Forwarder::force_drop(Nanos duration) {
  std::lock_guard lock(mu_);
  policy_.force_drop(clock_.now(), duration);
}

void Forwarder::ingress_loop() {
  std::vector<std::byte> buffer(kMaxDatagram);
  while (!stopping_) {
    const auto got = ingress_.receive(buffer, nullptr, kPollInterval);
    if (!got) continue;
    const Nanos now = clock_.now();

    bool notify = false;
    {
      std::lock_guard lock(mu_);
      const std::uint64_t seq = next_sequence_++;
      ++stats_.received;
      DropReason drop = DropReason::kNone;
      if (policy_.on_arrival(now) == MitigationPolicy::Decision::kDrop) {
        drop = DropReason::kMitigation;
        ++stats_.dropped_mitigation;
      } else if (config_.queue_capacity && fifo_.size() >= *config_.queue_capacity) {
        drop = DropReason::kCapacity;
        ++stats_.dropped_capacity;
      } else {
        fifo_.push_back({seq, now, std::vector<std::byte>(buffer.begin(), buffer.begin() + *got)});
        ++stats_.queue_len;
        notify = true;
      }
      if (config_.record_timeline) timeline_.push_back({seq, now, drop, std::nullopt, std::nullopt});
    }
    if (notify) cv_.notify_one();
  }
}

void Forwarder::pacer_loop() {
  std::unique_lock lock(mu_);
  for (;;) {
    cv_.wait(lock, [this] { return stopping_ || !fifo_.empty(); });
    if (stopping_) return;

    // The head stays queued (and counted) until it has actually been sent.
    const Queued& head = fifo_.front();
    const std::uint64_t seq = head.sequence;
    const Nanos planned = last_planned_ ? std::max(*last_planned_ + config_.spacing, head.received) : head.received;
    std::vector<std::byte> payload = head.payload;
    last_planned_ = planned;

    lock.unlock();
    sleep_until(clock_, planned, config_.spin_window);
    const bool sent = egress_.send_to(payload, config_.upstream);
    const Nanos departed = clock_.now();
    lock.lock();

    fifo_.pop_front();
    --stats_.queue_len;
    ++stats_.forwarded;
    if (!sent) ++stats_.send_errors;
    if (last_departed_) {
      const Nanos gap = departed - *last_departed_;
      stats_.inter_departure_min = stats_.inter_departure_min ? std::min(*stats_.inter_departure_min, gap) : gap;
      if (gap < config_.spacing - config_.tolerance) ++stats_.pacing_violations;
    }
    last_departed_ = departed;
    if (config_.record_timeline) {
      // Entries are appended in sequence order, so the index is the sequence.
      auto& entry = timeline_[seq];
      entry.planned = planned;
      entry.departed = departed;
    }
  }
}

void Forwarder::control_loop() {
  std::array<std::byte, 256> buffer{};
  while (!stopping_) {
    SocketAddress from;
    const auto got = control_->receive(buffer, &from, kPollInterval);
    if (!got) continue;
    std::string command(reinterpret_cast<const char*>(buffer.data()), *got);
    while (!command.empty() && (command.back() == '\n' || command.back() == '\r')) command.pop_back();

    std::string reply = "ERR expected 'DROP <seconds>'\n";
    if (command.rfind("DROP ", 0) == 0) {
      char* end = nullptr;
      const double seconds = std::strtod(command.c_str() + 5, &end);
      if (end != command.c_str() + 5 && *end == '\0' && seconds >= 0.0) {
        force_drop(from_seconds(seconds));
        reply = "OK\n";
      }
    }
    control_->send_to(std::as_bytes(std::span(reply.data(), reply.size())), from);
  }
}

void run_forwarder(const ForwarderConfig& config, const std::atomic<bool>& stop, std::ostream& out) {
  Forwarder fwd(config);
  fwd.start();
  Nanos next_report = fwd.clock().now() + config.stats_interval;
  while (!stop) {
    std::this_thread::sleep_for(std::min<Nanos>(config.stats_interval, kPollInterval));
    if (fwd.clock().now() >= next_report) {
      out << fwd.snapshot_stats().to_json() << std::endl;
      next_report += config.stats_interval;
    }
  }
  fwd.stop();
  out << fwd.snapshot_stats().to_json() << std::endl;
}

}  // namespace qdtp
