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

#include "qdtp/recursions.hpp"

#include <algorithm>
#include <string>

#include "qdtp/errors.hpp"

namespace qdtp {

std::vector<Nanos> from_seconds(std::span<const double> seconds) {
  std::vector<Nanos> out;
  out.reserve(seconds.size());
  for (double s : seconds) out.push_back(from_seconds(s));
  return out;
}

std::vector<double> to_seconds(std::span<const Nanos> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (Nanos v : values) out.push_back(to_seconds(v));
  return out;
}

namespace {

void require_arrivals(std::span<const Nanos> arrivals) {
  if (arrivals.empty()) return;
  if (arrivals.front() < Nanos::zero()) throw ContractViolation("arrival instants must be non-negative");
  if (!std::is_sorted(arrivals.begin(), arrivals.end())) {
    throw ContractViolation("arrival instants must be non-decreasing");
  }
}

void require_services(std::span<const Nanos> services) {
  if (std::any_of(services.begin(), services.end(), [](Nanos t) { return t <= Nanos::zero(); })) {
    throw ContractViolation("service times must be strictly positive");
  }
}

void require_same_length(std::size_t lhs, std::size_t rhs, const char* what) {
  if (lhs != rhs) {
    throw ContractViolation(std::string(what) + ": length mismatch (" + std::to_string(lhs) + " vs " +
                            std::to_string(rhs) + ")");
  }
}

// [x]^+ applied to one Lindley step.
Nanos lindley_step(Nanos previous, Nanos work, Nanos gap) { return std::max(previous + work - gap, Nanos::zero()); }

}  // namespace

QdtpConfig::QdtpConfig(Nanos spacing) : spacing_(spacing) {
  if (spacing <= Nanos::zero()) throw ConfigError("spacing D must be strictly positive");
}

QdtpConfig QdtpConfig::from_millis(double millis) { return QdtpConfig(qdtp::from_millis(millis)); }

WaitSequence lindley_waits(std::span<const Nanos> arrivals, std::span<const Nanos> services) {
  require_same_length(arrivals.size(), services.size(), "lindley_waits");
  require_arrivals(arrivals);
  require_services(services);

  WaitSequence out{WaitRole::kServerAlone, {}};
  out.waits.reserve(arrivals.size());
  for (std::size_t n = 0; n < arrivals.size(); ++n) {
    if (n == 0) {
      out.waits.push_back(Nanos::zero());
    } else {
      out.waits.push_back(lindley_step(out.waits.back(), services[n - 1], arrivals[n] - arrivals[n - 1]));
    }
  }
  return out;
}

ForwardSchedule qdtp_schedule(std::span<const Nanos> arrivals, const QdtpConfig& cfg) {
  require_arrivals(arrivals);
  ForwardSchedule out;
  out.times.reserve(arrivals.size());
  out.delays.reserve(arrivals.size());
  for (std::size_t n = 0; n < arrivals.size(); ++n) {
    const Nanos t = n == 0 ? arrivals[0] : std::max(out.times.back() + cfg.spacing(), arrivals[n]);
    out.times.push_back(t);
    out.delays.push_back(t - arrivals[n]);
  }
  return out;
}

std::vector<Nanos> qdtp_delays(std::span<const Nanos> arrivals, const QdtpConfig& cfg) {
  require_arrivals(arrivals);
  std::vector<Nanos> q;
  q.reserve(arrivals.size());
  for (std::size_t n = 0; n < arrivals.size(); ++n) {
    q.push_back(n == 0 ? Nanos::zero() : lindley_step(q.back(), cfg.spacing(), arrivals[n] - arrivals[n - 1]));
  }
  return q;
}

WaitSequence server_waits(const ForwardSchedule& schedule, std::span<const Nanos> services) {
  require_same_length(schedule.times.size(), services.size(), "server_waits");
  require_services(services);
  WaitSequence out{WaitRole::kBehindShaper, {}};
  out.waits.reserve(services.size());
  for (std::size_t n = 0; n < services.size(); ++n) {
    if (n == 0) {
      out.waits.push_back(Nanos::zero());
    } else {
      out.waits.push_back(
          lindley_step(out.waits.back(), services[n - 1], schedule.times[n] - schedule.times[n - 1]));
    }
  }
  return out;
}

bool check_result1(std::span<const Nanos> services, const QdtpConfig& cfg) {
  return std::all_of(services.begin(), services.end(), [&](Nanos t) { return t < cfg.spacing(); });
}

std::vector<Nanos> end_to_end_delay(std::span<const Nanos> arrivals, const ForwardSchedule& schedule,
                                    const WaitSequence& waits, std::span<const Nanos> services) {
  require_same_length(arrivals.size(), schedule.size(), "end_to_end_delay");
  require_same_length(arrivals.size(), waits.size(), "end_to_end_delay");
  require_same_length(arrivals.size(), services.size(), "end_to_end_delay");
  std::vector<Nanos> out;
  out.reserve(arrivals.size());
  for (std::size_t n = 0; n < arrivals.size(); ++n) {
    const Nanos total = (schedule.times[n] - arrivals[n]) + waits.waits[n] + services[n];
    if (total < Nanos::zero()) throw ContractViolation("end_to_end_delay: negative sojourn");
    out.push_back(total);
  }
  return out;
}

}  // namespace qdtp
