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

#include <chrono>

#include "qdtp/time.hpp"

namespace qdtp {

/// Declared bound on |actual - planned| departure error for live pacing.
inline constexpr Nanos kDefaultPacingTolerance{500 * kMicrosecond};
/// The sleeper busy-waits for the final stretch before a deadline.
inline constexpr Nanos kDefaultSpinWindow{200 * kMicrosecond};

/// Monotonic clock with a per-instance origin. Immune to wall-clock steps.
class MonotonicClock {
 public:
  MonotonicClock() : origin_(std::chrono::steady_clock::now()) {}

  [[nodiscard]] Nanos now() const {
    return std::chrono::duration_cast<Nanos>(std::chrono::steady_clock::now() - origin_);
  }
  [[nodiscard]] std::chrono::steady_clock::time_point to_time_point(Nanos instant) const {
    return origin_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(instant);
  }

 private:
  std::chrono::steady_clock::time_point origin_;
};

/// Resolution of CLOCK_MONOTONIC as reported by the OS.
Nanos clock_resolution();

/// Moves the calling thread to SCHED_FIFO so timer wake-ups preempt ordinary
/// threads. Returns false, leaving the thread unchanged, when not permitted.
bool request_realtime_priority();

/// Blocks until `deadline` on `clock`: sleeps until spin_window before it,
/// then spins. Returns immediately if the deadline has passed.
void sleep_until(const MonotonicClock& clock, Nanos deadline, Nanos spin_window = kDefaultSpinWindow);

}  // namespace qdtp
