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

#include "qdtp/pacing_clock.hpp"

#include <pthread.h>
#include <sched.h>
#include <time.h>

#include <thread>

namespace qdtp {

Nanos clock_resolution() {
  timespec res{};
  if (clock_getres(CLOCK_MONOTONIC, &res) != 0) return Nanos{1};
  return Nanos{static_cast<std::int64_t>(res.tv_sec) * 1'000'000'000 + res.tv_nsec};
}

bool request_realtime_priority() {
  sched_param param{};
  param.sched_priority = sched_get_priority_min(SCHED_FIFO) + 9;
  return pthread_setschedparam(pthread_self(), SCHED_FIFO, &param) == 0;
}

void sleep_until(const MonotonicClock& clock, Nanos deadline, Nanos spin_window) {
  const Nanos wake = deadline - spin_window;
  if (clock.now() < wake) std::this_thread::sleep_until(clock.to_time_point(wake));
  while (clock.now() < deadline) {
  }
}

}  // namespace qdtp
