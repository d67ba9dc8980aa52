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
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace qdtp {

/// All instants and durations are integer nanoseconds. Instants are measured
/// from the origin of the run (experiment start, or forwarder start for live
/// traffic). Integer arithmetic keeps the recursions exact.
using Nanos = std::chrono::nanoseconds;

inline constexpr Nanos kMicrosecond{1'000};
inline constexpr Nanos kMillisecond{1'000'000};
inline constexpr Nanos kSecond{1'000'000'000};

/// Converts seconds to the nearest nanosecond.
inline Nanos from_seconds(double seconds) {
  return Nanos{static_cast<std::int64_t>(std::llround(seconds * 1e9))};
}

inline Nanos from_millis(double millis) {
  return Nanos{static_cast<std::int64_t>(std::llround(millis * 1e6))};
}

inline double to_seconds(Nanos value) { return static_cast<double>(value.count()) * 1e-9; }
inline double to_millis(Nanos value) { return static_cast<double>(value.count()) * 1e-6; }

std::vector<Nanos> from_seconds(std::span<const double> seconds);
std::vector<double> to_seconds(std::span<const Nanos> values);

}  // namespace qdtp
