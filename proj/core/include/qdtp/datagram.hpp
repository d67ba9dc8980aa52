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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace qdtp {

/// Fixed-size telemetry datagram exchanged by the load generator, forwarder
/// and server stub. Layout (big endian):
///   0..3   magic "QDTP"
///   4      version (1)
///   5      flags, bit 0 = attack traffic
///   6..7   reserved
///   8..11  source id
///   12..19 sequence number
///   20..23 reading in milli-degrees Celsius
///   24..63 zero padding
inline constexpr std::size_t kDatagramSize = 64;

struct DatagramHeader {
  std::uint32_t source = 0;
  std::uint64_t sequence = 0;
  bool is_attack = false;
  std::int32_t reading_millicelsius = 0;

  friend bool operator==(const DatagramHeader&, const DatagramHeader&) = default;
};

std::array<std::byte, kDatagramSize> encode_datagram(const DatagramHeader& header);

/// Nullopt unless `bytes` is a well-formed datagram.
std::optional<DatagramHeader> decode_datagram(std::span<const std::byte> bytes);

}  // namespace qdtp
