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

#include "qdtp/datagram.hpp"

#include <cstring>

namespace qdtp {

namespace {

constexpr std::array<std::byte, 4> kMagic = {std::byte{'Q'}, std::byte{'D'}, std::byte{'T'}, std::byte{'P'}};
constexpr std::byte kVersion{1};

template <typename T>
void put_be(std::byte* at, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    at[sizeof(T) - 1 - i] = static_cast<std::byte>(static_cast<std::uint64_t>(value) >> (8 * i));
  }
}

template <typename T>
T get_be(const std::byte* at) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value = (value << 8) | std::to_integer<std::uint64_t>(at[i]);
  return static_cast<T>(value);
}

}  // namespace

std::array<std::byte, kDatagramSize> encode_datagram(const DatagramHeader& header) {
  std::array<std::byte, kDatagramSize> out{};
  std::memcpy(out.data(), kMagic.data(), kMagic.size());
  out[4] = kVersion;
  out[5] = header.is_attack ? std::byte{1} : std::byte{0};
  put_be<std::uint32_t>(out.data() + 8, header.source);
  put_be<std::uint64_t>(out.data() + 12, header.sequence);
  put_be<std::uint32_t>(out.data() + 20, static_cast<std::uint32_t>(header.reading_millicelsius));
  return out;
}

std::optional<DatagramHeader> decode_datagram(std::span<const std::byte> bytes) {
  if (bytes.size() != kDatagramSize) return std::nullopt;
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0 || bytes[4] != kVersion) return std::nullopt;
  DatagramHeader h;
  h.is_attack = (std::to_integer<unsigned>(bytes[5]) & 1U) != 0;
  h.source = get_be<std::uint32_t>(bytes.data() + 8);
  h.sequence = get_be<std::uint64_t>(bytes.data() + 12);
  h.reading_millicelsius = static_cast<std::int32_t>(get_be<std::uint32_t>(bytes.data() + 20));
  return h;
}

}  // namespace qdtp
