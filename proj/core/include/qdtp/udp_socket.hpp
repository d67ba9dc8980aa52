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

#include <netinet/in.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "qdtp/time.hpp"

namespace qdtp {

/// IPv4 UDP endpoint.
class SocketAddress {
 public:
  SocketAddress();
  explicit SocketAddress(const sockaddr_in& raw) : raw_(raw) {}

  /// Parses "host:port"; host may be a dotted quad or a resolvable name.
  /// Throws ConfigError.
  static SocketAddress parse(std::string_view text);
  static SocketAddress loopback(std::uint16_t port);

  [[nodiscard]] std::uint16_t port() const noexcept;
  [[nodiscard]] std::string to_string() const;
  [[nodiscard]] const sockaddr_in& raw() const noexcept { return raw_; }

  friend bool operator==(const SocketAddress& lhs, const SocketAddress& rhs) noexcept;

 private:
  sockaddr_in raw_;
};

/// Owning UDP socket.
class UdpSocket {
 public:
  /// Binds to `addr` (port 0 picks an ephemeral port). Throws StartupError.
  static UdpSocket bind(const SocketAddress& addr);

  UdpSocket(UdpSocket&& other) noexcept;
  UdpSocket& operator=(UdpSocket&& other) noexcept;
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;
  ~UdpSocket();

  /// Requests a kernel receive buffer of `bytes`, forcing past rmem_max when
  /// privileged. Returns the size granted.
  int set_receive_buffer(int bytes);

  [[nodiscard]] SocketAddress local_address() const;

  /// Fire-and-forget send; returns false on error (e.g. unreachable peer).
  bool send_to(std::span<const std::byte> payload, const SocketAddress& to) const;

  /// Waits up to `timeout` for a datagram. Returns its size, or nullopt on
  /// timeout or interruption.
  std::optional<std::size_t> receive(std::span<std::byte> buffer, SocketAddress* from, Nanos timeout) const;

  [[nodiscard]] int fd() const noexcept { return fd_; }

 private:
  explicit UdpSocket(int fd) : fd_(fd) {}
  void close() noexcept;

  int fd_ = -1;
};

}  // namespace qdtp
