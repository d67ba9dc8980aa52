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

#include "qdtp/udp_socket.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "qdtp/errors.hpp"

namespace qdtp {

namespace {

std::string errno_text() { return std::strerror(errno); }

}  // namespace

SocketAddress::SocketAddress() : raw_{} { raw_.sin_family = AF_INET; }

SocketAddress SocketAddress::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos) throw ConfigError("address '" + std::string(text) + "' is not host:port");
  const std::string host(text.substr(0, colon));
  const std::string port_text(text.substr(colon + 1));
  int port = -1;
  try {
    std::size_t used = 0;
    port = std::stoi(port_text, &used);
    if (used != port_text.size()) port = -1;
  } catch (const std::logic_error&) {
    port = -1;
  }
  if (port < 0 || port > 65535) throw ConfigError("address '" + std::string(text) + "' has an invalid port");

  SocketAddress addr;
  addr.raw_.sin_port = htons(static_cast<std::uint16_t>(port));
  if (host.empty() || host == "*") {
    addr.raw_.sin_addr.s_addr = htonl(INADDR_ANY);
    return addr;
  }
  if (inet_pton(AF_INET, host.c_str(), &addr.raw_.sin_addr) == 1) return addr;

  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* found = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &found) != 0 || found == nullptr) {
    throw ConfigError("cannot resolve host '" + host + "'");
  }
  addr.raw_.sin_addr = reinterpret_cast<const sockaddr_in*>(found->ai_addr)->sin_addr;
  freeaddrinfo(found);
  return addr;
}

SocketAddress SocketAddress::loopback(std::uint16_t port) {
  SocketAddress addr;
  addr.raw_.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.raw_.sin_port = htons(port);
  return addr;
}

std::uint16_t SocketAddress::port() const noexcept { return ntohs(raw_.sin_port); }

std::string SocketAddress::to_string() const {
  char host[INET_ADDRSTRLEN] = {};
  inet_ntop(AF_INET, &raw_.sin_addr, host, sizeof(host));
  return std::string(host) + ":" + std::to_string(port());
}

bool operator==(const SocketAddress& lhs, const SocketAddress& rhs) noexcept {
  return lhs.raw_.sin_addr.s_addr == rhs.raw_.sin_addr.s_addr && lhs.raw_.sin_port == rhs.raw_.sin_port;
}

UdpSocket UdpSocket::bind(const SocketAddress& addr) {
  const int fd = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw StartupError("socket(): " + errno_text());
  UdpSocket sock(fd);
  if (::bind(fd, reinterpret_cast<const sockaddr*>(&addr.raw()), sizeof(sockaddr_in)) != 0) {
    throw StartupError("bind " + addr.to_string() + ": " + errno_text());
  }
  return sock;
}

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

UdpSocket::~UdpSocket() { close(); }

void UdpSocket::close() noexcept {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

int UdpSocket::set_receive_buffer(int bytes) {
#ifdef SO_RCVBUFFORCE
  if (::setsockopt(fd_, SOL_SOCKET, SO_RCVBUFFORCE, &bytes, sizeof(bytes)) != 0)
#endif
  {
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &bytes, sizeof(bytes));
  }
  int granted = 0;
  socklen_t len = sizeof(granted);
  ::getsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &granted, &len);
  return granted;
}

SocketAddress UdpSocket::local_address() const {
  sockaddr_in raw{};
  socklen_t len = sizeof(raw);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&raw), &len);
  return SocketAddress(raw);
}

bool UdpSocket::send_to(std::span<const std::byte> payload, const SocketAddress& to) const {
  const auto sent = ::sendto(fd_, payload.data(), payload.size(), 0, reinterpret_cast<const sockaddr*>(&to.raw()),
                             sizeof(sockaddr_in));
  return sent == static_cast<ssize_t>(payload.size());
}

std::optional<std::size_t> UdpSocket::receive(std::span<std::byte> buffer, SocketAddress* from, Nanos timeout) const {
  pollfd pfd{fd_, POLLIN, 0};
  const auto ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(timeout).count());
  const int ready = ::poll(&pfd, 1, ms);
  if (ready <= 0) return std::nullopt;
  sockaddr_in raw{};
  socklen_t len = sizeof(raw);
  const auto got = ::recvfrom(fd_, buffer.data(), buffer.size(), MSG_DONTWAIT, reinterpret_cast<sockaddr*>(&raw), &len);
  if (got < 0) return std::nullopt;
  if (from) *from = SocketAddress(raw);
  return static_cast<std::size_t>(got);
}

}  // namespace qdtp
