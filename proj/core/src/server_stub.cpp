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

#include "qdtp/server_stub.hpp"

#include <latch>

#include "qdtp/datagram.hpp"

namespace qdtp {

namespace {

constexpr Nanos kPollInterval{50 * kMillisecond};

}  // namespace

ServerStub::ServerStub(StubConfig config)
    : config_((config.service.validate(), std::move(config))),
      socket_(UdpSocket::bind(config_.listen)),
      rng_(config_.seed) {
  socket_.set_receive_buffer(config_.receive_buffer_bytes);
}

ServerStub::~ServerStub() { stop(); }

void ServerStub::start() {
  if (started_) return;
  started_ = true;
  stopping_ = false;
  std::latch ready(2);
  receive_thread_ = std::thread([this, &ready] {
    ready.count_down();
    receive_loop();
  });
  service_thread_ = std::thread([this, &ready] {
    if (config_.realtime_service) request_realtime_priority();
    ready.count_down();
    service_loop();
  });
  ready.wait();
}

void ServerStub::stop() {
  if (!started_) return;
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (receive_thread_.joinable()) receive_thread_.join();
  if (service_thread_.joinable()) service_thread_.join();
  started_ = false;
}

std::vector<PacketRecord> ServerStub::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::size_t ServerStub::received() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::size_t ServerStub::processed() const {
  std::lock_guard lock(mu_);
  return processed_;
}

Nanos ServerStub::next_service_time() {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  ServiceDraw draw;
  draw.normal = normal(rng_);
  draw.uniform = uniform(rng_);
  return config_.service.sample(draw);
}

void ServerStub::receive_loop() {
  std::vector<std::byte> buffer(65536);
  while (!stopping_) {
    const auto got = socket_.receive(buffer, nullptr, kPollInterval);
    if (!got) continue;
    const Nanos now = clock_.now();
    const auto header = decode_datagram(std::span(buffer.data(), *got));
    {
      std::lock_guard lock(mu_);
      PacketRecord r;
      r.id = records_.size();
      r.arrival = now;
      if (header) {
        r.source = header->source;
        r.is_attack = header->is_attack;
      }
      records_.push_back(r);
      pending_.push_back(r.id);
    }
    cv_.notify_one();
  }
}

void ServerStub::service_loop() {
  std::unique_lock lock(mu_);
  for (;;) {
    cv_.wait(lock, [this] { return stopping_ || !pending_.empty(); });
    if (stopping_) return;
    const std::size_t id = pending_.front();
    pending_.pop_front();
    lock.unlock();

    const Nanos start = clock_.now();
    const Nanos service = next_service_time();
    sleep_until(clock_, start + service, config_.spin_window);
    const Nanos end = clock_.now();

    lock.lock();
    records_[id].service_start = start;
    records_[id].service_end = end;
    ++processed_;
  }
}

}  // namespace qdtp
