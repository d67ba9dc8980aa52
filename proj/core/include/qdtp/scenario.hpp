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

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qdtp/time.hpp"

namespace qdtp {

enum class ServiceMode { kConstant, kGaussian, kGaussianWithOutliers };

std::string_view to_string(ServiceMode mode);
ServiceMode parse_service_mode(std::string_view text);

/// One packet's worth of randomness for the service-time process. Drawn per
/// packet id, independent of which service model ends up consuming it, so the
/// same seed gives comparable service sequences across configurations.
struct ServiceDraw {
  double normal = 0.0;   ///< standard normal variate
  double uniform = 0.0;  ///< uniform on [0, 1), decides outliers
};

/// Distribution of the server's per-packet processing time. Values in seconds.
struct ServiceModel {
  ServiceMode mode = ServiceMode::kConstant;
  double mean = 0.0;
  double variance = 0.0;
  double outlier_probability = 0.001;
  double outlier_scale = 1000.0;

  /// Throws ConfigError on mean <= 0, variance < 0, probability outside
  /// [0, 1] or scale < 1.
  void validate() const;

  /// Maps one draw to a service time, truncated below at 1 microsecond.
  /// Outliers replace the mean with mean * outlier_scale.
  [[nodiscard]] Nanos sample(const ServiceDraw& draw) const;

  static ServiceModel constant(double mean_seconds);
  static ServiceModel gaussian(double mean_seconds, double variance_seconds2);

  friend bool operator==(const ServiceModel&, const ServiceModel&) = default;
};

inline constexpr Nanos kMinServiceTime = kMicrosecond;

enum class TrafficKind { kPeriodic, kPoisson, kBurst };

std::string_view to_string(TrafficKind kind);
TrafficKind parse_traffic_kind(std::string_view text);

/// One packet source. Periodic sources emit at start + k / rate (plus a
/// uniform jitter in [0, jitter)), Poisson sources use exponential gaps, and a
/// burst emits round(rate * duration) packets all at `start`. Times in seconds.
struct TrafficModel {
  TrafficKind kind = TrafficKind::kPeriodic;
  double rate = 1.0;
  double jitter = 0.0;
  double start = 0.0;
  double duration = 0.0;

  void validate() const;
  [[nodiscard]] double end() const noexcept { return start + duration; }

  friend bool operator==(const TrafficModel&, const TrafficModel&) = default;
};

inline constexpr std::size_t kDefaultCongestionThreshold = 100;

/// A complete reproducible experiment workload: benign sources, an optional
/// flood and the two service regimes.
struct Scenario {
  std::vector<TrafficModel> normal_sources;
  std::optional<TrafficModel> attack;
  ServiceModel service_no_attack;
  ServiceModel service_under_attack;
  std::uint64_t seed = 0;
  double horizon = 0.0;
  bool attack_labels = true;
  /// Server queue length above which service times come from
  /// service_under_attack.
  std::size_t congestion_threshold = kDefaultCongestionThreshold;

  /// Throws ConfigError when any source or model is invalid or a source
  /// extends past the horizon.
  void validate() const;

  [[nodiscard]] std::uint32_t attack_source_id() const noexcept {
    return static_cast<std::uint32_t>(normal_sources.size());
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct Arrival {
  Nanos time{};
  std::uint32_t source = 0;
  bool is_attack = false;

  friend bool operator==(const Arrival&, const Arrival&) = default;
};

/// Merged, sorted arrival stream of all sources. Ties keep source order, and
/// each source keeps its own emission order. Deterministic in the seed.
std::vector<Arrival> generate_arrivals(const Scenario& scenario);

/// Per-packet draws for `count` packets from the scenario seed.
std::vector<ServiceDraw> service_draws(std::uint64_t seed, std::size_t count);

/// Service times for a packet sequence given each packet's regime flag
/// (true selects service_under_attack).
std::vector<Nanos> sample_services(const Scenario& scenario, const std::vector<bool>& congested);

/// Supplies the service time of packet `id` at the moment it enters service.
/// Either a fixed per-packet sequence or the two-regime model driven by the
/// server queue length.
class ServiceProcess {
 public:
  static ServiceProcess fixed(std::vector<Nanos> services);
  static ServiceProcess regime(ServiceModel normal, ServiceModel congested, std::size_t threshold,
                               std::vector<ServiceDraw> draws);

  /// `server_len` counts every packet at the server including the one
  /// starting service.
  [[nodiscard]] Nanos service_time(std::size_t id, std::size_t server_len) const;
  [[nodiscard]] std::size_t size() const noexcept;

 private:
  ServiceProcess() = default;

  std::vector<Nanos> fixed_;
  ServiceModel normal_;
  ServiceModel congested_;
  std::size_t threshold_ = kDefaultCongestionThreshold;
  std::vector<ServiceDraw> draws_;
  bool is_fixed_ = true;
};

/// Arrivals plus service process: everything the simulator consumes.
struct Workload {
  std::vector<Arrival> arrivals;
  ServiceProcess services = ServiceProcess::fixed({});
  std::optional<Nanos> attack_start;
  std::optional<Nanos> attack_end;

  /// Unlabelled single-source workload with explicit service times.
  static Workload from_sequences(std::span<const Nanos> arrivals, std::vector<Nanos> services);
};

Workload make_workload(const Scenario& scenario);

}  // namespace qdtp
