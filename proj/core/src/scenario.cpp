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

#include "qdtp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "qdtp/errors.hpp"

namespace qdtp {

namespace {

constexpr double kHorizonSlack = 1e-9;
constexpr std::uint64_t kServiceStream = 0x5e7f1ce5ULL;

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

std::vector<Nanos> emit_source(const TrafficModel& model, std::mt19937_64& rng) {
  const Nanos start = from_seconds(model.start);
  const Nanos end = from_seconds(model.end());
  std::vector<Nanos> times;

  switch (model.kind) {
    case TrafficKind::kPeriodic: {
      const double period_ns = 1e9 / model.rate;
      std::uniform_real_distribution<double> jitter(0.0, model.jitter);
      for (std::int64_t k = 0;; ++k) {
        const Nanos offset{std::llround(static_cast<double>(k) * period_ns)};
        if (start + offset >= end) break;
        Nanos t = start + offset;
        if (model.jitter > 0.0) t = std::min(t + from_seconds(jitter(rng)), end - Nanos{1});
        times.push_back(t);
      }
      break;
    }
    case TrafficKind::kPoisson: {
      std::exponential_distribution<double> gap(model.rate);
      double t = model.start;
      for (;;) {
        t += gap(rng);
        const Nanos at = from_seconds(t);
        if (at >= end) break;
        times.push_back(at);
      }
      break;
    }
    case TrafficKind::kBurst: {
      const auto count = static_cast<std::size_t>(std::llround(model.rate * model.duration));
      times.assign(count, start);
      break;
    }
  }
  std::stable_sort(times.begin(), times.end());
  return times;
}

}  // namespace

std::string_view to_string(ServiceMode mode) {
  switch (mode) {
    case ServiceMode::kConstant:
      return "constant";
    case ServiceMode::kGaussian:
      return "gaussian";
    case ServiceMode::kGaussianWithOutliers:
      return "gaussian_with_outliers";
  }
  return "constant";
}

ServiceMode parse_service_mode(std::string_view text) {
  if (text == "constant") return ServiceMode::kConstant;
  if (text == "gaussian") return ServiceMode::kGaussian;
  if (text == "gaussian_with_outliers") return ServiceMode::kGaussianWithOutliers;
  throw ConfigError("unknown service mode '" + std::string(text) + "'");
}

std::string_view to_string(TrafficKind kind) {
  switch (kind) {
    case TrafficKind::kPeriodic:
      return "periodic";
    case TrafficKind::kPoisson:
      return "poisson";
    case TrafficKind::kBurst:
      return "burst";
  }
  return "periodic";
}

TrafficKind parse_traffic_kind(std::string_view text) {
  if (text == "periodic") return TrafficKind::kPeriodic;
  if (text == "poisson") return TrafficKind::kPoisson;
  if (text == "burst") return TrafficKind::kBurst;
  throw ConfigError("unknown traffic kind '" + std::string(text) + "'");
}

void ServiceModel::validate() const {
  if (!(mean > 0.0)) throw ConfigError("service model: mean must be > 0");
  if (!(variance >= 0.0)) throw ConfigError("service model: variance must be >= 0");
  if (!(outlier_probability >= 0.0 && outlier_probability <= 1.0)) {
    throw ConfigError("service model: outlier_probability must be in [0, 1]");
  }
  if (!(outlier_scale >= 1.0)) throw ConfigError("service model: outlier_scale must be >= 1");
}

Nanos ServiceModel::sample(const ServiceDraw& draw) const {
  double seconds = mean;
  switch (mode) {
    case ServiceMode::kConstant:
      break;
    case ServiceMode::kGaussian:
      seconds = mean + std::sqrt(variance) * draw.normal;
      break;
    case ServiceMode::kGaussianWithOutliers: {
      const double center = draw.uniform < outlier_probability ? mean * outlier_scale : mean;
      seconds = center + std::sqrt(variance) * draw.normal;
      break;
    }
  }
  return std::max(from_seconds(seconds), kMinServiceTime);
}

ServiceModel ServiceModel::constant(double mean_seconds) {
  ServiceModel m;
  m.mode = ServiceMode::kConstant;
  m.mean = mean_seconds;
  return m;
}

ServiceModel ServiceModel::gaussian(double mean_seconds, double variance_seconds2) {
  ServiceModel m;
  m.mode = ServiceMode::kGaussian;
  m.mean = mean_seconds;
  m.variance = variance_seconds2;
  return m;
}

void TrafficModel::validate() const {
  if (!(rate > 0.0)) throw ConfigError("traffic model: rate must be > 0");
  if (!(duration >= 0.0)) throw ConfigError("traffic model: duration must be >= 0");
  if (!(start >= 0.0)) throw ConfigError("traffic model: start must be >= 0");
  if (!(jitter >= 0.0)) throw ConfigError("traffic model: jitter must be >= 0");
}

void Scenario::validate() const {
  if (!(horizon >= 0.0)) throw ConfigError("scenario: horizon must be >= 0");
  auto check_source = [&](const TrafficModel& source, const std::string& name) {
    source.validate();
    if (source.end() > horizon + kHorizonSlack) {
      throw ConfigError("scenario: " + name + " ends at " + std::to_string(source.end()) + " s, past horizon " +
                        std::to_string(horizon) + " s");
    }
  };
  for (std::size_t i = 0; i < normal_sources.size(); ++i) {
    check_source(normal_sources[i], "normal source " + std::to_string(i));
  }
  if (attack) check_source(*attack, "attack");
  service_no_attack.validate();
  service_under_attack.validate();
  if (congestion_threshold == 0) throw ConfigError("scenario: congestion_threshold must be >= 1");
}

std::vector<Arrival> generate_arrivals(const Scenario& scenario) {
  scenario.validate();

  std::vector<Arrival> merged;
  auto append = [&](const TrafficModel& model, std::uint32_t id, bool attack) {
    auto rng = stream_rng(scenario.seed, id);
    for (Nanos t : emit_source(model, rng)) merged.push_back({t, id, attack && scenario.attack_labels});
  };
  for (std::size_t i = 0; i < scenario.normal_sources.size(); ++i) {
    append(scenario.normal_sources[i], static_cast<std::uint32_t>(i), false);
  }
  if (scenario.attack) append(*scenario.attack, scenario.attack_source_id(), true);

  // Sources were appended in id order, so a stable sort keeps ties FCFS by id.
  std::stable_sort(merged.begin(), merged.end(),
                   [](const Arrival& lhs, const Arrival& rhs) { return lhs.time < rhs.time; });
  return merged;
}

std::vector<ServiceDraw> service_draws(std::uint64_t seed, std::size_t count) {
  auto rng = stream_rng(seed, kServiceStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<ServiceDraw> draws(count);
  for (auto& d : draws) {
    d.normal = normal(rng);
    d.uniform = uniform(rng);
  }
  return draws;
}

std::vector<Nanos> sample_services(const Scenario& scenario, const std::vector<bool>& congested) {
  const auto draws = service_draws(scenario.seed, congested.size());
  std::vector<Nanos> out;
  out.reserve(congested.size());
  for (std::size_t n = 0; n < congested.size(); ++n) {
    const ServiceModel& model = congested[n] ? scenario.service_under_attack : scenario.service_no_attack;
    out.push_back(model.sample(draws[n]));
  }
  return out;
}

ServiceProcess ServiceProcess::fixed(std::vector<Nanos> services) {
  ServiceProcess p;
  p.fixed_ = std::move(services);
  p.is_fixed_ = true;
  return p;
}

ServiceProcess ServiceProcess::regime(ServiceModel normal, ServiceModel congested, std::size_t threshold,
                                      std::vector<ServiceDraw> draws) {
  ServiceProcess p;
  p.normal_ = normal;
  p.congested_ = congested;
  p.threshold_ = threshold;
  p.draws_ = std::move(draws);
  p.is_fixed_ = false;
  return p;
}

Nanos ServiceProcess::service_time(std::size_t id, std::size_t server_len) const {
  if (id >= size()) throw ContractViolation("service process: packet id " + std::to_string(id) + " out of range");
  if (is_fixed_) return fixed_[id];
  const ServiceModel& model = server_len > threshold_ ? congested_ : normal_;
  return model.sample(draws_[id]);
}

std::size_t ServiceProcess::size() const noexcept { return is_fixed_ ? fixed_.size() : draws_.size(); }

Workload Workload::from_sequences(std::span<const Nanos> arrivals, std::vector<Nanos> services) {
  if (arrivals.size() != services.size()) throw ContractViolation("workload: arrivals/services length mismatch");
  if (!std::is_sorted(arrivals.begin(), arrivals.end())) throw ContractViolation("workload: arrivals unsorted");
  Workload w;
  w.arrivals.reserve(arrivals.size());
  for (Nanos a : arrivals) w.arrivals.push_back({a, 0, false});
  w.services = ServiceProcess::fixed(std::move(services));
  return w;
}

Workload make_workload(const Scenario& scenario) {
  Workload w;
  w.arrivals = generate_arrivals(scenario);
  w.services = ServiceProcess::regime(scenario.service_no_attack, scenario.service_under_attack,
                                      scenario.congestion_threshold,
                                      service_draws(scenario.seed, w.arrivals.size()));
  if (scenario.attack) {
    w.attack_start = from_seconds(scenario.attack->start);
    w.attack_end = from_seconds(scenario.attack->end());
  }
  return w;
}

}  // namespace qdtp
