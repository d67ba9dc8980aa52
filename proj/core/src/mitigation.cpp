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

#include "qdtp/mitigation.hpp"

#include <cmath>
#include <string>

#include "qdtp/errors.hpp"

namespace qdtp {

void MitigationParams::validate() const {
  if (n_threshold < 1) throw ConfigError("mitigation: N must be >= 1");
  if (!(k_factor >= 1.0)) throw ConfigError("mitigation: K must be >= 1");
}

MitigationParams MitigationParams::parse(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) throw ConfigError("mitigation: expected N,K but got '" + std::string(text) + "'");
  MitigationParams p;
  try {
    std::size_t used = 0;
    const std::string n_text(text.substr(0, comma));
    const std::string k_text(text.substr(comma + 1));
    const long long n = std::stoll(n_text, &used);
    if (used != n_text.size() || n < 1) throw ConfigError("mitigation: bad N '" + n_text + "'");
    p.n_threshold = static_cast<std::size_t>(n);
    p.k_factor = std::stod(k_text, &used);
    if (used != k_text.size()) throw ConfigError("mitigation: bad K '" + k_text + "'");
  } catch (const std::logic_error&) {
    throw ConfigError("mitigation: expected N,K but got '" + std::string(text) + "'");
  }
  p.validate();
  return p;
}

MitigationPolicy::MitigationPolicy(MitigationParams params, Nanos spacing, bool enabled)
    : params_(params), spacing_(spacing), enabled_(enabled) {
  params_.validate();
  if (spacing <= Nanos::zero()) throw ConfigError("mitigation: spacing D must be > 0");
  drop_window_ = Nanos{std::llround(params_.k_factor * static_cast<double>(spacing.count()))};
}

void MitigationPolicy::remember(Nanos now) {
  recent_.push_back(now);
  while (recent_.size() > params_.n_threshold + 1) recent_.pop_front();
}

bool MitigationPolicy::window_full_since(Nanos since) const {
  return recent_.size() == params_.n_threshold + 1 && recent_.front() >= since;
}

void MitigationPolicy::advance(Nanos now) {
  while (dropping_until_ && *dropping_until_ <= now) {
    const Nanos expiry = *dropping_until_;
    if (enabled_ && window_full_since(expiry - spacing_)) {
      dropping_until_ = expiry + drop_window_;
      ++renewals_;
    } else {
      dropping_until_.reset();
    }
  }
}

MitigationPolicy::Decision MitigationPolicy::on_arrival(Nanos now) {
  advance(now);
  if (!enabled_) return dropping_until_ ? Decision::kDrop : Decision::kAdmit;
  remember(now);
  if (dropping_until_) return Decision::kDrop;
  if (window_full_since(now - spacing_)) {
    dropping_until_ = now + drop_window_;
    ++triggers_;
    return Decision::kDrop;
  }
  return Decision::kAdmit;
}

void MitigationPolicy::force_drop(Nanos now, Nanos duration) {
  advance(now);
  const Nanos until = now + duration;
  if (!dropping_until_ || *dropping_until_ < until) dropping_until_ = until;
}

}  // namespace qdtp
