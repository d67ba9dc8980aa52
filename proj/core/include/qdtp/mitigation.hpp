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

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>

#include "qdtp/time.hpp"

namespace qdtp {

struct MitigationParams {
  std::size_t n_threshold = 10;  ///< N: more than N packets within D trips the rule
  double k_factor = 3.0;         ///< K: drop for K * D afterwards

  /// Throws ConfigError unless N >= 1 and K >= 1.
  void validate() const;

  /// Parses "N,K", e.g. "10,3".
  static MitigationParams parse(std::string_view text);

  friend bool operator==(const MitigationParams&, const MitigationParams&) = default;
};

/// Drop-based flood mitigation at the forwarder ingress.
///
/// Trigger: the forwarder keeps the instants of the last N + 1 packets it has
/// seen (admitted or dropped). When the oldest of them is within D of the
/// newest, the newest packet is dropped and every arrival is dropped until
/// now + K * D. Arrivals during a dropping window do not extend it. At expiry
/// the window renews for another K * D if the last N + 1 seen packets all fall
/// within the final D of the expiring window; otherwise the policy reopens.
///
/// A disabled policy admits everything except during windows set by
/// force_drop(), which never renew.
///
/// Not thread-safe; the live forwarder guards it with its own lock.
class MitigationPolicy {
 public:
  enum class Decision { kAdmit, kDrop };

  MitigationPolicy(MitigationParams params, Nanos spacing, bool enabled = true);

  /// Decides one arrival at `now`. Instants must be non-decreasing.
  Decision on_arrival(Nanos now);

  /// Processes every expiry at or before `now`. An arrival at exactly the
  /// expiry instant is evaluated after the expiry.
  void advance(Nanos now);

  /// Forces the dropping state until at least now + duration.
  void force_drop(Nanos now, Nanos duration);

  [[nodiscard]] bool enabled() const noexcept { return enabled_; }
  [[nodiscard]] bool dropping() const noexcept { return dropping_until_.has_value(); }
  [[nodiscard]] std::optional<Nanos> dropping_until() const noexcept { return dropping_until_; }
  [[nodiscard]] Nanos drop_window() const noexcept { return drop_window_; }
  [[nodiscard]] const MitigationParams& params() const noexcept { return params_; }
  [[nodiscard]] std::uint64_t triggers() const noexcept { return triggers_; }
  [[nodiscard]] std::uint64_t renewals() const noexcept { return renewals_; }

 private:
  void remember(Nanos now);
  [[nodiscard]] bool window_full_since(Nanos since) const;

  MitigationParams params_;
  Nanos spacing_;
  Nanos drop_window_;
  bool enabled_;
  std::deque<Nanos> recent_;
  std::optional<Nanos> dropping_until_;
  std::uint64_t triggers_ = 0;
  std::uint64_t renewals_ = 0;
};

}  // namespace qdtp
