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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qdtp/metrics.hpp"
#include "qdtp/simulator.hpp"

namespace qdtp {

// packets.csv: id,source,is_attack,a,t,service_start,service_end,dropped,drop_reason
// Instants are integer nanoseconds; absent instants are empty fields.
inline constexpr const char* kPacketsHeader = "id,source,is_attack,a,t,service_start,service_end,dropped,drop_reason";
// queues.csv: time_ns,sqf_len,server_len
inline constexpr const char* kQueuesHeader = "time_ns,sqf_len,server_len";

void write_packets_csv(std::ostream& out, const std::vector<PacketRecord>& records);
void write_packets_csv(const std::filesystem::path& path, const std::vector<PacketRecord>& records);
std::vector<PacketRecord> read_packets_csv(std::istream& in);
std::vector<PacketRecord> read_packets_csv(const std::filesystem::path& path);

void write_queues_csv(const std::filesystem::path& path, const TraceSeries& trace);
/// Fills sampling_interval, sqf_queue and server_queue.
void read_queues_csv(const std::filesystem::path& path, TraceSeries& trace);

/// Means in ms, variances in ms^2, drain times in seconds.
std::string summary_json(const TraceSeries& trace);
void write_summary_json(const std::filesystem::path& path, const TraceSeries& trace);

/// Writes packets.csv, queues.csv and summary.json into `dir`.
void write_trace(const std::filesystem::path& dir, const TraceSeries& trace);

/// Loads a run directory. The forwarder configuration and attack window come
/// from summary.json when present; otherwise a forwarder is assumed if any
/// packet has a forward instant and the attack window spans the labelled
/// attack arrivals. Queue series are read from queues.csv or rebuilt at the
/// default interval.
TraceSeries load_trace(const std::filesystem::path& dir);

void write_comparison_csv(const std::filesystem::path& path, const RunComparison& report);
void write_histogram_csv(const std::filesystem::path& path, const Histogram& h);

}  // namespace qdtp
