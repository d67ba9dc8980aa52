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

#include "qdtp/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qdtp/errors.hpp"

namespace qdtp {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

void put_optional(std::ostream& out, const std::optional<Nanos>& v) {
  if (v) out << v->count();
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  for (;;) {
    const auto next = line.find(sep, pos);
    fields.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError("line " + std::to_string(line_no) + ": bad number '" + std::string(text) + "'");
  }
  return value;
}

std::optional<Nanos> parse_instant(std::string_view text, std::size_t line_no) {
  if (text.empty()) return std::nullopt;
  return Nanos{parse_number<std::int64_t>(text, line_no)};
}

json stats_ms(const std::vector<Nanos>& values) {
  if (values.empty()) return nullptr;
  const auto s = summarize(values);
  return {{"count", s.count},       {"mean", s.mean * 1e3},  {"variance", s.variance * 1e6},
          {"min", s.min * 1e3},     {"max", s.max * 1e3},    {"p50", s.p50 * 1e3},
          {"p95", s.p95 * 1e3},     {"p99", s.p99 * 1e3},    {"p999", s.p999 * 1e3}};
}

json drain_or_null(const TraceSeries& trace, QueueKind kind) {
  try {
    return to_seconds(drain_time(trace, kind));
  } catch (const ContractViolation&) {
    return nullptr;
  }
}

}  // namespace

void write_packets_csv(std::ostream& out, const std::vector<PacketRecord>& records) {
  out << kPacketsHeader << '\n';
  for (const auto& r : records) {
    out << r.id << ',' << r.source << ',' << (r.is_attack ? 1 : 0) << ',' << r.arrival.count() << ',';
    put_optional(out, r.forwarded);
    out << ',';
    put_optional(out, r.service_start);
    out << ',';
    put_optional(out, r.service_end);
    out << ',' << (r.dropped() ? 1 : 0) << ',' << to_string(r.drop) << '\n';
  }
}

void write_packets_csv(const std::filesystem::path& path, const std::vector<PacketRecord>& records) {
  auto out = open_out(path);
  write_packets_csv(out, records);
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<PacketRecord> read_packets_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kPacketsHeader) throw IoError("packets.csv: missing or unexpected header");
  std::vector<PacketRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 9) throw IoError("packets.csv line " + std::to_string(line_no) + ": expected 9 fields");
    PacketRecord r;
    r.id = parse_number<std::uint64_t>(f[0], line_no);
    r.source = parse_number<std::uint32_t>(f[1], line_no);
    r.is_attack = parse_number<int>(f[2], line_no) != 0;
    r.arrival = Nanos{parse_number<std::int64_t>(f[3], line_no)};
    r.forwarded = parse_instant(f[4], line_no);
    r.service_start = parse_instant(f[5], line_no);
    r.service_end = parse_instant(f[6], line_no);
    const bool dropped = parse_number<int>(f[7], line_no) != 0;
    try {
      r.drop = parse_drop_reason(f[8]);
    } catch (const ContractViolation& e) {
      throw IoError("packets.csv line " + std::to_string(line_no) + ": " + e.what());
    }
    if (dropped && r.drop == DropReason::kNone) r.drop = DropReason::kMitigation;
    records.push_back(r);
  }
  return records;
}

std::vector<PacketRecord> read_packets_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_packets_csv(in);
}

void write_queues_csv(const std::filesystem::path& path, const TraceSeries& trace) {
  auto out = open_out(path);
  out << kQueuesHeader << '\n';
  const std::size_t n = std::max(trace.sqf_queue.size(), trace.server_queue.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Nanos t = i < trace.server_queue.size() ? trace.server_queue[i].time : trace.sqf_queue[i].time;
    const std::int64_t sqf = i < trace.sqf_queue.size() ? trace.sqf_queue[i].length : 0;
    const std::int64_t server = i < trace.server_queue.size() ? trace.server_queue[i].length : 0;
    out << t.count() << ',' << sqf << ',' << server << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void read_queues_csv(const std::filesystem::path& path, TraceSeries& trace) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != kQueuesHeader) throw IoError("queues.csv: missing or unexpected header");
  trace.sqf_queue.clear();
  trace.server_queue.clear();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 3) throw IoError("queues.csv line " + std::to_string(line_no) + ": expected 3 fields");
    const Nanos t{parse_number<std::int64_t>(f[0], line_no)};
    trace.sqf_queue.push_back({t, parse_number<std::int64_t>(f[1], line_no)});
    trace.server_queue.push_back({t, parse_number<std::int64_t>(f[2], line_no)});
  }
  if (trace.server_queue.size() >= 2) {
    trace.sampling_interval = trace.server_queue[1].time - trace.server_queue[0].time;
  }
}

std::string summary_json(const TraceSeries& trace) {
  std::size_t completed = 0, queued = 0, by_mitigation = 0, by_capacity = 0, attack = 0;
  for (const auto& r : trace.per_packet) {
    if (r.is_attack) ++attack;
    switch (r.drop) {
      case DropReason::kMitigation:
        ++by_mitigation;
        continue;
      case DropReason::kCapacity:
        ++by_capacity;
        continue;
      case DropReason::kNone:
        break;
    }
    r.completed() ? ++completed : ++queued;
  }

  json root;
  root["config"] = {
      {"forwarder", trace.forwarder},
      {"sqf_d_ms", trace.sqf ? json(to_millis(trace.sqf->spacing())) : json(nullptr)},
      {"sqf_d_ns", trace.sqf ? json(trace.sqf->spacing().count()) : json(nullptr)},
      {"mitigation", trace.mitigation ? json{{"n", trace.mitigation->n_threshold}, {"k", trace.mitigation->k_factor}}
                                      : json(nullptr)},
      {"sampling_interval_ms", to_millis(trace.sampling_interval)},
      {"sampling_interval_ns", trace.sampling_interval.count()},
  };
  const Nanos attack_start = trace.attack_start.value_or(Nanos::zero());
  root["attack"] = trace.attack_end ? json{{"start_s", to_seconds(attack_start)},
                                           {"end_s", to_seconds(*trace.attack_end)},
                                           {"start_ns", attack_start.count()},
                                           {"end_ns", trace.attack_end->count()}}
                                    : json(nullptr);
  root["packets"] = {{"total", trace.per_packet.size()},  {"completed", completed},
                     {"queued", queued},                  {"dropped_mitigation", by_mitigation},
                     {"dropped_capacity", by_capacity},   {"attack", attack}};
  root["units"] = {{"durations", "ms"}, {"variance", "ms^2"}, {"drain_time", "s"}};
  root["service_time"] = stats_ms(service_times(trace.per_packet));
  root["server_wait"] = stats_ms(server_waits_of(trace.per_packet));
  root["server_sojourn"] = stats_ms(server_sojourns_of(trace.per_packet));
  root["sqf_delay"] = trace.forwarder ? stats_ms(sqf_delays_of(trace.per_packet)) : json(nullptr);
  root["drain_time_s"] = {{"server", drain_or_null(trace, QueueKind::kServer)},
                          {"sqf", trace.forwarder ? drain_or_null(trace, QueueKind::kSqf) : json(nullptr)}};
  root["peak_queue"] = {{"server", peak_length(trace.server_queue)}, {"sqf", peak_length(trace.sqf_queue)}};
  root["max_occupancy"] = {
      {"server", max_occupancy(trace.per_packet, QueueKind::kServer, trace.forwarder)},
      {"sqf", max_occupancy(trace.per_packet, QueueKind::kSqf, trace.forwarder)}};
  return root.dump(2);
}

void write_summary_json(const std::filesystem::path& path, const TraceSeries& trace) {
  auto out = open_out(path);
  out << summary_json(trace) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_trace(const std::filesystem::path& dir, const TraceSeries& trace) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_packets_csv(dir / "packets.csv", trace.per_packet);
  write_queues_csv(dir / "queues.csv", trace);
  write_summary_json(dir / "summary.json", trace);
}

TraceSeries load_trace(const std::filesystem::path& dir) {
  const auto packets = dir / "packets.csv";
  if (!std::filesystem::exists(packets)) throw IoError("no packets.csv in " + dir.string());

  TraceSeries trace;
  trace.per_packet = read_packets_csv(packets);

  const auto summary = dir / "summary.json";
  bool have_summary = false;
  if (std::filesystem::exists(summary)) {
    auto in = open_in(summary);
    json root;
    try {
      root = json::parse(in);
      const auto& cfg = root.at("config");
      trace.forwarder = cfg.at("forwarder").get<bool>();
      if (!cfg.at("sqf_d_ms").is_null()) trace.sqf = QdtpConfig(Nanos{cfg.at("sqf_d_ns").get<std::int64_t>()});
      if (!cfg.at("mitigation").is_null()) {
        trace.mitigation = MitigationParams{cfg["mitigation"].at("n").get<std::size_t>(),
                                            cfg["mitigation"].at("k").get<double>()};
      }
      trace.sampling_interval = Nanos{cfg.at("sampling_interval_ns").get<std::int64_t>()};
      if (!root.at("attack").is_null()) {
        trace.attack_start = Nanos{root["attack"].at("start_ns").get<std::int64_t>()};
        trace.attack_end = Nanos{root["attack"].at("end_ns").get<std::int64_t>()};
      }
      have_summary = true;
    } catch (const json::exception& e) {
      throw IoError("summary.json: " + std::string(e.what()));
    }
  }
  if (!have_summary) {
    std::optional<Nanos> first_attack, last_attack;
    bool any_forward = false;
    for (const auto& r : trace.per_packet) {
      any_forward = any_forward || r.forwarded.has_value();
      if (!r.is_attack) continue;
      if (!first_attack) first_attack = r.arrival;
      last_attack = r.arrival;
    }
    trace.forwarder = any_forward;
    trace.attack_start = first_attack;
    trace.attack_end = last_attack;
  }

  const auto queues = dir / "queues.csv";
  if (std::filesystem::exists(queues)) {
    read_queues_csv(queues, trace);
  } else {
    const bool fwd = trace.forwarder;
    trace.sqf_queue = queue_series(trace.per_packet, QueueKind::kSqf, trace.sampling_interval, fwd);
    trace.server_queue = queue_series(trace.per_packet, QueueKind::kServer, trace.sampling_interval, fwd);
  }
  return trace;
}

void write_comparison_csv(const std::filesystem::path& path, const RunComparison& report) {
  auto out = open_out(path);
  out << "time_s,a_len,b_len,ratio\n";
  for (const auto& row : report.rows) {
    out << to_seconds(row.time) << ',' << row.a << ',' << row.b << ',';
    if (std::isinf(row.ratio)) {
      out << "inf";
    } else {
      out << row.ratio;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram& h) {
  auto out = open_out(path);
  out << "bin_low_ms,bin_high_ms,count\n";
  out.precision(9);
  // Open-ended first and last rows hold the values outside the edges.
  if (!h.edges.empty()) out << ',' << h.edges.front() * 1e3 << ',' << h.below << '\n';
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << h.edges[i] * 1e3 << ',' << h.edges[i + 1] * 1e3 << ',' << h.counts[i] << '\n';
  }
  if (!h.edges.empty()) out << h.edges.back() * 1e3 << ",," << h.above << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace qdtp
