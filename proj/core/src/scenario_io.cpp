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

#include "qdtp/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qdtp/errors.hpp"

namespace qdtp {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const char* where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(std::string(where) + ": unknown field '" + key + "'");
  }
}

template <typename T>
T required(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key)) throw ConfigError(std::string(where) + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(where) + ": field '" + key + "': " + e.what());
  }
}

template <typename T>
T optional_field(const json& obj, const char* key, T fallback, const char* where) {
  return obj.contains(key) ? required<T>(obj, key, where) : fallback;
}

TrafficModel traffic_from_json(const json& j, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  reject_unknown(j, {"kind", "rate", "jitter", "start", "duration"}, where);
  TrafficModel m;
  m.kind = parse_traffic_kind(required<std::string>(j, "kind", where));
  m.rate = required<double>(j, "rate", where);
  m.jitter = optional_field<double>(j, "jitter", 0.0, where);
  m.start = optional_field<double>(j, "start", 0.0, where);
  m.duration = required<double>(j, "duration", where);
  return m;
}

ServiceModel service_from_json(const json& j, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  reject_unknown(j, {"mode", "mean", "variance", "outlier_probability", "outlier_scale"}, where);
  ServiceModel m;
  m.mode = parse_service_mode(required<std::string>(j, "mode", where));
  m.mean = required<double>(j, "mean", where);
  m.variance = optional_field<double>(j, "variance", 0.0, where);
  m.outlier_probability = optional_field<double>(j, "outlier_probability", m.outlier_probability, where);
  m.outlier_scale = optional_field<double>(j, "outlier_scale", m.outlier_scale, where);
  return m;
}

json to_json(const TrafficModel& m) {
  return {{"kind", to_string(m.kind)},
          {"rate", m.rate},
          {"jitter", m.jitter},
          {"start", m.start},
          {"duration", m.duration}};
}

json to_json(const ServiceModel& m) {
  return {{"mode", to_string(m.mode)},
          {"mean", m.mean},
          {"variance", m.variance},
          {"outlier_probability", m.outlier_probability},
          {"outlier_scale", m.outlier_scale}};
}

}  // namespace

Scenario parse_scenario(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("scenario: expected a JSON object");
  reject_unknown(root,
                 {"normal_sources", "attack", "service_no_attack", "service_under_attack", "seed", "horizon",
                  "attack_labels", "congestion_threshold"},
                 "scenario");

  Scenario s;
  if (root.contains("normal_sources")) {
    if (!root["normal_sources"].is_array()) throw ConfigError("scenario: normal_sources must be an array");
    for (const auto& src : root["normal_sources"]) s.normal_sources.push_back(traffic_from_json(src, "normal_sources"));
  }
  if (root.contains("attack") && !root["attack"].is_null()) s.attack = traffic_from_json(root["attack"], "attack");
  s.service_no_attack = service_from_json(required<json>(root, "service_no_attack", "scenario"), "service_no_attack");
  s.service_under_attack =
      service_from_json(required<json>(root, "service_under_attack", "scenario"), "service_under_attack");
  s.seed = required<std::uint64_t>(root, "seed", "scenario");
  s.horizon = required<double>(root, "horizon", "scenario");
  s.attack_labels = optional_field<bool>(root, "attack_labels", true, "scenario");
  s.congestion_threshold =
      optional_field<std::size_t>(root, "congestion_threshold", kDefaultCongestionThreshold, "scenario");
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
  json root;
  root["normal_sources"] = json::array();
  for (const auto& src : s.normal_sources) root["normal_sources"].push_back(to_json(src));
  root["attack"] = s.attack ? to_json(*s.attack) : json(nullptr);
  root["service_no_attack"] = to_json(s.service_no_attack);
  root["service_under_attack"] = to_json(s.service_under_attack);
  root["seed"] = s.seed;
  root["horizon"] = s.horizon;
  root["attack_labels"] = s.attack_labels;
  root["congestion_threshold"] = s.congestion_threshold;
  return root.dump(2);
}

}  // namespace qdtp
