// Copyright 2026 The ldpfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPFL_SERIALIZATION_HPP_
#define LDPFL_SERIALIZATION_HPP_

// Canonical JSON for sessions, events and recovery reports. Object keys keep
// insertion order, so documents are byte-stable for a given state. Doubles
// are written in shortest round-trip form, which makes snapshots lossless.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ldpfl/engine.hpp"
#include "ldpfl/error.hpp"
#include "ldpfl/mechanisms.hpp"
#include "ldpfl/models.hpp"
#include "ldpfl/recovery.hpp"

namespace ldpfl {

using Json = nlohmann::ordered_json;

namespace internal {

[[noreturn]] inline void ThrowParse(const std::string& what) {
  throw Error(ErrorCode::kParse, what);
}

inline const Json& Field(const Json& obj, const char* key) {
  if (!obj.is_object()) ThrowParse("expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) ThrowParse(std::string("missing field '") + key + "'");
  return *it;
}

inline double AsDouble(const Json& value, const char* what) {
  if (!value.is_number()) ThrowParse(std::string(what) + " must be a number");
  return value.get<double>();
}

inline std::uint64_t AsUint64(const Json& value, const char* what) {
  if (!value.is_number_unsigned()) {
    ThrowParse(std::string(what) + " must be a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

template <std::size_t N>
std::array<double, N> AsArray(const Json& value, const char* what) {
  if (!value.is_array() || value.size() != N) {
    ThrowParse(std::string(what) + " must be an array of " +
               std::to_string(N) + " numbers");
  }
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = AsDouble(value[i], what);
  return out;
}

inline Json OptionalNumber(const std::optional<double>& value) {
  return value.has_value() ? Json(*value) : Json(nullptr);
}

}  // namespace internal

inline Json ToJson(const SessionConfig& config) {
  Json j;
  j["model"] = ModelName(config.model);
  j["mechanism"] = MechanismName(config.mechanism);
  j["epsilon"] = internal::OptionalNumber(config.epsilon);
  j["seed"] = config.seed;
  j["learning_rate"] = config.learning_rate;
  return j;
}

// Accepts a partial config: only "model" is required. The result is
// validated.
inline SessionConfig ConfigFromJson(const Json& j) {
  using internal::Field;
  SessionConfig config;
  const Json& model = Field(j, "model");
  if (!model.is_string()) internal::ThrowParse("model must be a string");
  try {
    config.model = ParseModel(model.get<std::string>());
    if (auto it = j.find("mechanism"); it != j.end()) {
      if (!it->is_string()) internal::ThrowParse("mechanism must be a string");
      config.mechanism = ParseMechanism(it->get<std::string>());
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  if (auto it = j.find("epsilon"); it != j.end() && !it->is_null()) {
    config.epsilon = internal::AsDouble(*it, "epsilon");
  }
  if (auto it = j.find("seed"); it != j.end()) {
    config.seed = internal::AsUint64(*it, "seed");
  }
  if (auto it = j.find("learning_rate"); it != j.end()) {
    config.learning_rate = internal::AsDouble(*it, "learning_rate");
  }
  config.Validate();
  return config;
}

inline Json ToJson(const WeightVector& weights) { return weights.params(); }

inline Json ToJson(const TrainingRecord& rec) {
  Json j;
  j["features"] = rec.features;
  j["label"] = rec.label;
  return j;
}

inline Json ToJson(const SubmissionLogEntry& entry) {
  Json j;
  j["user_id"] = entry.user_id;
  j["weights_at_submission"] = ToJson(entry.weights_at_submission);
  j["reported_gradient"] = entry.reported_gradient;
  return j;
}

// Snapshot with the fixed key order config, weights, users, rng,
// epoch_count, last_epoch_log.
inline Json ToJson(const Session& session) {
  Json j;
  j["config"] = ToJson(session.config);
  j["weights"] = ToJson(session.weights);
  Json users = Json::array();
  for (const auto& rec : session.users) users.push_back(ToJson(rec));
  j["users"] = std::move(users);
  j["rng"] = session.rng.state();
  j["epoch_count"] = session.epoch_count;
  Json log = Json::array();
  for (const auto& entry : session.last_epoch_log) log.push_back(ToJson(entry));
  j["last_epoch_log"] = std::move(log);
  return j;
}

inline Session SessionFromJson(const Json& j) {
  using internal::Field;
  Session session;
  session.config = ConfigFromJson(Field(j, "config"));
  session.weights = WeightVector::FromParams(
      internal::AsArray<kNumParams>(Field(j, "weights"), "weights"));

  const Json& users = Field(j, "users");
  if (!users.is_array()) internal::ThrowParse("users must be an array");
  for (const Json& u : users) {
    TrainingRecord rec;
    rec.features =
        internal::AsArray<kNumFeatures>(Field(u, "features"), "features");
    rec.label = internal::AsDouble(Field(u, "label"), "label");
    session.users.push_back(rec);
  }

  session.rng = RngState(internal::AsUint64(Field(j, "rng"), "rng"));
  session.epoch_count =
      internal::AsUint64(Field(j, "epoch_count"), "epoch_count");

  const Json& log = Field(j, "last_epoch_log");
  if (!log.is_array()) internal::ThrowParse("last_epoch_log must be an array");
  for (const Json& e : log) {
    SubmissionLogEntry entry;
    entry.user_id = internal::AsUint64(Field(e, "user_id"), "user_id");
    if (entry.user_id >= session.users.size()) {
      internal::ThrowParse("log entry refers to an unknown user");
    }
    entry.weights_at_submission =
        WeightVector::FromParams(internal::AsArray<kNumParams>(
            Field(e, "weights_at_submission"), "weights_at_submission"));
    entry.reported_gradient = internal::AsArray<kNumParams>(
        Field(e, "reported_gradient"), "reported_gradient");
    session.last_epoch_log.push_back(entry);
  }
  return session;
}

inline Json ToJson(const TrainEvent& event) {
  Json j;
  j["user_id"] = event.user_id;
  j["cost"] = event.cost_after_update;
  j["accuracy"] = internal::OptionalNumber(event.accuracy_after_update);
  return j;
}

inline Json ToJson(const std::vector<TrainEvent>& events) {
  Json j = Json::array();
  for (const auto& e : events) j.push_back(ToJson(e));
  return j;
}

inline Json ToJson(const Metrics& metrics) {
  Json j;
  j["cost"] = metrics.cost;
  j["accuracy"] = internal::OptionalNumber(metrics.accuracy);
  return j;
}

inline Json ToJson(const RecoveryResult& result) {
  Json j;
  j["user_id"] = result.user_id;
  j["recovered"] = result.recovered.recovered;
  if (result.recovered.recovered) {
    j["features"] = result.recovered.features;
    j["label"] = result.recovered.label;
  } else {
    j["features"] = nullptr;
    j["label"] = nullptr;
  }
  j["exp_hamming"] = result.exp_hamming;
  return j;
}

inline Json ToJson(const RecoveryReport& report) {
  Json j;
  j["k"] = report.k;
  Json per_user = Json::array();
  for (const auto& r : report.per_user) per_user.push_back(ToJson(r));
  j["per_user"] = std::move(per_user);
  j["average_exp_hamming"] = report.average_exp_hamming;
  return j;
}

}  // namespace ldpfl

#endif  // LDPFL_SERIALIZATION_HPP_
