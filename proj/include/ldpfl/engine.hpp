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

#ifndef LDPFL_ENGINE_HPP_
#define LDPFL_ENGINE_HPP_

// Deterministic federated training session. The generator draw order is part
// of the observable behaviour:
//
//   NewSession   5 draws for the initial weights (w1..w4, bias)
//   AddUsers     4 draws per user for its features, users in order
//   TrainEpoch   the mechanism draws of each user's submission, users in order

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldpfl/error.hpp"
#include "ldpfl/mechanisms.hpp"
#include "ldpfl/models.hpp"
#include "ldpfl/rng.hpp"
#include "ldpfl/types.hpp"

namespace ldpfl {

inline constexpr double kDefaultLearningRate = 0.01;

struct SessionConfig {
  ModelKind model = ModelKind::kLinearRegression;
  MechanismKind mechanism = MechanismKind::kNone;
  // Total per-user budget; required unless mechanism is kNone.
  std::optional<double> epsilon;
  std::uint64_t seed = 0;
  double learning_rate = kDefaultLearningRate;

  void Validate() const {
    if (mechanism != MechanismKind::kNone && !epsilon.has_value()) {
      throw Error(ErrorCode::kInvalidConfig,
                  std::string("mechanism '") +
                      std::string(MechanismName(mechanism)) +
                      "' requires epsilon");
    }
    if (epsilon.has_value() &&
        (!std::isfinite(*epsilon) || *epsilon <= 0.0)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "epsilon must be finite and positive");
    }
    if (!std::isfinite(learning_rate) || learning_rate <= 0.0) {
      throw Error(ErrorCode::kInvalidConfig,
                  "learning_rate must be finite and positive");
    }
  }

  std::optional<PrivacyBudget> budget() const {
    if (!epsilon.has_value()) return std::nullopt;
    return PrivacyBudget(*epsilon);
  }

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

// What the aggregator observes from one user: the gradient it was sent and
// the model weights the user computed it against.
struct SubmissionLogEntry {
  std::size_t user_id = 0;
  WeightVector weights_at_submission;
  Gradient reported_gradient{};

  friend bool operator==(const SubmissionLogEntry&,
                         const SubmissionLogEntry&) = default;
};

// Dataset metrics right after one user's update was applied.
struct TrainEvent {
  std::size_t user_id = 0;
  double cost_after_update = 0.0;
  std::optional<double> accuracy_after_update;

  friend bool operator==(const TrainEvent&, const TrainEvent&) = default;
};

struct Session {
  SessionConfig config;
  WeightVector weights;
  std::vector<TrainingRecord> users;
  RngState rng;
  std::uint64_t epoch_count = 0;
  std::vector<SubmissionLogEntry> last_epoch_log;

  friend bool operator==(const Session&, const Session&) = default;
};

struct Metrics {
  double cost = 0.0;
  std::optional<double> accuracy;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

inline Session NewSession(const SessionConfig& config) {
  config.Validate();
  Session session;
  session.config = config;
  session.rng = RngState(config.seed);
  for (double& w : session.weights.w) w = session.rng.NextUniform(-1.0, 1.0);
  session.weights.bias = session.rng.NextUniform(-1.0, 1.0);
  return session;
}

// Appends `count` users with features uniform on [-1, 1]^4 and labels from
// the generator weights.
inline void AddUsers(Session& session, std::size_t count) {
  if (count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "user count must be positive");
  }
  session.users.reserve(session.users.size() + count);
  for (std::size_t n = 0; n < count; ++n) {
    TrainingRecord rec;
    for (double& x : rec.features) x = session.rng.NextUniform(-1.0, 1.0);
    rec.label = GenerateLabel(session.config.model, rec.features);
    session.users.push_back(rec);
  }
}

inline Metrics SessionMetrics(const Session& session) {
  Metrics m;
  m.cost = DatasetCost(session.config.model, session.weights, session.users);
  if (IsClassifier(session.config.model)) {
    m.accuracy =
        DatasetAccuracy(session.config.model, session.weights, session.users);
  }
  return m;
}

// One epoch of sequential SGD: every user, in insertion order, computes its
// gradient against the current weights, perturbs it, submits it, and the
// aggregator applies it immediately. The submissions replace last_epoch_log.
inline std::vector<TrainEvent> TrainEpoch(Session& session) {
  if (session.users.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "cannot train without users");
  }
  const SessionConfig& config = session.config;
  const std::optional<PrivacyBudget> budget = config.budget();

  std::vector<SubmissionLogEntry> log;
  std::vector<TrainEvent> events;
  log.reserve(session.users.size());
  events.reserve(session.users.size());

  for (std::size_t id = 0; id < session.users.size(); ++id) {
    const Gradient truth =
        ComputeGradient(config.model, session.weights, session.users[id]);
    const Gradient sent =
        PerturbGradient(truth, budget, config.mechanism, session.rng);
    log.push_back({id, session.weights, sent});
    session.weights.Step(sent, config.learning_rate);

    const Metrics m = SessionMetrics(session);
    events.push_back({id, m.cost, m.accuracy});
  }

  session.last_epoch_log = std::move(log);
  ++session.epoch_count;
  return events;
}

}  // namespace ldpfl

#endif  // LDPFL_ENGINE_HPP_
