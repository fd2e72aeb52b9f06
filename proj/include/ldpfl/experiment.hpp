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

#ifndef LDPFL_EXPERIMENT_HPP_
#define LDPFL_EXPERIMENT_HPP_

// Headless experiment runs: create a session, add users, train for a number
// of epochs, attack the last epoch, and summarise. Shared by the CLI and the
// service so both produce identical reports for the same action sequence.

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "ldpfl/engine.hpp"
#include "ldpfl/error.hpp"
#include "ldpfl/recovery.hpp"
#include "ldpfl/serialization.hpp"

namespace ldpfl {

struct ExperimentConfig {
  SessionConfig session;
  std::size_t users = 100;
  std::size_t epochs = 1;
  double k = kDefaultRecoveryK;
};

struct EpochSummary {
  std::uint64_t epoch = 0;  // 1-based
  double cost = 0.0;
  std::optional<double> accuracy;

  friend bool operator==(const EpochSummary&, const EpochSummary&) = default;
};

struct ExperimentReport {
  SessionConfig config;
  std::size_t users = 0;
  std::uint64_t epochs = 0;
  double k = kDefaultRecoveryK;
  double final_cost = 0.0;
  std::optional<double> final_accuracy;
  double average_exp_hamming = 0.0;
  std::size_t recovered_users = 0;
  std::vector<EpochSummary> epoch_summaries;
};

// Metrics at the end of an epoch are those of its last event.
inline EpochSummary SummarizeEpoch(std::uint64_t epoch,
                                   const std::vector<TrainEvent>& events) {
  if (events.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "epoch produced no events");
  }
  return {epoch, events.back().cost_after_update,
          events.back().accuracy_after_update};
}

inline ExperimentReport BuildReport(const Session& session,
                                    std::vector<EpochSummary> summaries,
                                    const RecoveryReport& recovery) {
  ExperimentReport report;
  report.config = session.config;
  report.users = session.users.size();
  report.epochs = session.epoch_count;
  report.k = recovery.k;
  const Metrics m = SessionMetrics(session);
  report.final_cost = m.cost;
  report.final_accuracy = m.accuracy;
  report.average_exp_hamming = recovery.average_exp_hamming;
  for (const auto& r : recovery.per_user) {
    if (r.recovered.recovered) ++report.recovered_users;
  }
  report.epoch_summaries = std::move(summaries);
  return report;
}

inline ExperimentReport RunExperiment(const ExperimentConfig& config) {
  if (config.users == 0) {
    throw Error(ErrorCode::kInvalidArgument, "users must be positive");
  }
  if (config.epochs == 0) {
    throw Error(ErrorCode::kInvalidArgument, "epochs must be positive");
  }
  Session session = NewSession(config.session);
  AddUsers(session, config.users);
  std::vector<EpochSummary> summaries;
  summaries.reserve(config.epochs);
  for (std::size_t e = 0; e < config.epochs; ++e) {
    const std::vector<TrainEvent> events = TrainEpoch(session);
    summaries.push_back(SummarizeEpoch(session.epoch_count, events));
  }
  return BuildReport(session, std::move(summaries),
                     RecoverSession(session, config.k));
}

inline Json ToJson(const ExperimentReport& report) {
  Json j;
  Json config = ToJson(report.config);
  config["users"] = report.users;
  config["epochs"] = report.epochs;
  config["k"] = report.k;
  j["config"] = std::move(config);
  j["final_cost"] = report.final_cost;
  j["final_accuracy"] = internal::OptionalNumber(report.final_accuracy);
  j["average_exp_hamming"] = report.average_exp_hamming;
  j["recovered_users"] = report.recovered_users;
  Json epochs = Json::array();
  for (const auto& s : report.epoch_summaries) {
    Json e;
    e["epoch"] = s.epoch;
    e["cost"] = s.cost;
    e["accuracy"] = internal::OptionalNumber(s.accuracy);
    epochs.push_back(std::move(e));
  }
  j["epochs"] = std::move(epochs);
  return j;
}

// ---------------------------------------------------------------------------
// CSV

// Shortest representation that parses back to the same double.
inline std::string FormatDouble(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

inline std::string FormatOptional(const std::optional<double>& value) {
  return value.has_value() ? FormatDouble(*value) : std::string();
}

inline std::string ToCsv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "model,mechanism,epsilon,seed,learning_rate,users,epochs,k,"
         "final_cost,final_accuracy,avg_exp_hamming,recovered_users\n";
  out << ModelName(report.config.model) << ','
      << MechanismName(report.config.mechanism) << ','
      << FormatOptional(report.config.epsilon) << ',' << report.config.seed
      << ',' << FormatDouble(report.config.learning_rate) << ','
      << report.users << ',' << report.epochs << ','
      << FormatDouble(report.k) << ',' << FormatDouble(report.final_cost)
      << ',' << FormatOptional(report.final_accuracy) << ','
      << FormatDouble(report.average_exp_hamming) << ','
      << report.recovered_users << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Epsilon sweeps

struct SweepRow {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double final_cost = 0.0;
  std::optional<double> final_accuracy;
  double avg_exp_hamming = 0.0;
};

// Runs `base` once per (epsilon, seed) with seeds first_seed,
// first_seed + 1, ..., epsilons in the given order, seeds innermost.
inline std::vector<SweepRow> RunSweep(const ExperimentConfig& base,
                                      const std::vector<double>& epsilons,
                                      std::uint64_t first_seed,
                                      std::size_t seed_count) {
  if (epsilons.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no epsilons to sweep");
  }
  if (seed_count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "seed count must be positive");
  }
  std::vector<SweepRow> rows;
  rows.reserve(epsilons.size() * seed_count);
  for (double eps : epsilons) {
    for (std::size_t i = 0; i < seed_count; ++i) {
      ExperimentConfig cfg = base;
      cfg.session.epsilon = eps;
      cfg.session.seed = first_seed + i;
      const ExperimentReport r = RunExperiment(cfg);
      rows.push_back({eps, cfg.session.seed, r.final_cost, r.final_accuracy,
                      r.average_exp_hamming});
    }
  }
  return rows;
}

inline std::string SweepToCsv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "epsilon,seed,final_cost,final_accuracy,avg_exp_hamming\n";
  for (const auto& r : rows) {
    out << FormatDouble(r.epsilon) << ',' << r.seed << ','
        << FormatDouble(r.final_cost) << ',' << FormatOptional(r.final_accuracy)
        << ',' << FormatDouble(r.avg_exp_hamming) << '\n';
  }
  return out.str();
}

}  // namespace ldpfl

#endif  // LDPFL_EXPERIMENT_HPP_
