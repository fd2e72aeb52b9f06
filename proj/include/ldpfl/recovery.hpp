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

#ifndef LDPFL_RECOVERY_HPP_
#define LDPFL_RECOVERY_HPP_

// Gradient inversion by an untrusted aggregator. For every supported model a
// single-record gradient is c * (x, 1), so the bias component exposes c and
// the remaining components divided by it expose the features.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ldpfl/engine.hpp"
#include "ldpfl/error.hpp"
#include "ldpfl/models.hpp"
#include "ldpfl/types.hpp"

namespace ldpfl {

inline constexpr double kDefaultRecoveryK = 0.5;

// A bias gradient smaller than this carries no usable signal.
inline constexpr double kMinBiasGradient = 1e-12;

struct RecoveredRecord {
  bool recovered = false;
  // Meaningful only when recovered is true.
  FeatureVector features{};
  double label = 0.0;

  friend bool operator==(const RecoveredRecord&,
                         const RecoveredRecord&) = default;
};

struct RecoveryResult {
  std::size_t user_id = 0;
  RecoveredRecord recovered;
  double exp_hamming = 0.0;

  friend bool operator==(const RecoveryResult&,
                         const RecoveryResult&) = default;
};

struct RecoveryReport {
  std::vector<RecoveryResult> per_user;
  double average_exp_hamming = 0.0;
  double k = kDefaultRecoveryK;

  friend bool operator==(const RecoveryReport&,
                         const RecoveryReport&) = default;
};

inline RecoveredRecord InvertGradient(ModelKind kind,
                                      const WeightVector& weights,
                                      const Gradient& gradient) {
  const double factor = gradient[kBiasIndex];
  RecoveredRecord out;
  if (!(std::abs(factor) >= kMinBiasGradient)) return out;

  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    // The attacker knows features live in [-1, 1].
    out.features[i] = std::clamp(gradient[i] / factor, -1.0, 1.0);
  }
  if (IsClassifier(kind)) {
    // The logistic and hinge factors are -y times something positive.
    out.label = factor > 0.0 ? -1.0 : 1.0;
  } else {
    // factor is the residual yhat - y.
    out.label = PredictRaw(weights, out.features) - factor;
  }
  out.recovered = true;
  return out;
}

inline double L1Distance(const FeatureVector& a, const FeatureVector& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kNumFeatures; ++i) sum += std::abs(a[i] - b[i]);
  return sum;
}

// exp(-k * ||truth - recovered||_1): 1 for a perfect reconstruction, falling
// to 1/e once the L1 error reaches 1/k.
inline double ExpHamming(const FeatureVector& truth,
                         const FeatureVector& recovered, double k) {
  if (!std::isfinite(k) || k <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "exp-hamming constant k must be positive");
  }
  return std::exp(-k * L1Distance(truth, recovered));
}

// Attacks every submission of the last epoch. Failed inversions score 0 and
// still count towards the average.
inline RecoveryReport RecoverSession(const Session& session,
                                     double k = kDefaultRecoveryK) {
  if (!std::isfinite(k) || k <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "exp-hamming constant k must be positive");
  }
  if (session.last_epoch_log.empty()) {
    throw Error(ErrorCode::kNoTrainingYet,
                "no gradients have been submitted yet");
  }
  RecoveryReport report;
  report.k = k;
  report.per_user.reserve(session.last_epoch_log.size());
  double total = 0.0;
  for (const SubmissionLogEntry& entry : session.last_epoch_log) {
    RecoveryResult result;
    result.user_id = entry.user_id;
    result.recovered = InvertGradient(session.config.model,
                                      entry.weights_at_submission,
                                      entry.reported_gradient);
    if (result.recovered.recovered) {
      result.exp_hamming =
          ExpHamming(session.users.at(entry.user_id).features,
                     result.recovered.features, k);
    }
    total += result.exp_hamming;
    report.per_user.push_back(result);
  }
  report.average_exp_hamming =
      total / static_cast<double>(report.per_user.size());
  return report;
}

}  // namespace ldpfl

#endif  // LDPFL_RECOVERY_HPP_
