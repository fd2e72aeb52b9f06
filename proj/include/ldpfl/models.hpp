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

#ifndef LDPFL_MODELS_HPP_
#define LDPFL_MODELS_HPP_

// Linear regression, logistic regression and linear SVM over four features
// plus a bias. Each user holds exactly one record, so every gradient here is
// the gradient of a single-record loss:
//
//   linear     0.5 * (yhat - y)^2
//   logistic   log(1 + exp(-y * yhat))      labels in {-1, +1}
//   svm        max(0, 1 - y * yhat)         labels in {-1, +1}, no regularizer
//
// All three gradients have the form c * (x1, x2, x3, x4, 1) for a scalar c.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>

#include "ldpfl/error.hpp"
#include "ldpfl/types.hpp"

namespace ldpfl {

enum class ModelKind { kLinearRegression, kLogisticRegression, kSvm };

constexpr std::string_view ModelName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLinearRegression:
      return "linear";
    case ModelKind::kLogisticRegression:
      return "logistic";
    case ModelKind::kSvm:
      return "svm";
  }
  return "linear";
}

inline ModelKind ParseModel(std::string_view name) {
  for (ModelKind kind : {ModelKind::kLinearRegression,
                         ModelKind::kLogisticRegression, ModelKind::kSvm}) {
    if (ModelName(kind) == name) return kind;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown model '" + std::string(name) + "'");
}

constexpr bool IsClassifier(ModelKind kind) {
  return kind != ModelKind::kLinearRegression;
}

struct WeightVector {
  FeatureVector w{};
  double bias = 0.0;

  static WeightVector FromParams(const Gradient& params) {
    WeightVector out;
    for (std::size_t i = 0; i < kNumFeatures; ++i) out.w[i] = params[i];
    out.bias = params[kBiasIndex];
    return out;
  }

  Gradient params() const {
    Gradient out;
    for (std::size_t i = 0; i < kNumFeatures; ++i) out[i] = w[i];
    out[kBiasIndex] = bias;
    return out;
  }

  // In-place SGD step: this <- this - rate * gradient.
  void Step(const Gradient& gradient, double rate) {
    for (std::size_t i = 0; i < kNumFeatures; ++i) w[i] -= rate * gradient[i];
    bias -= rate * gradient[kBiasIndex];
  }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

// Weights of the generator that labels the synthetic data.
inline constexpr WeightVector kIdealWeights{{-0.55, -0.82, 0.07, 0.95}, 0.31};

struct TrainingRecord {
  FeatureVector features{};
  double label = 0.0;

  friend bool operator==(const TrainingRecord&,
                         const TrainingRecord&) = default;
};

inline double PredictRaw(const WeightVector& weights,
                         const FeatureVector& x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kNumFeatures; ++i) sum += weights.w[i] * x[i];
  return sum + weights.bias;
}

// Regression target, or its sign (strictly positive -> +1) for classifiers.
inline double GenerateLabel(ModelKind kind, const FeatureVector& x) {
  const double d = PredictRaw(kIdealWeights, x);
  if (!IsClassifier(kind)) return d;
  return d > 0.0 ? 1.0 : -1.0;
}

// Scalar c such that the record gradient is c * (x, 1).
inline double GradientFactor(ModelKind kind, const WeightVector& weights,
                             const TrainingRecord& rec) {
  const double yhat = PredictRaw(weights, rec.features);
  const double y = rec.label;
  switch (kind) {
    case ModelKind::kLinearRegression:
      return yhat - y;
    case ModelKind::kLogisticRegression:
      return -y / (1.0 + std::exp(y * yhat));
    case ModelKind::kSvm:
      return y * yhat < 1.0 ? -y : 0.0;
  }
  return 0.0;
}

inline Gradient ComputeGradient(ModelKind kind, const WeightVector& weights,
                                const TrainingRecord& rec) {
  const double c = GradientFactor(kind, weights, rec);
  Gradient g;
  for (std::size_t i = 0; i < kNumFeatures; ++i) g[i] = c * rec.features[i];
  g[kBiasIndex] = c;
  return g;
}

inline double Loss(ModelKind kind, const WeightVector& weights,
                   const TrainingRecord& rec) {
  const double yhat = PredictRaw(weights, rec.features);
  const double y = rec.label;
  switch (kind) {
    case ModelKind::kLinearRegression: {
      const double r = yhat - y;
      return 0.5 * r * r;
    }
    case ModelKind::kLogisticRegression: {
      // log(1 + e^z) without overflow for large z.
      const double z = -y * yhat;
      return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
    case ModelKind::kSvm:
      return std::max(0.0, 1.0 - y * yhat);
  }
  return 0.0;
}

inline double DatasetCost(ModelKind kind, const WeightVector& weights,
                          std::span<const TrainingRecord> records) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "cost of an empty dataset");
  }
  double total = 0.0;
  for (const auto& rec : records) total += Loss(kind, weights, rec);
  return total / static_cast<double>(records.size());
}

// Fraction of records whose predicted sign matches the label; a raw
// prediction of exactly 0 counts as +1.
inline double DatasetAccuracy(ModelKind kind, const WeightVector& weights,
                              std::span<const TrainingRecord> records) {
  if (!IsClassifier(kind)) {
    throw Error(ErrorCode::kWrongModelKind,
                "accuracy is undefined for linear regression");
  }
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "accuracy of an empty dataset");
  }
  std::size_t correct = 0;
  for (const auto& rec : records) {
    const double predicted =
        PredictRaw(weights, rec.features) >= 0.0 ? 1.0 : -1.0;
    if (predicted == rec.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

}  // namespace ldpfl

#endif  // LDPFL_MODELS_HPP_
