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

#ifndef LDPFL_MECHANISMS_HPP_
#define LDPFL_MECHANISMS_HPP_

// Local differential privacy randomizers for scalars in [-1, 1]: Laplace,
// Duchi et al.'s two-point mechanism, the Piecewise mechanism and the Hybrid
// mixture of the latter two. Every randomizer draws its randomness from an
// explicitly passed RngState and consumes a fixed number of unit draws, so a
// run is reproducible from the generator state alone:
//
//   Laplace    1 draw
//   Duchi      1 draw
//   Piecewise  2 draws
//   Hybrid     1 draw, then the draws of the selected branch

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "ldpfl/error.hpp"
#include "ldpfl/rng.hpp"
#include "ldpfl/types.hpp"

namespace ldpfl {

enum class MechanismKind { kNone, kLaplace, kDuchi, kPiecewise, kHybrid };

constexpr std::string_view MechanismName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kNone:
      return "none";
    case MechanismKind::kLaplace:
      return "laplace";
    case MechanismKind::kDuchi:
      return "duchi";
    case MechanismKind::kPiecewise:
      return "piecewise";
    case MechanismKind::kHybrid:
      return "hybrid";
  }
  return "none";
}

inline MechanismKind ParseMechanism(std::string_view name) {
  for (MechanismKind kind :
       {MechanismKind::kNone, MechanismKind::kLaplace, MechanismKind::kDuchi,
        MechanismKind::kPiecewise, MechanismKind::kHybrid}) {
    if (MechanismName(kind) == name) return kind;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown mechanism '" + std::string(name) + "'");
}

// A validated privacy budget: finite and strictly positive.
class PrivacyBudget {
 public:
  explicit PrivacyBudget(double epsilon) : epsilon_(epsilon) {
    if (!std::isfinite(epsilon) || epsilon <= 0.0) {
      throw Error(ErrorCode::kInvalidBudget,
                  "privacy budget must be finite and positive, got " +
                      std::to_string(epsilon));
    }
  }

  double epsilon() const { return epsilon_; }

  // Equal share of this budget for each of `parts` sequentially composed
  // releases.
  PrivacyBudget Split(std::size_t parts) const {
    if (parts == 0) {
      throw Error(ErrorCode::kInvalidArgument, "cannot split budget into 0");
    }
    return PrivacyBudget(epsilon_ / static_cast<double>(parts));
  }

 private:
  double epsilon_;
};

// Below this budget the Hybrid mechanism degenerates to Duchi's mechanism.
inline constexpr double kHybridEpsilonThreshold = 0.61;

namespace internal {

inline void CheckScalarInput(double t) {
  if (!(t >= -1.0 && t <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "mechanism input must lie in [-1, 1], got " +
                    std::to_string(t));
  }
}

}  // namespace internal

// ---------------------------------------------------------------------------
// Laplace

// Scale of the Laplace noise; the [-1, 1] domain has sensitivity 2.
inline double LaplaceScale(PrivacyBudget eps) { return 2.0 / eps.epsilon(); }

// Inverse-CDF transform of a unit draw into Laplace(0, scale) noise.
// u = 0.5 maps to zero noise.
inline double LaplaceNoiseFromUnit(double u, double scale) {
  const double centered = u - 0.5;
  const double sign = (centered > 0.0) - (centered < 0.0);
  // u = 0 would give log(0); the draw grid is 2^-53 so nudge by one step.
  const double tail = std::max(1.0 - 2.0 * std::abs(centered), 0x1.0p-53);
  return -scale * sign * std::log(tail);
}

inline double LaplacePerturb(double t, PrivacyBudget eps, RngState& rng) {
  internal::CheckScalarInput(t);
  return t + LaplaceNoiseFromUnit(rng.NextUnit(), LaplaceScale(eps));
}

// ---------------------------------------------------------------------------
// Duchi et al.

// Magnitude of both possible outputs, (e^eps + 1) / (e^eps - 1).
inline double DuchiBound(PrivacyBudget eps) {
  const double e = std::exp(eps.epsilon());
  return (e + 1.0) / (e - 1.0);
}

// Pr[output = +DuchiBound | t].
inline double DuchiPositiveProbability(double t, PrivacyBudget eps) {
  const double e = std::exp(eps.epsilon());
  return t * (e - 1.0) / (2.0 * (e + 1.0)) + 0.5;
}

// Closed-form probability of emitting the positive or negative output.
inline double DuchiOutputProbability(double t, bool positive,
                                     PrivacyBudget eps) {
  const double p = DuchiPositiveProbability(t, eps);
  return positive ? p : 1.0 - p;
}

inline double DuchiPerturb(double t, PrivacyBudget eps, RngState& rng) {
  internal::CheckScalarInput(t);
  const double bound = DuchiBound(eps);
  return rng.NextUnit() < DuchiPositiveProbability(t, eps) ? bound : -bound;
}

// ---------------------------------------------------------------------------
// Piecewise

// Output support is [-C, C] with C = (e^{eps/2} + 1) / (e^{eps/2} - 1).
inline double PiecewiseBound(PrivacyBudget eps) {
  const double h = std::exp(eps.epsilon() / 2.0);
  return (h + 1.0) / (h - 1.0);
}

// Probability of sampling from the high-density window around t.
inline double PiecewiseWindowProbability(PrivacyBudget eps) {
  const double h = std::exp(eps.epsilon() / 2.0);
  return h / (h + 1.0);
}

struct Interval {
  double lo;
  double hi;
};

// The high-density window [l(t), r(t)], of width C - 1.
inline Interval PiecewiseWindow(double t, PrivacyBudget eps) {
  const double c = PiecewiseBound(eps);
  const double lo = (c + 1.0) / 2.0 * t - (c - 1.0) / 2.0;
  return {lo, lo + c - 1.0};
}

inline double PiecewisePerturb(double t, PrivacyBudget eps, RngState& rng) {
  internal::CheckScalarInput(t);
  const double c = PiecewiseBound(eps);
  const Interval window = PiecewiseWindow(t, eps);
  const double pick = rng.NextUnit();
  const double u = rng.NextUnit();
  if (pick < PiecewiseWindowProbability(eps)) {
    return window.lo + u * (window.hi - window.lo);
  }
  // Uniform over [-C, l) U (r, C], total length C + 1.
  const double left_len = window.lo + c;
  const double offset = u * (c + 1.0);
  return offset < left_len ? -c + offset : window.hi + (offset - left_len);
}

// ---------------------------------------------------------------------------
// Hybrid

// Probability of taking the Piecewise branch.
inline double HybridPiecewiseWeight(PrivacyBudget eps) {
  return eps.epsilon() > kHybridEpsilonThreshold
             ? 1.0 - std::exp(-eps.epsilon() / 2.0)
             : 0.0;
}

inline double HybridPerturb(double t, PrivacyBudget eps, RngState& rng) {
  internal::CheckScalarInput(t);
  if (rng.NextUnit() < HybridPiecewiseWeight(eps)) {
    return PiecewisePerturb(t, eps, rng);
  }
  return DuchiPerturb(t, eps, rng);
}

// ---------------------------------------------------------------------------

// Dispatches to the scalar randomizer for `kind`; kNone returns t as is.
inline double Perturb(MechanismKind kind, double t, PrivacyBudget eps,
                      RngState& rng) {
  switch (kind) {
    case MechanismKind::kNone:
      return t;
    case MechanismKind::kLaplace:
      return LaplacePerturb(t, eps, rng);
    case MechanismKind::kDuchi:
      return DuchiPerturb(t, eps, rng);
    case MechanismKind::kPiecewise:
      return PiecewisePerturb(t, eps, rng);
    case MechanismKind::kHybrid:
      return HybridPerturb(t, eps, rng);
  }
  return t;
}

// Perturbs a gradient under total budget `eps`. Each component is clipped to
// [-1, 1] and released with eps / 5, in index order. With kNone the gradient
// is returned unchanged (no clipping) and `eps` may be absent.
inline Gradient PerturbGradient(const Gradient& gradient,
                                std::optional<PrivacyBudget> eps,
                                MechanismKind kind, RngState& rng) {
  if (kind == MechanismKind::kNone) return gradient;
  if (!eps.has_value()) {
    throw Error(ErrorCode::kInvalidBudget,
                std::string("mechanism '") + std::string(MechanismName(kind)) +
                    "' requires a privacy budget");
  }
  const PrivacyBudget share = eps->Split(gradient.size());
  Gradient out;
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    out[i] = Perturb(kind, std::clamp(gradient[i], -1.0, 1.0), share, rng);
  }
  return out;
}

}  // namespace ldpfl

#endif  // LDPFL_MECHANISMS_HPP_
