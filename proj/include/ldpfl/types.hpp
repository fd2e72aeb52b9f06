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

#ifndef LDPFL_TYPES_HPP_
#define LDPFL_TYPES_HPP_

#include <array>
#include <cstddef>

namespace ldpfl {

inline constexpr std::size_t kNumFeatures = 4;
// Feature weights followed by the bias.
inline constexpr std::size_t kNumParams = kNumFeatures + 1;
inline constexpr std::size_t kBiasIndex = kNumFeatures;

using FeatureVector = std::array<double, kNumFeatures>;
// Ordered as d/dw1..d/dw4, d/db.
using Gradient = std::array<double, kNumParams>;

}  // namespace ldpfl

#endif  // LDPFL_TYPES_HPP_
