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

#ifndef LDPFL_RNG_HPP_
#define LDPFL_RNG_HPP_

#include <cstdint>

namespace ldpfl {

// splitmix64 generator. The whole state is one 64-bit word, so sessions can
// be snapshotted and replayed exactly.
class RngState {
 public:
  constexpr RngState() = default;
  constexpr explicit RngState(std::uint64_t state) : state_(state) {}

  constexpr std::uint64_t state() const { return state_; }

  // Advances the state and returns the next raw 64-bit output.
  constexpr std::uint64_t NextBits() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform value in [0, 1) with 53 bits of resolution.
  constexpr double NextUnit() {
    return static_cast<double>(NextBits() >> 11) * 0x1.0p-53;
  }

  // Uniform value in [lo, hi).
  constexpr double NextUniform(double lo, double hi) {
    return lo + (hi - lo) * NextUnit();
  }

  friend constexpr bool operator==(const RngState&, const RngState&) = default;

 private:
  std::uint64_t state_ = 0;
};

}  // namespace ldpfl

#endif  // LDPFL_RNG_HPP_
