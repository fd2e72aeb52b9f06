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

#ifndef LDPFL_ERROR_HPP_
#define LDPFL_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ldpfl {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidBudget,
  kInvalidConfig,
  kEmptyDataset,
  kWrongModelKind,
  kNoTrainingYet,
  kNotFound,
  kParse,
};

// Stable machine-readable name, used in API error payloads.
constexpr std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kInvalidBudget:
      return "invalid_budget";
    case ErrorCode::kInvalidConfig:
      return "invalid_config";
    case ErrorCode::kEmptyDataset:
      return "empty_dataset";
    case ErrorCode::kWrongModelKind:
      return "wrong_model_kind";
    case ErrorCode::kNoTrainingYet:
      return "no_training_yet";
    case ErrorCode::kNotFound:
      return "not_found";
    case ErrorCode::kParse:
      return "parse_error";
  }
  return "unknown";
}

// All library failures are reported as an Error carrying a code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ldpfl

#endif  // LDPFL_ERROR_HPP_
