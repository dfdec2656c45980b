/*
 Copyright 2026 The anticip_smp Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "anticip/error.hpp"

namespace anticip {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::lag_misaligned: return "LagMisaligned";
    case ErrorCode::tail_too_wide: return "TailTooWide";
    case ErrorCode::index_underflow: return "IndexUnderflow";
    case ErrorCode::index_overflow: return "IndexOverflow";
    case ErrorCode::non_finite: return "NonFinite";
    case ErrorCode::regression_singular: return "RegressionSingular";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::sign_assumption_violated: return "SignAssumptionViolated";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what, std::optional<double> value)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code),
      value_(value) {}

void fail(ErrorCode code, const std::string& what, std::optional<double> value) {
  throw Error(code, what, value);
}

}  // namespace anticip
