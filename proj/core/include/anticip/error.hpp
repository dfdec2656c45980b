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

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace anticip {

enum class ErrorCode {
  invalid_argument,
  lag_misaligned,
  tail_too_wide,
  index_underflow,
  index_overflow,
  non_finite,
  regression_singular,
  no_convergence,
  sign_assumption_violated,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<double> value = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  /// Diagnostic number attached to the failure, e.g. the last Picard residual.
  std::optional<double> value() const noexcept { return value_; }

 private:
  ErrorCode code_;
  std::optional<double> value_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what,
                       std::optional<double> value = std::nullopt);

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::invalid_argument, what);
}

}  // namespace anticip
