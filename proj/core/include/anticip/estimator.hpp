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

#include <cstddef>
#include <span>
#include <vector>

#include "anticip/grid.hpp"

namespace anticip {

/// Approximates E[X | F_t] for a cross-path sample of X, where F_t is
/// generated by the Brownian paths of an IncrementEnsemble.
///
///  - deterministic: exact for path-constant X; otherwise returns the
///    unconditional sample mean (conditioning on the trivial sigma-algebra).
///  - poly_regression(d): least-squares projection on He_0..He_d of
///    W(t)/sqrt(t). Includes the constant, so sample means are preserved.
///  - nested_mc(m): local average over bins of m paths adjacent in W(t).
///    The estimator only sees a fixed ensemble, so the inner expectation is
///    taken over neighbouring outer paths instead of resimulated branches.
///
/// Path-constant input is always returned unchanged.
class ConditionalEstimator {
 public:
  enum class Kind { deterministic, poly_regression, nested_mc };

  static ConditionalEstimator deterministic() { return {Kind::deterministic, 0, 1}; }
  static ConditionalEstimator poly_regression(int degree);
  static ConditionalEstimator nested_mc(std::size_t inner_paths);

  Kind kind() const noexcept { return kind_; }
  int degree() const noexcept { return degree_; }
  std::size_t inner_paths() const noexcept { return inner_paths_; }

  /// E[values | F_{t_step}] per path. step is the interior step index.
  std::vector<double> project(const IncrementEnsemble& info, std::size_t step,
                              std::span<const double> values) const;

  /// E[values * dW_step | F_{t_step}] / h, the martingale-representation
  /// estimate of Z. Exactly zero when values is path-constant.
  std::vector<double> project_increment(const IncrementEnsemble& info, std::size_t step,
                                        std::span<const double> values) const;

 private:
  ConditionalEstimator(Kind kind, int degree, std::size_t inner_paths)
      : kind_(kind), degree_(degree), inner_paths_(inner_paths) {}

  Kind kind_;
  int degree_;
  std::size_t inner_paths_;
};

}  // namespace anticip
