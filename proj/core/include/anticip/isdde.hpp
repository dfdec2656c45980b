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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "anticip/grid.hpp"
#include "anticip/kernels.hpp"

namespace anticip {

/// Everything a drift or diffusion coefficient may look at on one path at one
/// step: time, position on the grid, current state and the delayed terms (one
/// per DelayChannel, in channel order).
struct ForwardState {
  double t = 0.0;
  std::size_t node = 0;
  std::size_t path = 0;
  double x = 0.0;
  std::span<const double> delayed;
};

using ForwardCoefficient = std::function<double(const ForwardState&)>;

/// Delayed term sum_j w_j m(i-k_j) X(i-k_j). Without a multiplier m == 1.
/// A single-path multiplier is shared by all paths.
struct DelayChannel {
  DelayKernel kernel;
  std::optional<PathEnsemble> multiplier;
};

struct ForwardProblem {
  ForwardCoefficient drift;
  ForwardCoefficient diffusion;
  std::vector<DelayChannel> channels;
  /// X on t < 0; empty means zero.
  std::function<double(double)> initial_path;
  double initial_value = 0.0;
  /// Declared Lipschitz constant of (drift, diffusion) in (x, delayed).
  double lipschitz = 1.0;

  /// b(t, x, x_d), sigma(t, x, x_d) with one delay kernel.
  static ForwardProblem scalar(std::function<double(double, double, double)> drift,
                               std::function<double(double, double, double)> diffusion,
                               DelayKernel kernel, std::function<double(double)> initial_path,
                               double initial_value);
};

/// Explicit Euler-Maruyama over [0, T]:
///   X(i+1) = X(i) + b(t_i, X(i), X_d(i)) h + sigma(...) dW_i.
/// History nodes hold the initial path, future nodes are zero.
/// Throws NonFinite as soon as a state leaves the finite range.
PathEnsemble euler_maruyama(const ForwardProblem& problem, const TimeGrid& grid,
                            const IncrementEnsemble& increments);

/// p(t) = -cosh(sqrt(b) t) on [0, T], zero elsewhere (single path).
PathEnsemble consumption_adjoint_closed_form(double b, const TimeGrid& grid);

struct LqCoefficients {
  std::function<double(double)> A, B, C, D;
};

/// Method-of-steps solution of
///   dp = (A p + B(t-d) p(t-d)) dt + (C p + D(t-d) p(t-d)) dW,
///   p(0) = -1, p = 0 on t < 0,
/// using p(t) = Phi_k(t) [p(k d) + int (B - C D) p(s-d) / Phi_k ds
///                               + int D p(s-d) / Phi_k dW]
/// on [k d, (k+1) d], with left-point sums for every integral.
PathEnsemble lq_adjoint_segments(const LqCoefficients& coefficients, double delay,
                                 const TimeGrid& grid, const IncrementEnsemble& increments);

}  // namespace anticip
