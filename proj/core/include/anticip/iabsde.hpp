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
#include <vector>

#include "anticip/estimator.hpp"
#include "anticip/grid.hpp"
#include "anticip/kernels.hpp"

namespace anticip {

/// Generator arguments at one (node, path). y_a and z_a are the conditional
/// anticipation terms; v_d is the delayed control.
struct Arguments {
  double t = 0.0;
  std::size_t node = 0;
  std::size_t path = 0;
  double y = 0.0;
  double y_a = 0.0;
  double z = 0.0;
  double z_a = 0.0;
  double v = 0.0;
  double v_d = 0.0;
};

using Generator = std::function<double(const Arguments&)>;

struct BackwardProblem {
  Generator generator;
  /// xi and eta on [T, T + span]; empty means zero.
  std::function<double(double)> terminal_y;
  std::function<double(double)> terminal_z;
  DelayKernel kernel_y;
  DelayKernel kernel_z;
  /// v and v_d; a single-path ensemble is shared by all paths, absent means zero.
  std::optional<PathEnsemble> control;
  std::optional<PathEnsemble> delayed_control;
  double lipschitz = 1.0;
};

struct StatePair {
  PathEnsemble Y;
  PathEnsemble Z;
};

enum class BackwardScheme { explicit_y, implicit_y };

/// One Picard sweep. Anticipation terms come from (y_prev, z_prev); the
/// remaining discrete BSDE is solved backward from T:
///   Z(i) = E_i[Y(i+1) dW_i] / h,
///   Y(i) = E_i[Y(i+1)] + h f(t_i, y*, Y_a(i), Z(i), Z_a(i), v(i), v_d(i)),
/// with y* = E_i[Y(i+1)] (explicit_y) or y* = Y(i) (implicit_y).
StatePair backward_euler_pass(const BackwardProblem& problem, const IncrementEnsemble& increments,
                              const StatePair& previous, const ConditionalEstimator& estimator,
                              BackwardScheme scheme = BackwardScheme::explicit_y);

/// Y = xi, Z = eta on nodes from T on; zero elsewhere.
StatePair initial_guess(const BackwardProblem& problem, const TimeGrid& grid,
                        std::size_t n_paths);

/// max over nodes of sqrt(E[(Y1 - Y2)^2 + (Z1 - Z2)^2]).
double iterate_distance(const StatePair& a, const StatePair& b);

struct PicardResult {
  StatePair state;
  std::size_t iterations = 0;
  std::vector<double> residuals;
};

/// Sweeps from initial_guess until iterate_distance < tol. The first sweep is
/// not counted: a generator without anticipation returns after one iteration
/// with residuals == {0}. Throws NoConvergence carrying the last residual.
PicardResult picard_solve(const BackwardProblem& problem, const IncrementEnsemble& increments,
                          const ConditionalEstimator& estimator, double tol,
                          std::size_t max_iter,
                          BackwardScheme scheme = BackwardScheme::explicit_y);

struct AprioriEstimate {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// lhs = E[sup_[0,T] |Y|^2 + sum_i |Z(i)|^2 h],
/// rhs = E[sup_[T,T+span] |xi|^2 + sum |eta|^2 h + (sum_i |f(t_i,0,0,0,0,v,v_d)| h)^2].
AprioriEstimate apriori_estimate_check(const BackwardProblem& problem, const StatePair& solution);

}  // namespace anticip
