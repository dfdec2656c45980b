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

#include <cmath>
#include <cstdint>

#include "anticip/examples.hpp"
#include "anticip/philox.hpp"
#include "anticip/smp.hpp"

namespace anticip::testing {

// Seeded family of linear-quadratic problems with anticipation in Y and Z,
// delayed control and a stochastic control sin(W) + c0.
struct RandomLinearProblem {
  ControlProblem problem;
  PathEnsemble control;
  IncrementEnsemble increments;
  ConditionalEstimator estimator = ConditionalEstimator::poly_regression(3);
};

inline double draw(std::uint64_t seed, std::uint64_t index, double lo, double hi) {
  const auto u = counter_uniforms(seed, Stream::probe, 7777, index);
  return lo + (hi - lo) * u[0];
}

inline RandomLinearProblem random_linear_problem(std::uint64_t seed, bool zero_data = false,
                                                 std::size_t n_steps = 32,
                                                 std::size_t n_paths = 256) {
  const double T = 1.0;
  const double h = T / static_cast<double>(n_steps);
  const double rate = draw(seed, 0, 2.0, 4.0);
  const double lag_z = static_cast<double>(1 + static_cast<int>(draw(seed, 1, 0.0, 6.0))) * h;
  const double lag_v = static_cast<double>(1 + static_cast<int>(draw(seed, 2, 0.0, 6.0))) * h;
  const double span = std::max({exponential_truncation_span(rate, 1e-6), lag_z, lag_v});
  const double lags[] = {lag_z, lag_v};
  const TimeGrid grid = make_grid(T, n_steps, lags, span, span);

  double a[7];
  for (int i = 0; i < 7; ++i) a[i] = draw(seed, 10 + static_cast<std::uint64_t>(i), -0.5, 0.5);
  double q[4];
  for (int i = 0; i < 4; ++i) q[i] = draw(seed, 20 + static_cast<std::uint64_t>(i), 0.0, 1.0);
  const double g = draw(seed, 30, 0.0, 1.0);
  double xi0 = draw(seed, 31, -1.0, 1.0);
  double xi1 = draw(seed, 32, -1.0, 1.0);
  double eta = draw(seed, 33, -0.5, 0.5);
  double c0 = draw(seed, 34, -0.5, 0.5);
  if (zero_data) {
    a[4] = a[5] = a[6] = 0.0;
    xi0 = xi1 = eta = 0.0;
  }

  ControlProblem cp;
  cp.name = "random-linear";
  cp.grid = grid;
  cp.kernel_y = discretize_measure({ExponentialMeasure{rate, 1e-6}, {}}, grid);
  cp.kernel_z = discretize_measure({DiracMeasure{lag_z}, {}}, grid);
  cp.kernel_v = discretize_measure({DiracMeasure{lag_v}, {}}, grid);
  cp.f = [=](const Arguments& x) {
    return a[0] * x.y + a[1] * x.y_a + a[2] * x.z + a[3] * x.z_a + a[4] * x.v + a[5] * x.v_d +
           a[6];
  };
  cp.f_partials = [=](const Arguments&) { return Partials{a[0], a[1], a[2], a[3], a[4], a[5]}; };
  cp.l = [=](const Arguments& x) {
    return 0.5 * (q[0] * x.y * x.y + q[1] * x.y_a * x.y_a + q[2] * x.z_a * x.z_a + x.v * x.v) +
           q[3] * x.z;
  };
  cp.l_partials = [=](const Arguments& x) {
    return Partials{q[0] * x.y, q[1] * x.y_a, q[3], q[2] * x.z_a, x.v, 0.0};
  };
  cp.gamma = [g](double y) { return 0.5 * g * y * y + y; };
  cp.gamma_y = [g](double y) { return g * y + 1.0; };
  cp.initial_control = [](double) { return 0.0; };
  cp.terminal_y = [=](double t) { return xi0 + xi1 * (t - T); };
  cp.terminal_z = [=](double) { return eta; };
  cp.lipschitz = 0.5 * (2.0 + 1.0 / rate + 1.0);
  cp.convex = false;

  IncrementEnsemble incs = brownian_increments(grid, n_paths, seed);
  PathEnsemble v(grid, n_paths);
  if (!zero_data) {
    for (std::size_t s = 0; s <= grid.n_steps(); ++s) {
      const std::size_t node = grid.node_of_step(s);
      for (std::size_t path = 0; path < n_paths; ++path) {
        v(path, node) = c0 + std::sin(incs.level(path, s));
      }
    }
  }
  return {std::move(cp), std::move(v), std::move(incs)};
}

inline BackwardProblem random_state_problem(const RandomLinearProblem& rp) {
  return state_problem(rp.problem, rp.control);
}

}  // namespace anticip::testing
