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

#include "anticip/iabsde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "anticip/error.hpp"
#include "anticip/parallel.hpp"

namespace anticip {

namespace {

double sample(const std::optional<PathEnsemble>& e, std::size_t path, std::size_t node) {
  if (!e) return 0.0;
  return (*e)(e->n_paths() == 1 ? 0 : path, node);
}

void check_control(const std::optional<PathEnsemble>& e, const TimeGrid& grid,
                   std::size_t n_paths, const char* what) {
  if (!e) return;
  require(e->grid() == grid, std::string(what) + " lives on a different grid");
  require(e->n_paths() == 1 || e->n_paths() == n_paths,
          std::string(what) + " path count mismatch");
}

double terminal(const std::function<double(double)>& fn, double t) { return fn ? fn(t) : 0.0; }

}  // namespace

StatePair initial_guess(const BackwardProblem& problem, const TimeGrid& grid,
                        std::size_t n_paths) {
  StatePair state{PathEnsemble(grid, n_paths), PathEnsemble(grid, n_paths)};
  for (std::size_t node = grid.terminal_node(); node < grid.node_count(); ++node) {
    const double t = grid.time(node);
    const double y = terminal(problem.terminal_y, t);
    const double z = terminal(problem.terminal_z, t);
    auto ys = state.Y.at_node(node);
    auto zs = state.Z.at_node(node);
    std::fill(ys.begin(), ys.end(), y);
    std::fill(zs.begin(), zs.end(), z);
  }
  return state;
}

StatePair backward_euler_pass(const BackwardProblem& problem, const IncrementEnsemble& increments,
                              const StatePair& previous, const ConditionalEstimator& estimator,
                              BackwardScheme scheme) {
  require(static_cast<bool>(problem.generator), "backward problem needs a generator");
  const TimeGrid& grid = previous.Y.grid();
  const std::size_t n_paths = increments.n_paths();
  require(increments.grid().n_steps() == grid.n_steps(), "increments do not match the grid");
  require(previous.Y.n_paths() == n_paths && previous.Z.n_paths() == n_paths,
          "previous iterate path count mismatch");
  check_control(problem.control, grid, n_paths, "control");
  check_control(problem.delayed_control, grid, n_paths, "delayed control");
  const double h = grid.step();

  StatePair next = initial_guess(problem, grid, n_paths);
  std::vector<double> y_a(n_paths, 0.0);
  std::vector<double> z_a(n_paths, 0.0);
  for (std::size_t s = grid.n_steps(); s-- > 0;) {
    const std::size_t node = grid.node_of_step(s);
    const double t = grid.time(node);
    if (!problem.kernel_y.empty()) {
      y_a = anticipate_apply(problem.kernel_y, previous.Y, node, estimator, increments);
    }
    if (!problem.kernel_z.empty()) {
      z_a = anticipate_apply(problem.kernel_z, previous.Z, node, estimator, increments);
    }
    const auto y_next = next.Y.at_node(node + 1);
    const auto ey = estimator.project(increments, s, y_next);
    const auto z = estimator.project_increment(increments, s, y_next);
    auto y_out = next.Y.at_node(node);
    auto z_out = next.Z.at_node(node);
    parallel_for(n_paths, [&](std::size_t path) {
      Arguments args{t, node, path, ey[path], y_a[path], z[path], z_a[path],
                     sample(problem.control, path, node),
                     sample(problem.delayed_control, path, node)};
      double y = ey[path] + h * problem.generator(args);
      if (scheme == BackwardScheme::implicit_y) {
        for (int k = 0; k < 100; ++k) {
          args.y = y;
          const double updated = ey[path] + h * problem.generator(args);
          const bool done = std::abs(updated - y) <= 1e-15 * (1.0 + std::abs(y));
          y = updated;
          if (done) break;
        }
      }
      if (!std::isfinite(y) || !std::isfinite(z[path])) {
        fail(ErrorCode::non_finite, "backward sweep left the finite range at t = " +
                                        std::to_string(t));
      }
      y_out[path] = y;
      z_out[path] = z[path];
    });
  }
  return next;
}

double iterate_distance(const StatePair& a, const StatePair& b) {
  const TimeGrid& grid = a.Y.grid();
  const std::size_t n_paths = a.Y.n_paths();
  double worst = 0.0;
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    double sum = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
      const double dy = a.Y(p, node) - b.Y(p, node);
      const double dz = a.Z(p, node) - b.Z(p, node);
      sum += dy * dy + dz * dz;
    }
    worst = std::max(worst, std::sqrt(sum / static_cast<double>(n_paths)));
  }
  return worst;
}

PicardResult picard_solve(const BackwardProblem& problem, const IncrementEnsemble& increments,
                          const ConditionalEstimator& estimator, double tol,
                          std::size_t max_iter, BackwardScheme scheme) {
  require(tol > 0.0, "picard tolerance must be positive");
  require(max_iter >= 1, "picard needs at least one iteration");
  const TimeGrid& grid = increments.grid();
  const StatePair guess = initial_guess(problem, grid, increments.n_paths());
  PicardResult result{backward_euler_pass(problem, increments, guess, estimator, scheme), 0, {}};
  for (std::size_t k = 1; k <= max_iter; ++k) {
    StatePair next = backward_euler_pass(problem, increments, result.state, estimator, scheme);
    const double residual = iterate_distance(next, result.state);
    result.state = std::move(next);
    result.residuals.push_back(residual);
    result.iterations = k;
    if (residual < tol) return result;
  }
  fail(ErrorCode::no_convergence,
       "picard iteration did not reach tolerance in " + std::to_string(max_iter) + " sweeps",
       result.residuals.back());
}

AprioriEstimate apriori_estimate_check(const BackwardProblem& problem, const StatePair& solution) {
  const TimeGrid& grid = solution.Y.grid();
  const std::size_t n_paths = solution.Y.n_paths();
  const double h = grid.step();

  double terminal_part = 0.0;
  for (std::size_t node = grid.terminal_node(); node < grid.node_count(); ++node) {
    const double t = grid.time(node);
    const double xi = terminal(problem.terminal_y, t);
    terminal_part = std::max(terminal_part, xi * xi);
  }
  for (std::size_t node = grid.terminal_node(); node + 1 < grid.node_count(); ++node) {
    const double eta = terminal(problem.terminal_z, grid.time(node));
    terminal_part += eta * eta * h;
  }

  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t p = 0; p < n_paths; ++p) {
    double sup_y = 0.0;
    double int_z = 0.0;
    double forcing = 0.0;
    for (std::size_t s = 0; s <= grid.n_steps(); ++s) {
      const std::size_t node = grid.node_of_step(s);
      sup_y = std::max(sup_y, solution.Y(p, node) * solution.Y(p, node));
      if (s == grid.n_steps()) break;
      int_z += solution.Z(p, node) * solution.Z(p, node) * h;
      Arguments zero{grid.time(node), node, p, 0.0, 0.0, 0.0, 0.0,
                     sample(problem.control, p, node), sample(problem.delayed_control, p, node)};
      forcing += std::abs(problem.generator(zero)) * h;
    }
    lhs += sup_y + int_z;
    rhs += terminal_part + forcing * forcing;
  }
  lhs /= static_cast<double>(n_paths);
  rhs /= static_cast<double>(n_paths);
  double ratio = 0.0;
  if (rhs > 0.0) {
    ratio = lhs / rhs;
  } else if (lhs > 0.0) {
    ratio = std::numeric_limits<double>::infinity();
  }
  return {lhs, rhs, ratio};
}

}  // namespace anticip
