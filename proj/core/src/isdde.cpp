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

#include "anticip/isdde.hpp"

#include <cmath>
#include <string>

#include "anticip/error.hpp"
#include "anticip/parallel.hpp"

namespace anticip {

ForwardProblem ForwardProblem::scalar(std::function<double(double, double, double)> drift,
                                      std::function<double(double, double, double)> diffusion,
                                      DelayKernel kernel,
                                      std::function<double(double)> initial_path,
                                      double initial_value) {
  ForwardProblem problem;
  problem.drift = [b = std::move(drift)](const ForwardState& s) {
    return b(s.t, s.x, s.delayed[0]);
  };
  problem.diffusion = [sigma = std::move(diffusion)](const ForwardState& s) {
    return sigma ? sigma(s.t, s.x, s.delayed[0]) : 0.0;
  };
  problem.channels.push_back({std::move(kernel), std::nullopt});
  problem.initial_path = std::move(initial_path);
  problem.initial_value = initial_value;
  return problem;
}

namespace {

// Kernel weights for one channel, precomputed on the source nodes the
// interior steps can reach. weights[j * nodes + src].
struct ChannelTable {
  const DelayChannel* channel;
  std::vector<double> weights;
};

ChannelTable tabulate(const DelayChannel& channel, const TimeGrid& grid) {
  ChannelTable table{&channel, {}};
  const auto& atoms = channel.kernel.atoms();
  const std::size_t nodes = grid.node_count();
  table.weights.assign(atoms.size() * nodes, 0.0);
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (atoms[j].lag_index > grid.zero_node()) {
      fail(ErrorCode::index_underflow, "delay channel reaches before the first history node");
    }
    for (std::size_t node = grid.zero_node(); node < grid.terminal_node(); ++node) {
      const std::size_t src = node - atoms[j].lag_index;
      table.weights[j * nodes + src] = channel.kernel.weight(j, src);
    }
  }
  return table;
}

}  // namespace

PathEnsemble euler_maruyama(const ForwardProblem& problem, const TimeGrid& grid,
                            const IncrementEnsemble& increments) {
  require(increments.grid().n_steps() == grid.n_steps(), "increments do not match the grid");
  require(static_cast<bool>(problem.drift), "forward problem needs a drift");
  const std::size_t n_paths = increments.n_paths();
  const std::size_t nodes = grid.node_count();
  const double h = grid.step();

  std::vector<ChannelTable> tables;
  tables.reserve(problem.channels.size());
  for (const auto& channel : problem.channels) {
    if (channel.multiplier) {
      require(channel.multiplier->n_paths() == 1 || channel.multiplier->n_paths() == n_paths,
              "channel multiplier path count mismatch");
    }
    tables.push_back(tabulate(channel, grid));
  }

  PathEnsemble out(grid, n_paths);
  for (std::size_t node = 0; node < grid.zero_node(); ++node) {
    const double value = problem.initial_path ? problem.initial_path(grid.time(node)) : 0.0;
    auto row = out.at_node(node);
    std::fill(row.begin(), row.end(), value);
  }

  parallel_for(n_paths, [&](std::size_t path) {
    std::vector<double> delayed(tables.size(), 0.0);
    out(path, grid.zero_node()) = problem.initial_value;
    for (std::size_t s = 0; s < grid.n_steps(); ++s) {
      const std::size_t node = grid.node_of_step(s);
      for (std::size_t c = 0; c < tables.size(); ++c) {
        const auto& atoms = tables[c].channel->kernel.atoms();
        const auto& multiplier = tables[c].channel->multiplier;
        const std::size_t mp = multiplier && multiplier->n_paths() == 1 ? 0 : path;
        double sum = 0.0;
        for (std::size_t j = 0; j < atoms.size(); ++j) {
          const std::size_t src = node - atoms[j].lag_index;
          const double w = tables[c].weights[j * nodes + src];
          if (w == 0.0) continue;
          const double m = multiplier ? (*multiplier)(mp, src) : 1.0;
          sum += w * m * out(path, src);
        }
        delayed[c] = sum;
      }
      const ForwardState state{grid.time(node), node, path, out(path, node), delayed};
      const double b = problem.drift(state);
      const double sigma = problem.diffusion ? problem.diffusion(state) : 0.0;
      const double next = state.x + b * h + sigma * increments.increment(path, s);
      if (!std::isfinite(next)) {
        fail(ErrorCode::non_finite, "Euler-Maruyama state left the finite range at t = " +
                                        std::to_string(grid.time(node + 1)));
      }
      out(path, node + 1) = next;
    }
  });
  return out;
}

PathEnsemble consumption_adjoint_closed_form(double b, const TimeGrid& grid) {
  require(b >= 0.0, "consumption coefficient b must be nonnegative");
  PathEnsemble p(grid, 1);
  const double root = std::sqrt(b);
  for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
    p(0, node) = -std::cosh(root * grid.time(node));
  }
  return p;
}

PathEnsemble lq_adjoint_segments(const LqCoefficients& coefficients, double delay,
                                 const TimeGrid& grid, const IncrementEnsemble& increments) {
  require(increments.grid().n_steps() == grid.n_steps(), "increments do not match the grid");
  const std::size_t lag = grid.lag_index(delay);
  require(lag >= 1, "segment recursion needs a positive delay");
  require(grid.history_nodes() >= lag, "grid history must cover the delay");
  const auto& [A, B, C, D] = coefficients;
  const auto coef = [](const std::function<double(double)>& f, double t) {
    return f ? f(t) : 0.0;
  };
  const std::size_t n_paths = increments.n_paths();
  const std::size_t n_steps = grid.n_steps();
  const double h = grid.step();

  PathEnsemble p(grid, n_paths);
  parallel_for(n_paths, [&](std::size_t path) {
    const std::size_t zero = grid.zero_node();
    p(path, zero) = -1.0;
    for (std::size_t start = 0; start < n_steps; start += lag) {
      const std::size_t stop = std::min(start + lag, n_steps);
      double log_phi = 0.0;
      double correction = 0.0;  // integrals divided by Phi_k, from kd to t
      const double anchor = p(path, zero + start);
      for (std::size_t s = start; s < stop; ++s) {
        const double t = static_cast<double>(s) * h;
        const double dw = increments.increment(path, s);
        const double phi = std::exp(log_phi);
        if (start > 0) {
          const double lagged = p(path, zero + s - lag);
          const double d = coef(D, t - delay);
          correction += ((coef(B, t - delay) - coef(C, t) * d) * lagged * h + d * lagged * dw) / phi;
        }
        const double c = coef(C, t);
        log_phi += coef(A, t) * h + c * dw - 0.5 * c * c * h;
        const double next = start == 0 ? -std::exp(log_phi) : std::exp(log_phi) * (anchor + correction);
        if (!std::isfinite(next)) {
          fail(ErrorCode::non_finite, "segment recursion left the finite range");
        }
        p(path, zero + s + 1) = next;
      }
    }
  });
  return p;
}

}  // namespace anticip
