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

#include "anticip/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "anticip/error.hpp"
#include "anticip/parallel.hpp"
#include "anticip/philox.hpp"

namespace anticip {

std::array<double, 2> counter_uniforms(std::uint64_t seed, Stream stream,
                                       std::uint64_t a, std::uint64_t b) noexcept {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(a),
                                static_cast<std::uint32_t>(a >> 32),
                                static_cast<std::uint32_t>(b),
                                static_cast<std::uint32_t>(b >> 32) ^
                                    (static_cast<std::uint32_t>(stream) << 24)};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                            static_cast<std::uint32_t>(seed >> 32)};
  const auto out = Philox4x32::generate(ctr, key);
  // 53-bit mantissas, shifted by half an ulp so 0 and 1 are never produced.
  const auto to_unit = [](std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  };
  return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
}

double counter_normal(std::uint64_t seed, Stream stream, std::uint64_t a,
                      std::uint64_t b) noexcept {
  const auto [u1, u2] = counter_uniforms(seed, stream, a, b);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

TimeGrid::TimeGrid(double step, std::size_t n_steps, std::size_t history_nodes,
                   std::size_t future_nodes)
    : step_(step), n_steps_(n_steps), history_nodes_(history_nodes), future_nodes_(future_nodes) {
  require(step > 0.0 && std::isfinite(step), "grid step must be positive");
  require(n_steps >= 1, "grid needs at least one step");
}

std::size_t TimeGrid::lag_index(double lag) const {
  require(lag >= 0.0 && std::isfinite(lag), "lags must be finite and nonnegative");
  const double ratio = lag / step_;
  const double k = std::round(ratio);
  if (std::abs(lag - k * step_) > 1e-12 * step_) {
    fail(ErrorCode::lag_misaligned, "lag " + std::to_string(lag) +
                                        " is not a multiple of step " + std::to_string(step_));
  }
  return static_cast<std::size_t>(k);
}

namespace {

std::size_t nodes_for_span(double span, double step) {
  // tolerate representation error so that e.g. 0.3 / 0.1 gives 3, not 4
  return static_cast<std::size_t>(std::max(0.0, std::ceil(span / step - 1e-9)));
}

}  // namespace

TimeGrid make_grid(double horizon, std::size_t n_steps, std::span<const double> lags,
                   double history_span, double future_span) {
  require(horizon > 0.0 && std::isfinite(horizon), "horizon T must be positive");
  require(n_steps >= 1, "n_steps must be at least 1");
  require(history_span >= 0.0 && future_span >= 0.0, "extension spans must be nonnegative");
  const double step = horizon / static_cast<double>(n_steps);
  const TimeGrid probe(step, n_steps, 0, 0);
  std::size_t max_lag = 0;
  for (double lag : lags) max_lag = std::max(max_lag, probe.lag_index(lag));
  return TimeGrid(step, n_steps, std::max(nodes_for_span(history_span, step), max_lag),
                  std::max(nodes_for_span(future_span, step), max_lag));
}

PathEnsemble::PathEnsemble(const TimeGrid& grid, std::size_t n_paths, double fill)
    : grid_(grid), n_paths_(n_paths), values_(grid.node_count() * n_paths, fill) {
  require(n_paths >= 1, "an ensemble needs at least one path");
}

bool PathEnsemble::is_path_constant(std::size_t node) const {
  const auto row = at_node(node);
  return std::all_of(row.begin(), row.end(), [&](double v) { return v == row[0]; });
}

double PathEnsemble::mean(std::size_t node) const {
  const auto row = at_node(node);
  double sum = 0.0;
  for (double v : row) sum += v;
  return sum / static_cast<double>(n_paths_);
}

double PathEnsemble::standard_error(std::size_t node) const {
  if (n_paths_ < 2) return 0.0;
  const auto row = at_node(node);
  const double m = mean(node);
  double ss = 0.0;
  for (double v : row) ss += (v - m) * (v - m);
  const double n = static_cast<double>(n_paths_);
  return std::sqrt(ss / (n - 1.0) / n);
}

PathEnsemble PathEnsemble::broadcast(std::size_t n_paths) const {
  require(n_paths_ == 1 || n_paths_ == n_paths, "broadcast needs a single-path source");
  if (n_paths_ == n_paths) return *this;
  PathEnsemble out(grid_, n_paths);
  for (std::size_t node = 0; node < grid_.node_count(); ++node) {
    auto row = out.at_node(node);
    std::fill(row.begin(), row.end(), values_[node]);
  }
  return out;
}

PathEnsemble extend_with_history(PathEnsemble ensemble,
                                 const std::function<double(double)>& fn) {
  const TimeGrid& grid = ensemble.grid();
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    if (!grid.is_history(node) && !grid.is_future(node)) continue;
    const double value = fn(grid.time(node));
    auto row = ensemble.at_node(node);
    std::fill(row.begin(), row.end(), value);
  }
  return ensemble;
}

IncrementEnsemble::IncrementEnsemble(const TimeGrid& grid, std::uint64_t seed,
                                     std::size_t n_paths, std::vector<double> increments)
    : grid_(grid), seed_(seed), n_paths_(n_paths), increments_(std::move(increments)) {
  require(n_paths >= 1, "an increment ensemble needs at least one path");
  require(increments_.size() == grid.n_steps() * n_paths, "increment array has the wrong size");
  levels_.assign((grid.n_steps() + 1) * n_paths, 0.0);
  for (std::size_t s = 0; s < grid.n_steps(); ++s) {
    for (std::size_t p = 0; p < n_paths; ++p) {
      levels_[(s + 1) * n_paths + p] = levels_[s * n_paths + p] + increments_[s * n_paths + p];
    }
  }
}

IncrementEnsemble IncrementEnsemble::coarsen(const TimeGrid& coarse) const {
  require(grid_.n_steps() % coarse.n_steps() == 0, "coarse grid must divide the fine grid");
  const std::size_t factor = grid_.n_steps() / coarse.n_steps();
  require(std::abs(coarse.step() - grid_.step() * static_cast<double>(factor)) <=
              1e-12 * coarse.step(),
          "coarse grid must share the horizon");
  std::vector<double> out(coarse.n_steps() * n_paths_, 0.0);
  for (std::size_t s = 0; s < coarse.n_steps(); ++s) {
    for (std::size_t p = 0; p < n_paths_; ++p) {
      double sum = 0.0;
      for (std::size_t j = 0; j < factor; ++j) sum += increment(p, s * factor + j);
      out[s * n_paths_ + p] = sum;
    }
  }
  return IncrementEnsemble(coarse, seed_, n_paths_, std::move(out));
}

double brownian_increment(std::uint64_t seed, std::size_t path, std::size_t step,
                          double step_size) noexcept {
  return std::sqrt(step_size) * counter_normal(seed, Stream::brownian, path, step);
}

IncrementEnsemble brownian_increments(const TimeGrid& grid, std::size_t n_paths,
                                      std::uint64_t seed) {
  require(n_paths >= 1, "n_paths must be at least 1");
  const std::size_t n_steps = grid.n_steps();
  std::vector<double> increments(n_steps * n_paths);
  const double h = grid.step();
  parallel_for(n_paths, [&](std::size_t p) {
    for (std::size_t s = 0; s < n_steps; ++s) {
      increments[s * n_paths + p] = brownian_increment(seed, p, s, h);
    }
  });
  return IncrementEnsemble(grid, seed, n_paths, std::move(increments));
}

}  // namespace anticip
