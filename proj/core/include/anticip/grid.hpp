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
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace anticip {

/// Uniform time axis on [0, T] extended by history nodes (t < 0) and future
/// nodes (t > T). Node i sits at t_i = (i - history_nodes) * h.
class TimeGrid {
 public:
  TimeGrid(double step, std::size_t n_steps, std::size_t history_nodes,
           std::size_t future_nodes);

  double step() const noexcept { return step_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  double horizon() const noexcept { return static_cast<double>(n_steps_) * step_; }
  std::size_t history_nodes() const noexcept { return history_nodes_; }
  std::size_t future_nodes() const noexcept { return future_nodes_; }
  std::size_t node_count() const noexcept {
    return history_nodes_ + n_steps_ + 1 + future_nodes_;
  }

  /// Node of t = 0 and of t = T.
  std::size_t zero_node() const noexcept { return history_nodes_; }
  std::size_t terminal_node() const noexcept { return history_nodes_ + n_steps_; }
  std::size_t node_of_step(std::size_t step) const noexcept { return history_nodes_ + step; }
  std::size_t step_of_node(std::size_t node) const noexcept { return node - history_nodes_; }

  double time(std::size_t node) const noexcept {
    return (static_cast<double>(node) - static_cast<double>(history_nodes_)) * step_;
  }
  bool is_history(std::size_t node) const noexcept { return node < history_nodes_; }
  bool is_future(std::size_t node) const noexcept { return node > terminal_node(); }

  /// Integer k with |lag - k h| <= 1e-12 h, otherwise LagMisaligned.
  std::size_t lag_index(double lag) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double step_;
  std::size_t n_steps_;
  std::size_t history_nodes_;
  std::size_t future_nodes_;
};

/// h = T / n_steps. Extensions cover both the requested spans and every lag,
/// so node i -/+ k exists for every interior i and registered lag index k.
TimeGrid make_grid(double horizon, std::size_t n_steps, std::span<const double> lags,
                   double history_span, double future_span);

/// Per-path values on every node of a grid. Storage is node-major so that the
/// cross-path slice at one node is contiguous.
class PathEnsemble {
 public:
  PathEnsemble(const TimeGrid& grid, std::size_t n_paths, double fill = 0.0);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t n_paths() const noexcept { return n_paths_; }

  double& operator()(std::size_t path, std::size_t node) {
    return values_[node * n_paths_ + path];
  }
  double operator()(std::size_t path, std::size_t node) const {
    return values_[node * n_paths_ + path];
  }
  std::span<double> at_node(std::size_t node) {
    return {values_.data() + node * n_paths_, n_paths_};
  }
  std::span<const double> at_node(std::size_t node) const {
    return {values_.data() + node * n_paths_, n_paths_};
  }

  bool is_path_constant(std::size_t node) const;
  double mean(std::size_t node) const;
  double standard_error(std::size_t node) const;

  /// Deterministic (single-path) data repeated on n_paths paths.
  PathEnsemble broadcast(std::size_t n_paths) const;

  std::span<const double> raw() const noexcept { return values_; }

 private:
  TimeGrid grid_;
  std::size_t n_paths_;
  std::vector<double> values_;
};

/// Fills history and future nodes with fn(t); nodes on [0, T] are untouched.
PathEnsemble extend_with_history(PathEnsemble ensemble,
                                 const std::function<double(double)>& fn);

/// Brownian increments dW over the steps of [0, T), plus the running level
/// W(t_s) at steps s = 0..N.
class IncrementEnsemble {
 public:
  IncrementEnsemble(const TimeGrid& grid, std::uint64_t seed, std::size_t n_paths,
                    std::vector<double> increments);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t n_paths() const noexcept { return n_paths_; }

  double increment(std::size_t path, std::size_t step) const {
    return increments_[step * n_paths_ + path];
  }
  std::span<const double> step_increments(std::size_t step) const {
    return {increments_.data() + step * n_paths_, n_paths_};
  }
  double level(std::size_t path, std::size_t step) const {
    return levels_[step * n_paths_ + path];
  }
  std::span<const double> step_levels(std::size_t step) const {
    return {levels_.data() + step * n_paths_, n_paths_};
  }

  /// Sums groups of fine increments onto a coarser grid with the same
  /// horizon, giving increments of the same Brownian paths.
  IncrementEnsemble coarsen(const TimeGrid& coarse) const;

 private:
  TimeGrid grid_;
  std::uint64_t seed_;
  std::size_t n_paths_;
  std::vector<double> increments_;
  std::vector<double> levels_;
};

/// N(0, h) draw for (seed, path, step); a pure function of its arguments.
double brownian_increment(std::uint64_t seed, std::size_t path, std::size_t step,
                          double step_size) noexcept;

IncrementEnsemble brownian_increments(const TimeGrid& grid, std::size_t n_paths,
                                      std::uint64_t seed);

}  // namespace anticip
