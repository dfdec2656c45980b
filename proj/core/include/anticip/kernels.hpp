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
#include <cstddef>
#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "anticip/estimator.hpp"
#include "anticip/grid.hpp"

namespace anticip {

/// Density phi(s, r) for the pair (earlier time s, later time r = s + lag).
/// An empty Density means phi == 1.
using Density = std::function<double(double earlier, double later)>;

struct DiracMeasure {
  double lag = 0.0;
};
struct ExponentialMeasure {
  double rate = 1.0;
  double tail_tol = 1e-6;
};
struct UniformMeasure {
  double width = 1.0;
};
struct AtomicMeasure {
  std::vector<std::pair<double, double>> atoms;  // (lag, mass)
};

struct MeasureSpec {
  std::variant<DiracMeasure, ExponentialMeasure, UniformMeasure, AtomicMeasure> measure;
  Density density;
};

struct KernelAtom {
  std::size_t lag_index = 0;
  double mass = 0.0;
};

/// A discretized kernel: atoms at lags k_j * h with masses m_j, weighted by
/// phi. The same object drives both directions:
///   delay at node i        sum_j m_j phi(t_{i-k_j}, t_i)  x(i - k_j)
///   anticipation at node i sum_j m_j phi(t_i, t_{i+k_j})  x(i + k_j)
/// so anticipation is the exact transpose of delay on the node lattice.
class DelayKernel {
 public:
  DelayKernel() = default;
  DelayKernel(const TimeGrid& grid, std::vector<KernelAtom> atoms, Density density = {},
              double truncation_span = 0.0);

  const std::vector<KernelAtom>& atoms() const noexcept { return atoms_; }
  bool empty() const noexcept { return atoms_.empty(); }
  const Density& density() const noexcept { return density_; }

  /// Weight of atom j on the pair (earlier_node, earlier_node + k_j).
  double weight(std::size_t j, std::size_t earlier_node) const;

  /// Discrete C_phi * C_alpha: sum_j sup_i |m_j phi|.
  double total_bound() const noexcept { return total_bound_; }
  double total_mass() const noexcept;
  double truncation_span() const noexcept { return truncation_span_; }
  std::size_t max_lag_index() const noexcept;
  double step() const noexcept { return step_; }

 private:
  std::vector<KernelAtom> atoms_;
  Density density_;
  double step_ = 0.0;
  std::size_t history_nodes_ = 0;
  double truncation_span_ = 0.0;
  double total_bound_ = 0.0;
};

/// Left-endpoint discretization on the lag axis.
///  Dirac(d)          one atom at d/h with mass 1
///  Exponential(l)    atoms k = 0..K, mass e^{-l k h} h, K h >= Theta where
///                    e^{-l Theta} / l = tail_tol
///  Uniform(W)        atoms k = 0..K-1 of mass h, last mass trimmed so the
///                    total is exactly W
///  Atomic            masses at the listed (aligned) lags
/// Throws LagMisaligned, or TailTooWide when the largest lag exceeds either
/// grid extension.
DelayKernel discretize_measure(const MeasureSpec& spec, const TimeGrid& grid);

/// Truncation span Theta for an exponential kernel.
double exponential_truncation_span(double rate, double tail_tol);

/// Delay functional at node for every path. IndexUnderflow when node - k_j < 0.
std::vector<double> delay_apply(const DelayKernel& kernel, const PathEnsemble& x,
                                std::size_t node);

/// Delay of the product multiplier * x, i.e. sum_j w_j m(i-k_j) x(i-k_j).
std::vector<double> delay_apply_weighted(const DelayKernel& kernel, const PathEnsemble& x,
                                         const PathEnsemble& multiplier, std::size_t node);

/// Pathwise sum_j w_j x(i + k_j), no conditioning. IndexOverflow past the grid.
std::vector<double> anticipate_pathwise(const DelayKernel& kernel, const PathEnsemble& x,
                                        std::size_t node);

/// E[sum_j w_j x(i + k_j) | F_{t_i}] at an interior node.
std::vector<double> anticipate_apply(const DelayKernel& kernel, const PathEnsemble& x,
                                     std::size_t node, const ConditionalEstimator& estimator,
                                     const IncrementEnsemble& info);

/// Delay (resp. anticipation) at every node of [0, T]; other nodes are zero.
PathEnsemble delay_apply_all(const DelayKernel& kernel, const PathEnsemble& x);
PathEnsemble anticipate_apply_all(const DelayKernel& kernel, const PathEnsemble& x,
                                  const ConditionalEstimator& estimator,
                                  const IncrementEnsemble& info);

struct PairingGap {
  double gap = 0.0;
  double scale = 0.0;
  double relative() const noexcept { return scale > 0.0 ? std::abs(gap) / scale : std::abs(gap); }
};

/// E sum_i h p(i) (K_ant x)(i)  -  E sum_i h (K_delay p)(i) x(i), both sums
/// over nodes of [0, T]. Vanishes up to round-off when p is zero on history
/// nodes and x is zero on future nodes. scale is the same sum with absolute
/// values, for relative comparisons.
PairingGap adjoint_pairing_check(const DelayKernel& kernel, const PathEnsemble& p,
                                 const PathEnsemble& x);

}  // namespace anticip
