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

#include "anticip/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "anticip/error.hpp"

namespace anticip {

DelayKernel::DelayKernel(const TimeGrid& grid, std::vector<KernelAtom> atoms, Density density,
                         double truncation_span)
    : atoms_(std::move(atoms)),
      density_(std::move(density)),
      step_(grid.step()),
      history_nodes_(grid.history_nodes()),
      truncation_span_(truncation_span) {
  for (const auto& atom : atoms_) {
    require(std::isfinite(atom.mass), "kernel masses must be finite");
  }
  if (!density_) {
    for (const auto& atom : atoms_) total_bound_ += std::abs(atom.mass);
    return;
  }
  const std::size_t nodes = grid.node_count();
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    double sup = 0.0;
    for (std::size_t e = 0; e + atoms_[j].lag_index < nodes; ++e) {
      sup = std::max(sup, std::abs(weight(j, e)));
    }
    total_bound_ += sup;
  }
}

double DelayKernel::weight(std::size_t j, std::size_t earlier_node) const {
  const KernelAtom& atom = atoms_[j];
  if (!density_) return atom.mass;
  const auto time = [&](std::size_t node) {
    return (static_cast<double>(node) - static_cast<double>(history_nodes_)) * step_;
  };
  return atom.mass * density_(time(earlier_node), time(earlier_node + atom.lag_index));
}

double DelayKernel::total_mass() const noexcept {
  double sum = 0.0;
  for (const auto& atom : atoms_) sum += atom.mass;
  return sum;
}

std::size_t DelayKernel::max_lag_index() const noexcept {
  std::size_t k = 0;
  for (const auto& atom : atoms_) k = std::max(k, atom.lag_index);
  return k;
}

double exponential_truncation_span(double rate, double tail_tol) {
  require(rate > 0.0, "exponential rate must be positive");
  require(tail_tol > 0.0 && tail_tol < 1.0, "tail_tol must lie in (0, 1)");
  return std::max(0.0, -std::log(rate * tail_tol) / rate);
}

namespace {

std::size_t nodes_covering(double span, double step) {
  return static_cast<std::size_t>(std::max(0.0, std::ceil(span / step - 1e-9)));
}

struct AtomBuilder {
  const TimeGrid& grid;
  std::vector<KernelAtom> atoms;
  double span = 0.0;

  void operator()(const DiracMeasure& m) {
    const std::size_t k = grid.lag_index(m.lag);
    atoms.push_back({k, 1.0});
    span = static_cast<double>(k) * grid.step();
  }

  void operator()(const ExponentialMeasure& m) {
    const double theta = exponential_truncation_span(m.rate, m.tail_tol);
    const double h = grid.step();
    const std::size_t last = nodes_covering(theta, h);
    atoms.reserve(last + 1);
    for (std::size_t k = 0; k <= last; ++k) {
      atoms.push_back({k, std::exp(-m.rate * static_cast<double>(k) * h) * h});
    }
    span = static_cast<double>(last) * h;
  }

  void operator()(const UniformMeasure& m) {
    require(m.width >= 0.0, "uniform width must be nonnegative");
    const double h = grid.step();
    const std::size_t count = nodes_covering(m.width, h);
    atoms.reserve(count);
    for (std::size_t k = 0; k < count; ++k) atoms.push_back({k, h});
    if (count > 0) {
      atoms.back().mass = m.width - static_cast<double>(count - 1) * h;
      span = static_cast<double>(count - 1) * h;
    }
  }

  void operator()(const AtomicMeasure& m) {
    std::map<std::size_t, double> merged;
    for (const auto& [lag, mass] : m.atoms) {
      require(std::isfinite(mass), "atom masses must be finite");
      merged[grid.lag_index(lag)] += mass;
    }
    for (const auto& [k, mass] : merged) {
      atoms.push_back({k, mass});
      span = std::max(span, static_cast<double>(k) * grid.step());
    }
  }
};

}  // namespace

DelayKernel discretize_measure(const MeasureSpec& spec, const TimeGrid& grid) {
  AtomBuilder builder{grid, {}, 0.0};
  std::visit(builder, spec.measure);
  std::size_t max_lag = 0;
  for (const auto& atom : builder.atoms) max_lag = std::max(max_lag, atom.lag_index);
  if (max_lag > std::min(grid.history_nodes(), grid.future_nodes())) {
    fail(ErrorCode::tail_too_wide,
         "kernel span " + std::to_string(static_cast<double>(max_lag) * grid.step()) +
             " exceeds the grid extension");
  }
  return DelayKernel(grid, std::move(builder.atoms), spec.density, builder.span);
}

namespace {

void check_same_kernel_grid(const DelayKernel& kernel, const PathEnsemble& x) {
  if (!kernel.empty()) {
    require(std::abs(kernel.step() - x.grid().step()) <= 1e-15 * x.grid().step(),
            "kernel and ensemble live on different grids");
  }
}

}  // namespace

std::vector<double> delay_apply_weighted(const DelayKernel& kernel, const PathEnsemble& x,
                                         const PathEnsemble& multiplier, std::size_t node) {
  check_same_kernel_grid(kernel, x);
  const std::size_t n_paths = x.n_paths();
  std::vector<double> out(n_paths, 0.0);
  const auto& atoms = kernel.atoms();
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (atoms[j].lag_index > node) {
      fail(ErrorCode::index_underflow, "delay reaches before the first history node");
    }
    const std::size_t src = node - atoms[j].lag_index;
    const double w = kernel.weight(j, src);
    if (w == 0.0) continue;
    const auto xs = x.at_node(src);
    const auto ms = multiplier.at_node(src);
    for (std::size_t p = 0; p < n_paths; ++p) out[p] += w * ms[p] * xs[p];
  }
  return out;
}

std::vector<double> delay_apply(const DelayKernel& kernel, const PathEnsemble& x,
                                std::size_t node) {
  check_same_kernel_grid(kernel, x);
  const std::size_t n_paths = x.n_paths();
  std::vector<double> out(n_paths, 0.0);
  const auto& atoms = kernel.atoms();
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (atoms[j].lag_index > node) {
      fail(ErrorCode::index_underflow, "delay reaches before the first history node");
    }
    const std::size_t src = node - atoms[j].lag_index;
    const double w = kernel.weight(j, src);
    if (w == 0.0) continue;
    const auto xs = x.at_node(src);
    for (std::size_t p = 0; p < n_paths; ++p) out[p] += w * xs[p];
  }
  return out;
}

std::vector<double> anticipate_pathwise(const DelayKernel& kernel, const PathEnsemble& x,
                                        std::size_t node) {
  check_same_kernel_grid(kernel, x);
  const std::size_t n_paths = x.n_paths();
  const std::size_t nodes = x.grid().node_count();
  std::vector<double> out(n_paths, 0.0);
  const auto& atoms = kernel.atoms();
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const std::size_t dst = node + atoms[j].lag_index;
    if (dst >= nodes) {
      fail(ErrorCode::index_overflow, "anticipation reaches past the last future node");
    }
    const double w = kernel.weight(j, node);
    if (w == 0.0) continue;
    const auto xs = x.at_node(dst);
    for (std::size_t p = 0; p < n_paths; ++p) out[p] += w * xs[p];
  }
  return out;
}

std::vector<double> anticipate_apply(const DelayKernel& kernel, const PathEnsemble& x,
                                     std::size_t node, const ConditionalEstimator& estimator,
                                     const IncrementEnsemble& info) {
  const TimeGrid& grid = x.grid();
  require(!grid.is_history(node) && !grid.is_future(node),
          "conditional anticipation is defined on [0, T] only");
  const auto sums = anticipate_pathwise(kernel, x, node);
  return estimator.project(info, grid.step_of_node(node), sums);
}

PathEnsemble delay_apply_all(const DelayKernel& kernel, const PathEnsemble& x) {
  const TimeGrid& grid = x.grid();
  PathEnsemble out(grid, x.n_paths());
  for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
    const auto values = delay_apply(kernel, x, node);
    std::copy(values.begin(), values.end(), out.at_node(node).begin());
  }
  return out;
}

PathEnsemble anticipate_apply_all(const DelayKernel& kernel, const PathEnsemble& x,
                                  const ConditionalEstimator& estimator,
                                  const IncrementEnsemble& info) {
  const TimeGrid& grid = x.grid();
  PathEnsemble out(grid, x.n_paths());
  for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
    const auto values = anticipate_apply(kernel, x, node, estimator, info);
    std::copy(values.begin(), values.end(), out.at_node(node).begin());
  }
  return out;
}

PairingGap adjoint_pairing_check(const DelayKernel& kernel, const PathEnsemble& p,
                                 const PathEnsemble& x) {
  require(p.n_paths() == x.n_paths(), "pairing needs ensembles with equal path counts");
  const TimeGrid& grid = x.grid();
  const std::size_t n_paths = x.n_paths();
  double anticipated = 0.0;
  double delayed = 0.0;
  double scale = 0.0;
  for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
    const auto ant = anticipate_pathwise(kernel, x, node);
    const auto del = delay_apply(kernel, p, node);
    const auto ps = p.at_node(node);
    const auto xs = x.at_node(node);
    for (std::size_t q = 0; q < n_paths; ++q) {
      anticipated += ps[q] * ant[q];
      delayed += del[q] * xs[q];
    }
    const auto& atoms = kernel.atoms();
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const std::size_t dst = node + atoms[j].lag_index;
      const double w = std::abs(kernel.weight(j, node));
      const auto xd = x.at_node(dst);
      for (std::size_t q = 0; q < n_paths; ++q) scale += w * std::abs(ps[q] * xd[q]);
    }
  }
  const double norm = grid.step() / static_cast<double>(n_paths);
  return {(anticipated - delayed) * norm, scale * norm};
}

}  // namespace anticip
