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

#include "anticip/smp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "anticip/error.hpp"
#include "anticip/parallel.hpp"
#include "anticip/philox.hpp"

namespace anticip {

namespace {

double at(const PathEnsemble& e, std::size_t path, std::size_t node) {
  return e(e.n_paths() == 1 ? 0 : path, node);
}

PathEnsemble widen(const PathEnsemble& e, std::size_t n_paths) {
  return e.n_paths() == n_paths ? e : e.broadcast(n_paths);
}

double call(const std::function<double(double)>& fn, double x) { return fn ? fn(x) : 0.0; }

// Conditional anticipation of x on [0, T); zero elsewhere.
PathEnsemble anticipation_interior(const DelayKernel& kernel, const PathEnsemble& x,
                                   const ConditionalEstimator& estimator,
                                   const IncrementEnsemble& increments) {
  const TimeGrid& grid = x.grid();
  PathEnsemble out(grid, x.n_paths());
  if (kernel.empty()) return out;
  for (std::size_t node = grid.zero_node(); node < grid.terminal_node(); ++node) {
    const auto values = anticipate_apply(kernel, x, node, estimator, increments);
    std::copy(values.begin(), values.end(), out.at_node(node).begin());
  }
  return out;
}

Arguments arguments_at(const Trajectory& tr, std::size_t path, std::size_t node) {
  const TimeGrid& grid = tr.state.Y.grid();
  return {grid.time(node),       node, path, tr.state.Y(path, node), tr.Y_a(path, node),
          tr.state.Z(path, node), tr.Z_a(path, node), at(tr.v, path, node),
          at(tr.v_d, path, node)};
}

struct Increments {
  IncrementEnsemble state;
  IncrementEnsemble adjoint;
};

Increments make_increments(const ControlProblem& problem, const SolveSettings& settings) {
  require(settings.state_paths >= 1 && settings.adjoint_paths >= 1, "path counts must be positive");
  require(settings.state_paths == 1 || settings.state_paths == settings.adjoint_paths,
          "state paths must be 1 or equal to adjoint paths");
  auto state = brownian_increments(problem.grid, settings.state_paths, settings.seed);
  if (settings.adjoint_paths == settings.state_paths) return {state, state};
  return {state, brownian_increments(problem.grid, settings.adjoint_paths, settings.seed)};
}

}  // namespace

PathEnsemble discrete_adjoint(const ControlProblem& problem, const Linearization& lin,
                              const IncrementEnsemble& increments) {
  const TimeGrid& grid = problem.grid;
  const std::size_t n = increments.n_paths();
  require(lin.f_y.n_paths() == 1 || lin.f_y.n_paths() == n, "linearization path count mismatch");
  const double h = grid.step();
  const PathEnsemble l_ya = delay_apply_all(problem.kernel_y, widen(lin.l_ya, n));
  const PathEnsemble l_za = delay_apply_all(problem.kernel_z, widen(lin.l_za, n));
  const auto& ky = problem.kernel_y.atoms();
  const auto& kz = problem.kernel_z.atoms();

  PathEnsemble p(grid, n);
  parallel_for(n, [&](std::size_t q) {
    // sum over atoms of weight * coefficient * p at node - lag, lag-0 atoms split off
    const auto delayed = [&](const DelayKernel& kernel, const std::vector<KernelAtom>& atoms,
                             const PathEnsemble& coef, std::size_t node, double& implicit) {
      double sum = 0.0;
      implicit = 0.0;
      for (std::size_t a = 0; a < atoms.size(); ++a) {
        const std::size_t lag = atoms[a].lag_index;
        if (lag > node) continue;
        const double w = kernel.weight(a, node - lag) * at(coef, q, node - lag);
        if (lag == 0) {
          implicit += w;
        } else {
          sum += w * p(q, node - lag);
        }
      }
      return sum;
    };
    double previous = -lin.gamma_y;
    double implicit = 0.0;
    for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
      double base = previous;
      if (node > grid.zero_node()) {
        const std::size_t prev = node - 1;
        const double dw = increments.increment(q, grid.step_of_node(prev));
        const double zd = delayed(problem.kernel_z, kz, lin.f_za, prev, implicit);
        const double diffusion = at(lin.f_z, q, prev) * previous + zd + implicit * previous -
                                 at(lin.l_z, q, prev) - l_za(q, prev);
        base += h * at(lin.f_y, q, prev) * previous + diffusion * dw;
      }
      const double yd = delayed(problem.kernel_y, ky, lin.f_ya, node, implicit);
      const double value = (base + h * (yd - at(lin.l_y, q, node) - l_ya(q, node))) /
                           (1.0 - h * implicit);
      if (!std::isfinite(value)) {
        fail(ErrorCode::non_finite, "discrete adjoint left the finite range");
      }
      p(q, node) = value;
      previous = value;
    }
  });
  return p;
}

namespace {

Evaluation evaluate_with(const ControlProblem& problem, const PathEnsemble& u,
                         const Increments& incs, const SolveSettings& settings) {
  Trajectory trajectory = solve_state(problem, u, incs.state, settings);
  Linearization lin = linearize(problem, trajectory);
  PathEnsemble p = discrete_adjoint(problem, lin, incs.adjoint);
  PathEnsemble G = stationarity_process(problem, lin, p, incs.adjoint, settings.estimator);
  const double cost = cost_functional(problem, trajectory);
  return {std::move(trajectory), std::move(lin), std::move(p), std::move(G), cost};
}

PathEnsemble shifted(const PathEnsemble& u, const PathEnsemble& d, double eps) {
  const std::size_t n = std::max(u.n_paths(), d.n_paths());
  PathEnsemble out = widen(u, n);
  const TimeGrid& grid = u.grid();
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    for (std::size_t q = 0; q < n; ++q) out(q, node) += eps * at(d, q, node);
  }
  return out;
}

double pairing_of(const PathEnsemble& G, const PathEnsemble& d) {
  const TimeGrid& grid = G.grid();
  const std::size_t n = std::max(G.n_paths(), d.n_paths());
  double sum = 0.0;
  for (std::size_t node = grid.zero_node(); node < grid.terminal_node(); ++node) {
    for (std::size_t q = 0; q < n; ++q) sum += at(G, q, node) * at(d, q, node);
  }
  return sum * grid.step() / static_cast<double>(n);
}

GradientCheck gradient_with(const ControlProblem& problem, const Evaluation& base,
                            const PathEnsemble& u, const PathEnsemble& direction, double eps,
                            const Increments& incs, const SolveSettings& settings) {
  require(eps > 0.0, "gradient step must be positive");
  const TimeGrid& grid = problem.grid;
  for (std::size_t node = 0; node < grid.zero_node(); ++node) {
    for (std::size_t q = 0; q < direction.n_paths(); ++q) {
      require(direction(q, node) == 0.0, "direction must vanish on history nodes");
    }
  }
  const PathEnsemble moved = shifted(u, direction, eps);
  for (std::size_t node = grid.zero_node(); node < grid.terminal_node(); ++node) {
    for (std::size_t q = 0; q < moved.n_paths(); ++q) {
      require(problem.box.contains(moved(q, node)), "perturbed control leaves the admissible box");
    }
  }
  const double moved_cost =
      cost_functional(problem, solve_state(problem, moved, incs.state, settings));
  GradientCheck out;
  out.fd = (moved_cost - base.cost) / eps;
  out.pairing = pairing_of(base.G, direction);
  const double denom = std::max({std::abs(out.fd), std::abs(out.pairing), 1e-14});
  out.rel_error = std::abs(out.fd - out.pairing) / denom;
  return out;
}

}  // namespace

double hamiltonian(const ControlProblem& problem, const Arguments& args, double p) {
  return problem.l(args) - p * problem.f(args);
}

Partials hamiltonian_partials(const ControlProblem& problem, const Arguments& args, double p) {
  const Partials l = problem.l_partials(args);
  const Partials f = problem.f_partials(args);
  return {l.y - p * f.y,     l.y_a - p * f.y_a, l.z - p * f.z,
          l.z_a - p * f.z_a, l.v - p * f.v,     l.v_d - p * f.v_d};
}

PartialsReport verify_partials(const ControlProblem& problem, std::uint64_t seed,
                               std::size_t n_probes) {
  const TimeGrid& grid = problem.grid;
  const auto control_sample = [&](double u) {
    const auto& box = problem.box;
    if (std::isfinite(box.lo) && std::isfinite(box.hi)) {
      const double pad = 0.1 * (box.hi - box.lo);
      return box.lo + pad + u * (box.hi - box.lo - 2.0 * pad);
    }
    if (std::isfinite(box.lo)) return box.lo + 0.25 + u;
    if (std::isfinite(box.hi)) return box.hi - 0.25 - u;
    return 2.0 * u - 1.0;
  };
  double worst = 0.0;
  for (std::size_t k = 0; k < n_probes; ++k) {
    double u[8];
    for (std::uint64_t m = 0; m < 4; ++m) {
      const auto pair = counter_uniforms(seed, Stream::probe, k, m);
      u[2 * m] = pair[0];
      u[2 * m + 1] = pair[1];
    }
    const std::size_t step = std::min(grid.n_steps() - 1,
                                      static_cast<std::size_t>(u[0] * static_cast<double>(grid.n_steps())));
    const std::size_t node = grid.node_of_step(step);
    Arguments args{grid.time(node), node,           0, 2.0 * u[1] - 1.0, 2.0 * u[2] - 1.0,
                   2.0 * u[3] - 1.0, 2.0 * u[4] - 1.0, control_sample(u[5]), control_sample(u[6])};
    for (int which = 0; which < 2; ++which) {
      const Generator& fn = which == 0 ? problem.f : problem.l;
      const Partials declared = which == 0 ? problem.f_partials(args) : problem.l_partials(args);
      double Arguments::*fields[6] = {&Arguments::y, &Arguments::y_a, &Arguments::z,
                                      &Arguments::z_a, &Arguments::v, &Arguments::v_d};
      const double values[6] = {declared.y, declared.y_a, declared.z,
                                declared.z_a, declared.v, declared.v_d};
      for (int i = 0; i < 6; ++i) {
        Arguments hi = args;
        Arguments lo = args;
        const double step_size = 1e-6 * std::max(1.0, std::abs(args.*fields[i]));
        hi.*fields[i] += step_size;
        lo.*fields[i] -= step_size;
        const double fd = (fn(hi) - fn(lo)) / (2.0 * step_size);
        worst = std::max(worst, std::abs(fd - values[i]) / std::max(1.0, std::abs(values[i])));
      }
    }
  }
  return {worst, worst <= 1e-4};
}

PathEnsemble control_path(const ControlProblem& problem, const std::function<double(double)>& fn) {
  const TimeGrid& grid = problem.grid;
  PathEnsemble v(grid, 1);
  for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
    v(0, node) = fn(grid.time(node));
  }
  for (std::size_t node = 0; node < grid.zero_node(); ++node) {
    v(0, node) = call(problem.initial_control, grid.time(node));
  }
  return v;
}

BackwardProblem state_problem(const ControlProblem& problem, const PathEnsemble& v) {
  require(v.grid() == problem.grid, "control lives on a different grid");
  BackwardProblem bp;
  bp.generator = problem.f;
  bp.terminal_y = problem.terminal_y;
  bp.terminal_z = problem.terminal_z;
  bp.kernel_y = problem.kernel_y;
  bp.kernel_z = problem.kernel_z;
  bp.control = v;
  bp.delayed_control = problem.kernel_v.empty() ? PathEnsemble(problem.grid, 1)
                                                : delay_apply_all(problem.kernel_v, v);
  bp.lipschitz = problem.lipschitz;
  return bp;
}

Trajectory solve_state(const ControlProblem& problem, const PathEnsemble& v,
                       const IncrementEnsemble& increments, const SolveSettings& settings) {
  require(v.n_paths() == 1 || v.n_paths() == increments.n_paths(),
          "control path count must be 1 or match the increments");
  BackwardProblem bp = state_problem(problem, v);
  PicardResult solved = picard_solve(bp, increments, settings.estimator, settings.picard_tol,
                                     settings.picard_max_iter);
  PathEnsemble y_a =
      anticipation_interior(problem.kernel_y, solved.state.Y, settings.estimator, increments);
  PathEnsemble z_a =
      anticipation_interior(problem.kernel_z, solved.state.Z, settings.estimator, increments);
  return {std::move(solved.state), std::move(y_a),           std::move(z_a),
          v,                       *bp.delayed_control,      solved.iterations,
          std::move(solved.residuals)};
}

double cost_functional(const ControlProblem& problem, const Trajectory& trajectory) {
  const TimeGrid& grid = problem.grid;
  const std::size_t n = trajectory.state.Y.n_paths();
  const double h = grid.step();
  double total = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    double running = 0.0;
    for (std::size_t node = grid.zero_node(); node < grid.terminal_node(); ++node) {
      running += problem.l(arguments_at(trajectory, q, node)) * h;
    }
    total += running + problem.gamma(trajectory.state.Y(q, grid.zero_node()));
  }
  return total / static_cast<double>(n);
}

double cost_functional(const ControlProblem& problem, const PathEnsemble& v,
                       const IncrementEnsemble& increments, const SolveSettings& settings) {
  return cost_functional(problem, solve_state(problem, v, increments, settings));
}

Linearization linearize(const ControlProblem& problem, const Trajectory& trajectory) {
  const TimeGrid& grid = problem.grid;
  const std::size_t n = trajectory.state.Y.n_paths();
  const PathEnsemble zero(grid, n);
  Linearization lin{zero, zero, zero, zero, zero, zero, zero, zero, zero, zero, zero, zero, 0.0};
  for (std::size_t node = grid.zero_node(); node < grid.terminal_node(); ++node) {
    for (std::size_t q = 0; q < n; ++q) {
      const Arguments args = arguments_at(trajectory, q, node);
      const Partials f = problem.f_partials(args);
      const Partials l = problem.l_partials(args);
      lin.f_y(q, node) = f.y;
      lin.f_ya(q, node) = f.y_a;
      lin.f_z(q, node) = f.z;
      lin.f_za(q, node) = f.z_a;
      lin.f_v(q, node) = f.v;
      lin.f_vd(q, node) = f.v_d;
      lin.l_y(q, node) = l.y;
      lin.l_ya(q, node) = l.y_a;
      lin.l_z(q, node) = l.z;
      lin.l_za(q, node) = l.z_a;
      lin.l_v(q, node) = l.v;
      lin.l_vd(q, node) = l.v_d;
    }
  }
  lin.gamma_y = problem.gamma_y(trajectory.state.Y.mean(grid.zero_node()));
  return lin;
}

ForwardProblem assemble_adjoint(const ControlProblem& problem, const Linearization& lin) {
  struct Tables {
    Linearization lin;
    PathEnsemble delayed_l_ya;
    PathEnsemble delayed_l_za;
  };
  auto tables = std::make_shared<const Tables>(
      Tables{lin, delay_apply_all(problem.kernel_y, lin.l_ya),
             delay_apply_all(problem.kernel_z, lin.l_za)});
  ForwardProblem fp;
  fp.drift = [tables](const ForwardState& s) {
    const auto& L = tables->lin;
    return at(L.f_y, s.path, s.node) * s.x + s.delayed[0] - at(L.l_y, s.path, s.node) -
           at(tables->delayed_l_ya, s.path, s.node);
  };
  fp.diffusion = [tables](const ForwardState& s) {
    const auto& L = tables->lin;
    return at(L.f_z, s.path, s.node) * s.x + s.delayed[1] - at(L.l_z, s.path, s.node) -
           at(tables->delayed_l_za, s.path, s.node);
  };
  fp.channels.push_back({problem.kernel_y, lin.f_ya});
  fp.channels.push_back({problem.kernel_z, lin.f_za});
  fp.initial_value = -lin.gamma_y;
  fp.lipschitz = problem.lipschitz;
  return fp;
}

PathEnsemble stationarity_process(const ControlProblem& problem, const Linearization& lin,
                                  const PathEnsemble& p, const IncrementEnsemble& increments,
                                  const ConditionalEstimator& estimator) {
  const TimeGrid& grid = problem.grid;
  const std::size_t n = p.n_paths();
  require(increments.n_paths() == n, "adjoint and increments path counts differ");
  require(lin.f_v.n_paths() == 1 || lin.f_v.n_paths() == n, "linearization path count mismatch");

  PathEnsemble h_vd(grid, n);
  for (std::size_t node = grid.zero_node(); node < grid.terminal_node(); ++node) {
    for (std::size_t q = 0; q < n; ++q) {
      h_vd(q, node) = at(lin.l_vd, q, node) - p(q, node) * at(lin.f_vd, q, node);
    }
  }
  if (problem.extension == AdjointExtension::hold_terminal) {
    const std::size_t last = grid.terminal_node() - 1;
    for (std::size_t node = grid.terminal_node(); node < grid.node_count(); ++node) {
      for (std::size_t q = 0; q < n; ++q) {
        h_vd(q, node) =
            at(lin.l_vd, q, last) - p(q, grid.terminal_node()) * at(lin.f_vd, q, last);
      }
    }
  }
  PathEnsemble G = anticipation_interior(problem.kernel_v, h_vd, estimator, increments);
  for (std::size_t node = grid.zero_node(); node < grid.terminal_node(); ++node) {
    for (std::size_t q = 0; q < n; ++q) {
      G(q, node) += at(lin.l_v, q, node) - p(q, node) * at(lin.f_v, q, node);
    }
  }
  return G;
}

double check_stationarity(const PathEnsemble& G, const PathEnsemble& u, const ControlBox& box,
                          double bound_tol) {
  const TimeGrid& grid = G.grid();
  const std::size_t n = std::max(G.n_paths(), u.n_paths());
  double worst = 0.0;
  for (std::size_t node = grid.zero_node(); node < grid.terminal_node(); ++node) {
    for (std::size_t q = 0; q < n; ++q) {
      const double g = at(G, q, node);
      const double v = at(u, q, node);
      const bool at_lo = std::isfinite(box.lo) && v <= box.lo + bound_tol;
      const bool at_hi = std::isfinite(box.hi) && v >= box.hi - bound_tol;
      double violation = std::abs(g);
      if (at_lo && at_hi) {
        violation = 0.0;
      } else if (at_lo) {
        violation = std::max(0.0, -g);
      } else if (at_hi) {
        violation = std::max(0.0, g);
      }
      worst = std::max(worst, violation);
    }
  }
  return worst;
}

Evaluation evaluate(const ControlProblem& problem, const PathEnsemble& u,
                    const SolveSettings& settings) {
  return evaluate_with(problem, u, make_increments(problem, settings), settings);
}

GradientCheck gradient_check(const ControlProblem& problem, const PathEnsemble& u,
                             const PathEnsemble& direction, double eps,
                             const SolveSettings& settings) {
  const Increments incs = make_increments(problem, settings);
  const Evaluation base = evaluate_with(problem, u, incs, settings);
  return gradient_with(problem, base, u, direction, eps, incs, settings);
}

BackwardProblem variational_problem(const ControlProblem& problem, const Linearization& lin,
                                    const PathEnsemble& direction) {
  auto table = std::make_shared<const Linearization>(lin);
  BackwardProblem bp;
  bp.generator = [table](const Arguments& a) {
    const auto& L = *table;
    const std::size_t q = a.path;
    const std::size_t i = a.node;
    return at(L.f_y, q, i) * a.y + at(L.f_ya, q, i) * a.y_a + at(L.f_z, q, i) * a.z +
           at(L.f_za, q, i) * a.z_a + at(L.f_v, q, i) * a.v + at(L.f_vd, q, i) * a.v_d;
  };
  bp.kernel_y = problem.kernel_y;
  bp.kernel_z = problem.kernel_z;
  bp.control = direction;
  bp.delayed_control = problem.kernel_v.empty() ? PathEnsemble(problem.grid, 1)
                                                : delay_apply_all(problem.kernel_v, direction);
  bp.lipschitz = problem.lipschitz;
  return bp;
}

PairingGap duality_check(const ControlProblem& problem, const Linearization& lin,
                         const PathEnsemble& p, const PathEnsemble& y_hat,
                         const PathEnsemble& z_hat) {
  const TimeGrid& grid = problem.grid;
  const std::size_t n = std::max({p.n_paths(), y_hat.n_paths(), z_hat.n_paths()});
  const PathEnsemble ys = widen(y_hat, n);
  const PathEnsemble zs = widen(z_hat, n);
  PathEnsemble fp_y(grid, n);
  PathEnsemble fp_z(grid, n);
  PathEnsemble ly(grid, n);
  PathEnsemble lz(grid, n);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    for (std::size_t q = 0; q < n; ++q) {
      const double pq = at(p, q, node);
      fp_y(q, node) = at(lin.f_ya, q, node) * pq;
      fp_z(q, node) = at(lin.f_za, q, node) * pq;
      ly(q, node) = at(lin.l_ya, q, node);
      lz(q, node) = at(lin.l_za, q, node);
    }
  }
  PairingGap total;
  for (const PairingGap& g : {adjoint_pairing_check(problem.kernel_y, fp_y, ys),
                              adjoint_pairing_check(problem.kernel_z, fp_z, zs),
                              adjoint_pairing_check(problem.kernel_y, ly, ys),
                              adjoint_pairing_check(problem.kernel_z, lz, zs)}) {
    total.gap += g.gap;
    total.scale += g.scale;
  }
  return total;
}

PathEnsemble fourier_perturbation(const TimeGrid& grid, double magnitude, std::uint64_t seed,
                                  std::size_t index) {
  constexpr std::size_t modes = 4;
  double cos_coef[modes];
  double sin_coef[modes];
  for (std::size_t m = 0; m < modes; ++m) {
    const auto pair = counter_uniforms(seed, Stream::perturbation, index, m);
    cos_coef[m] = 2.0 * pair[0] - 1.0;
    sin_coef[m] = m == 0 ? 0.0 : 2.0 * pair[1] - 1.0;
  }
  PathEnsemble d(grid, 1);
  const double T = grid.horizon();
  double sup = 0.0;
  for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
    const double x = std::numbers::pi * grid.time(node) / T;
    double g = 0.0;
    for (std::size_t m = 0; m < modes; ++m) {
      const double k = static_cast<double>(m);
      g += cos_coef[m] * std::cos(k * x) + sin_coef[m] * std::sin(k * x);
    }
    d(0, node) = g;
    sup = std::max(sup, std::abs(g));
  }
  const double scale = sup > 0.0 ? magnitude / sup : 0.0;
  for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
    d(0, node) *= scale;
  }
  return d;
}

std::vector<ProbeResult> sufficiency_probe(const ControlProblem& problem,
                                           const PathEnsemble& u_star,
                                           std::size_t n_perturbations, double magnitude,
                                           std::uint64_t seed, const SolveSettings& settings) {
  require(magnitude >= 0.0, "perturbation magnitude must be nonnegative");
  const Increments incs = make_increments(problem, settings);
  const double base = cost_functional(problem, u_star, incs.state, settings);
  const TimeGrid& grid = problem.grid;
  std::vector<ProbeResult> out;
  out.reserve(n_perturbations);
  for (std::size_t k = 0; k < n_perturbations; ++k) {
    const PathEnsemble d = fourier_perturbation(grid, magnitude, seed, k);
    PathEnsemble moved = u_star;
    for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
      for (std::size_t q = 0; q < moved.n_paths(); ++q) {
        moved(q, node) = problem.box.clip(moved(q, node) + d(0, node));
      }
    }
    out.push_back({base, cost_functional(problem, moved, incs.state, settings)});
  }
  return out;
}

SmpReport evaluate_smp(const ControlProblem& problem, const PathEnsemble& u,
                       const SolveSettings& settings, double eps) {
  const Increments incs = make_increments(problem, settings);
  Evaluation ev = evaluate_with(problem, u, incs, settings);
  const TimeGrid& grid = problem.grid;

  // unit direction, pointing into the box where +1 would leave it
  PathEnsemble direction(grid, u.n_paths());
  for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
    for (std::size_t q = 0; q < u.n_paths(); ++q) {
      direction(q, node) = problem.box.contains(u(q, node) + eps) ? 1.0 : -1.0;
    }
  }

  SmpReport report{ev.cost, ev.G, ev.p, ev.trajectory, 0.0, 0.0, {}, ev.trajectory.iterations};
  report.max_violation = check_stationarity(ev.G, u, problem.box);
  report.gradient = gradient_with(problem, ev, u, direction, eps, incs, settings);
  const PicardResult variation =
      picard_solve(variational_problem(problem, ev.linearization, direction), incs.state,
                   settings.estimator, settings.picard_tol, settings.picard_max_iter);
  report.duality_gap =
      duality_check(problem, ev.linearization, ev.p, variation.state.Y, variation.state.Z)
          .relative();
  return report;
}

}  // namespace anticip
