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
#include <limits>
#include <string>
#include <vector>

#include "anticip/estimator.hpp"
#include "anticip/grid.hpp"
#include "anticip/iabsde.hpp"
#include "anticip/isdde.hpp"
#include "anticip/kernels.hpp"

namespace anticip {

/// Partial derivatives with respect to (y, y_a, z, z_a, v, v_d).
struct Partials {
  double y = 0.0;
  double y_a = 0.0;
  double z = 0.0;
  double z_a = 0.0;
  double v = 0.0;
  double v_d = 0.0;
};

using PartialsFn = std::function<Partials(const Arguments&)>;

struct ControlBox {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double u) const noexcept { return u >= lo && u <= hi; }
  double clip(double u) const noexcept { return u < lo ? lo : (u > hi ? hi : u); }
};

/// How H_{v_d} is continued past T when anticipated by the control kernel.
/// zero: H_{v_d} = 0 from T on. hold_terminal: p(T) and the last
/// coefficients are held constant.
enum class AdjointExtension { zero, hold_terminal };

struct ControlProblem {
  std::string name;
  TimeGrid grid{1.0, 1, 0, 0};
  Generator f;
  PartialsFn f_partials;
  Generator l;
  PartialsFn l_partials;
  std::function<double(double)> gamma;
  std::function<double(double)> gamma_y;
  DelayKernel kernel_y;
  DelayKernel kernel_z;
  DelayKernel kernel_v;
  ControlBox box;
  /// Control on t < 0; empty means zero.
  std::function<double(double)> initial_control;
  std::function<double(double)> terminal_y;
  std::function<double(double)> terminal_z;
  double lipschitz = 1.0;
  bool convex = false;
  AdjointExtension extension = AdjointExtension::zero;
};

/// H = l - p f and its partials.
double hamiltonian(const ControlProblem& problem, const Arguments& args, double p);
Partials hamiltonian_partials(const ControlProblem& problem, const Arguments& args, double p);

struct PartialsReport {
  double max_rel_error = 0.0;
  bool passed = false;
};

/// Compares declared partials of f and l with central differences at random
/// probe points; passes when every error is below 1e-4 relative.
PartialsReport verify_partials(const ControlProblem& problem, std::uint64_t seed,
                               std::size_t n_probes = 32);

struct SolveSettings {
  std::size_t state_paths = 1;
  std::size_t adjoint_paths = 1;
  std::uint64_t seed = 0;
  ConditionalEstimator estimator = ConditionalEstimator::deterministic();
  double picard_tol = 1e-12;
  std::size_t picard_max_iter = 60;
};

/// Control path on the problem grid: interior values from fn, history from
/// the initial control.
PathEnsemble control_path(const ControlProblem& problem, const std::function<double(double)>& fn);

struct Trajectory {
  StatePair state;
  PathEnsemble Y_a;
  PathEnsemble Z_a;
  PathEnsemble v;
  PathEnsemble v_d;
  std::size_t iterations = 0;
  std::vector<double> residuals;
};

BackwardProblem state_problem(const ControlProblem& problem, const PathEnsemble& v);

Trajectory solve_state(const ControlProblem& problem, const PathEnsemble& v,
                       const IncrementEnsemble& increments, const SolveSettings& settings);

/// J = E[sum_i l(t_i, ...) h + gamma(Y(0))].
double cost_functional(const ControlProblem& problem, const Trajectory& trajectory);
double cost_functional(const ControlProblem& problem, const PathEnsemble& v,
                       const IncrementEnsemble& increments, const SolveSettings& settings);

/// f and l partials along a trajectory on [0, T); zero elsewhere.
struct Linearization {
  PathEnsemble f_y, f_ya, f_z, f_za, f_v, f_vd;
  PathEnsemble l_y, l_ya, l_z, l_za, l_v, l_vd;
  double gamma_y = 0.0;
};

Linearization linearize(const ControlProblem& problem, const Trajectory& trajectory);

/// dp = (f_y p + D_y[f_ya p] - l_y - D_y[l_ya]) dt
///    + (f_z p + D_z[f_za p] - l_z - D_z[l_za]) dW,
/// p(0) = -gamma_y(Y(0)), p = 0 on t < 0.
ForwardProblem assemble_adjoint(const ControlProblem& problem, const Linearization& lin);

/// G(i) = H_v(i) + E_i[sum_j w_j H_{v_d}(i + k_j)] on [0, T); zero elsewhere.
/// Adjoint of the discrete backward scheme: the drift delay sums are taken at
/// the right endpoint (implicit in the lag-0 atoms), so the stationarity
/// pairing is the exact derivative of the discrete cost.
PathEnsemble discrete_adjoint(const ControlProblem& problem, const Linearization& lin,
                              const IncrementEnsemble& increments);

PathEnsemble stationarity_process(const ControlProblem& problem, const Linearization& lin,
                                  const PathEnsemble& p, const IncrementEnsemble& increments,
                                  const ConditionalEstimator& estimator);

/// Largest violation of G (v - u) >= 0 on [0, T): |G| inside the box,
/// max(0, -G) at the lower bound, max(0, G) at the upper bound.
double check_stationarity(const PathEnsemble& G, const PathEnsemble& u, const ControlBox& box,
                          double bound_tol = 1e-12);

/// Solve state, linearize, run the adjoint and build G for one control.
struct Evaluation {
  Trajectory trajectory;
  Linearization linearization;
  PathEnsemble p;
  PathEnsemble G;
  double cost = 0.0;
};

Evaluation evaluate(const ControlProblem& problem, const PathEnsemble& u,
                    const SolveSettings& settings);

struct GradientCheck {
  double fd = 0.0;
  double pairing = 0.0;
  double rel_error = 0.0;
};

/// fd = (J(u + eps d) - J(u)) / eps on common random numbers,
/// pairing = E[sum_i G(i) d(i) h].
GradientCheck gradient_check(const ControlProblem& problem, const PathEnsemble& u,
                             const PathEnsemble& direction, double eps,
                             const SolveSettings& settings);

/// Backward problem for the first-order variation (Y^, Z^) along direction d.
BackwardProblem variational_problem(const ControlProblem& problem, const Linearization& lin,
                                    const PathEnsemble& direction);

/// Sum of the four kernel pairing differences between p and (Y^, Z^).
PairingGap duality_check(const ControlProblem& problem, const Linearization& lin,
                         const PathEnsemble& p, const PathEnsemble& y_hat,
                         const PathEnsemble& z_hat);

struct ProbeResult {
  double cost_star = 0.0;
  double cost_perturbed = 0.0;
};

/// Deterministic perturbation with sup norm equal to magnitude: a short
/// random Fourier series in t, zero on history.
PathEnsemble fourier_perturbation(const TimeGrid& grid, double magnitude, std::uint64_t seed,
                                  std::size_t index);

/// J(u*) against J(clip(u* + perturbation)) for n random perturbations.
std::vector<ProbeResult> sufficiency_probe(const ControlProblem& problem,
                                           const PathEnsemble& u_star,
                                           std::size_t n_perturbations, double magnitude,
                                           std::uint64_t seed, const SolveSettings& settings);

struct SmpReport {
  double cost = 0.0;
  PathEnsemble stationarity;
  PathEnsemble p;
  Trajectory trajectory;
  double max_violation = 0.0;
  double duality_gap = 0.0;
  GradientCheck gradient;
  std::size_t picard_iterations = 0;
};

/// Full report for a candidate control. The gradient check runs along a
/// unit direction with step eps; the duality gap uses the variation along it.
SmpReport evaluate_smp(const ControlProblem& problem, const PathEnsemble& u,
                       const SolveSettings& settings, double eps = 1e-4);

}  // namespace anticip
