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
#include <string>

#include "anticip/estimator.hpp"
#include "anticip/grid.hpp"
#include "anticip/isdde.hpp"
#include "anticip/smp.hpp"

namespace anticip {

using TimeFn = std::function<double(double)>;

/// A ready-to-run example: the control problem, its optimal control on the
/// grid and the magnitude used to scale stationarity tolerances.
struct ExampleSetup {
  ControlProblem problem;
  PathEnsemble u_star;
  double scale = 1.0;
};

/// 10 h scale.
double stationarity_tolerance(const ExampleSetup& setup);

// Climate policy: f = kappa + beta Y_a - eta u_d, l = (R/theta) e^{theta u},
// gamma(y) = y, exponential kernels with rates lambda (state) and mu (control).
struct ClimateParams {
  double kappa = 0.5;
  double beta = 0.3;
  double eta = 1.0;
  double lambda = 1.0;
  double mu = 1.0;
  double theta = 2.0;
  TimeFn R = [](double) { return 1.0; };
  double y_bar = 1.0;
  double horizon = 1.0;
  double tail_tol = 1e-6;
  AdjointExtension extension = AdjointExtension::hold_terminal;
};

/// p(t) = c1 e^{r1 t} + c2 e^{r2 t}, r = (-lambda +- sqrt(lambda^2 + 4 beta)) / 2.
double climate_adjoint(const ClimateParams& params, double t);
/// Pi(t) = int_0^inf e^{-mu s} p(t + s) ds with p continued past T per the extension.
double climate_pi(const ClimateParams& params, double t);
/// u*(t) = ln(-eta Pi(t) / R(t)) / theta. Throws SignAssumptionViolated if Pi(t) >= 0.
double climate_optimal_control(const ClimateParams& params, double t);

ExampleSetup climate_problem(const ClimateParams& params, std::size_t n_steps);

// Consumption with recursive utility: f = a c + b int_t^T Y(r) dr,
// l = -c^{1-rho} / (1-rho), c >= 0, Y(T) = xi.
struct ConsumptionParams {
  double a = 1.0;
  double b = 1.0;
  double rho = 0.5;
  double xi = 1.0;
  double horizon = 1.0;
};

/// c*(t) = (a cosh(sqrt(b) t))^{-1/rho}.
double consumption_optimal_control(const ConsumptionParams& params, double t);
/// c = (-a p)^{-1/rho} on [0, T], history from the initial control.
PathEnsemble consumption_control_from_adjoint(const ConsumptionParams& params,
                                              const ControlProblem& problem,
                                              const PathEnsemble& p);
/// State under a constant consumption rate c.
double consumption_state_constant_control(const ConsumptionParams& params, double c, double t);

ExampleSetup consumption_problem(const ConsumptionParams& params, std::size_t n_steps);

// Delayed linear-quadratic problem with Dirac kernels at delta:
// f = A Y + B Y_a + C Z + D Z_a + E v + F v_d, l = (L v^2 + Ltilde v_d^2) / 2.
struct LqParams {
  TimeFn A = [](double) { return 0.1; };
  TimeFn B = [](double) { return 0.2; };
  TimeFn C = [](double) { return 0.0; };
  TimeFn D = [](double) { return 0.0; };
  TimeFn E = [](double) { return 1.0; };
  TimeFn F = [](double) { return 0.5; };
  TimeFn L = [](double) { return 1.0; };
  TimeFn Ltilde = [](double) { return 1.0; };
  double delay = 0.25;
  TimeFn xi = [](double) { return 1.0; };
  TimeFn eta = [](double) { return 0.0; };
  TimeFn phi = [](double) { return 0.0; };
  double horizon = 1.0;
};

LqCoefficients lq_adjoint_coefficients(const LqParams& params);

/// u*(i) = (E p(i) + 1{i + m < N} F(t+delta) E_i[p(i+m)]) / (L + 1{i + m < N} Ltilde(t+delta)).
PathEnsemble lq_optimal_control(const LqParams& params, const ControlProblem& problem,
                                const PathEnsemble& p, const IncrementEnsemble& increments,
                                const ConditionalEstimator& estimator);

/// The optimal control uses the segment solution on a single path, which is
/// exact for the deterministic adjoint (C = D = 0).
ExampleSetup lq_problem(const LqParams& params, std::size_t n_steps);

/// Example by name ("climate", "consumption", "lq") with default parameters.
ExampleSetup make_example(const std::string& name, std::size_t n_steps);

}  // namespace anticip
