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

#include "anticip/examples.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anticip/error.hpp"

namespace anticip {

namespace {

double constant_zero(double) { return 0.0; }

void fill_tail(PathEnsemble& u) {
  const TimeGrid& grid = u.grid();
  for (std::size_t node = grid.terminal_node(); node < grid.node_count(); ++node) {
    for (std::size_t q = 0; q < u.n_paths(); ++q) u(q, node) = u(q, grid.terminal_node() - 1);
  }
}

struct ClimateRoots {
  double r1, r2, c1, c2;
};

ClimateRoots climate_roots(const ClimateParams& p) {
  const double disc = std::sqrt(p.lambda * p.lambda + 4.0 * p.beta);
  const double r1 = 0.5 * (-p.lambda + disc);
  const double r2 = 0.5 * (-p.lambda - disc);
  return {r1, r2, r2 / (r1 - r2), -r1 / (r1 - r2)};
}

void check_climate(const ClimateParams& p) {
  require(p.kappa > 0.0, "climate kappa must be positive");
  require(p.beta >= 0.0, "climate beta must be nonnegative");
  require(p.eta > 0.0, "climate eta must be positive");
  require(p.lambda > 0.0, "climate lambda must be positive");
  require(p.mu > 0.0, "climate mu must be positive");
  require(p.theta > 0.0, "climate theta must be positive");
  require(p.horizon > 0.0, "climate horizon must be positive");
  require(static_cast<bool>(p.R), "climate R must be set");
}

}  // namespace

double stationarity_tolerance(const ExampleSetup& setup) {
  return 10.0 * setup.problem.grid.step() * setup.scale;
}

double climate_adjoint(const ClimateParams& params, double t) {
  if (t < 0.0) return 0.0;
  const auto [r1, r2, c1, c2] = climate_roots(params);
  return c1 * std::exp(r1 * t) + c2 * std::exp(r2 * t);
}

double climate_pi(const ClimateParams& params, double t) {
  const auto [r1, r2, c1, c2] = climate_roots(params);
  const double mu = params.mu;
  const double rest = params.horizon - t;
  const auto segment = [&](double r, double c) {
    const double k = r - mu;
    const double integral = std::abs(k) < 1e-12 ? rest : std::expm1(k * rest) / k;
    return c * std::exp(r * t) * integral;
  };
  double pi = segment(r1, c1) + segment(r2, c2);
  if (params.extension == AdjointExtension::hold_terminal) {
    pi += climate_adjoint(params, params.horizon) * std::exp(-mu * rest) / mu;
  }
  return pi;
}

double climate_optimal_control(const ClimateParams& params, double t) {
  const double pi = climate_pi(params, t);
  if (!(pi < 0.0)) {
    fail(ErrorCode::sign_assumption_violated,
         "Pi(t) must be negative, got " + std::to_string(pi) + " at t = " + std::to_string(t),
         pi);
  }
  return std::log(-params.eta * pi / params.R(t)) / params.theta;
}

ExampleSetup climate_problem(const ClimateParams& params, std::size_t n_steps) {
  check_climate(params);
  const double span = std::max(exponential_truncation_span(params.lambda, params.tail_tol),
                               exponential_truncation_span(params.mu, params.tail_tol));
  const TimeGrid grid = make_grid(params.horizon, n_steps, {}, span, span);

  ControlProblem cp;
  cp.name = "climate";
  cp.grid = grid;
  cp.kernel_y = discretize_measure({ExponentialMeasure{params.lambda, params.tail_tol}, {}}, grid);
  cp.kernel_v = discretize_measure({ExponentialMeasure{params.mu, params.tail_tol}, {}}, grid);
  const double kappa = params.kappa;
  const double beta = params.beta;
  const double eta = params.eta;
  const double theta = params.theta;
  const TimeFn R = params.R;
  cp.f = [=](const Arguments& a) { return kappa + beta * a.y_a - eta * a.v_d; };
  cp.f_partials = [=](const Arguments&) { return Partials{0.0, beta, 0.0, 0.0, 0.0, -eta}; };
  cp.l = [=](const Arguments& a) { return R(a.t) / theta * std::exp(theta * a.v); };
  cp.l_partials = [=](const Arguments& a) {
    return Partials{0.0, 0.0, 0.0, 0.0, R(a.t) * std::exp(theta * a.v), 0.0};
  };
  cp.gamma = [](double y) { return y; };
  cp.gamma_y = [](double) { return 1.0; };
  cp.initial_control = constant_zero;
  const double y_bar = params.y_bar;
  cp.terminal_y = [y_bar](double) { return y_bar; };
  cp.terminal_z = constant_zero;
  cp.lipschitz = beta * cp.kernel_y.total_bound();
  cp.convex = true;
  cp.extension = params.extension;

  PathEnsemble u(grid, 1);
  double scale = 0.0;
  for (std::size_t node = grid.zero_node(); node < grid.terminal_node(); ++node) {
    const double t = grid.time(node);
    u(0, node) = climate_optimal_control(params, t);
    scale = std::max(scale, R(t) * std::exp(theta * u(0, node)));
  }
  fill_tail(u);
  return {std::move(cp), std::move(u), scale};
}

double consumption_optimal_control(const ConsumptionParams& params, double t) {
  return std::pow(params.a * std::cosh(std::sqrt(params.b) * t), -1.0 / params.rho);
}

PathEnsemble consumption_control_from_adjoint(const ConsumptionParams& params,
                                              const ControlProblem& problem,
                                              const PathEnsemble& p) {
  const TimeGrid& grid = problem.grid;
  PathEnsemble c = control_path(problem, constant_zero);
  for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
    const double base = -params.a * p.mean(node);
    if (!(base > 0.0)) {
      fail(ErrorCode::sign_assumption_violated, "consumption needs -a p > 0", base);
    }
    c(0, node) = std::pow(base, -1.0 / params.rho);
  }
  return c;
}

double consumption_state_constant_control(const ConsumptionParams& params, double c, double t) {
  const double rest = params.horizon - t;
  if (params.b == 0.0) return params.xi + params.a * c * rest;
  const double root = std::sqrt(params.b);
  return params.xi * std::cosh(root * rest) + params.a * c / root * std::sinh(root * rest);
}

ExampleSetup consumption_problem(const ConsumptionParams& params, std::size_t n_steps) {
  require(params.a > 0.0, "consumption a must be positive");
  require(params.b >= 0.0, "consumption b must be nonnegative");
  require(params.rho > 0.0 && params.rho < 1.0, "consumption rho must lie in (0, 1)");
  require(params.horizon > 0.0, "consumption horizon must be positive");
  const double T = params.horizon;
  const TimeGrid grid = make_grid(T, n_steps, {}, T, T);
  const double h = grid.step();

  ControlProblem cp;
  cp.name = "consumption";
  cp.grid = grid;
  // int_t^T Y(r) dr: uniform weights, later node restricted to [0, T)
  const Density inside = [T, h](double, double later) { return later < T - 0.5 * h ? 1.0 : 0.0; };
  cp.kernel_y = discretize_measure({UniformMeasure{T}, inside}, grid);
  const double a = params.a;
  const double b = params.b;
  const double rho = params.rho;
  cp.f = [=](const Arguments& x) { return a * x.v + b * x.y_a; };
  cp.f_partials = [=](const Arguments&) { return Partials{0.0, b, 0.0, 0.0, a, 0.0}; };
  cp.l = [=](const Arguments& x) { return -std::pow(x.v, 1.0 - rho) / (1.0 - rho); };
  cp.l_partials = [=](const Arguments& x) {
    return Partials{0.0, 0.0, 0.0, 0.0, -std::pow(x.v, -rho), 0.0};
  };
  cp.gamma = [](double y) { return y; };
  cp.gamma_y = [](double) { return 1.0; };
  cp.box = {0.0, ControlBox{}.hi};
  cp.initial_control = constant_zero;
  const double xi = params.xi;
  cp.terminal_y = [xi](double) { return xi; };
  cp.terminal_z = constant_zero;
  cp.lipschitz = b * T;
  cp.convex = true;

  PathEnsemble u = control_path(cp, [&](double t) { return consumption_optimal_control(params, t); });
  const double scale = a * std::cosh(std::sqrt(b) * T);
  return {std::move(cp), std::move(u), scale};
}

LqCoefficients lq_adjoint_coefficients(const LqParams& params) {
  return {params.A, params.B, params.C, params.D};
}

PathEnsemble lq_optimal_control(const LqParams& params, const ControlProblem& problem,
                                const PathEnsemble& p, const IncrementEnsemble& increments,
                                const ConditionalEstimator& estimator) {
  const TimeGrid& grid = problem.grid;
  const std::size_t lag = grid.lag_index(params.delay);
  const std::size_t n = p.n_paths();
  PathEnsemble u = control_path(problem, constant_zero).broadcast(n);
  for (std::size_t node = grid.zero_node(); node < grid.terminal_node(); ++node) {
    const double t = grid.time(node);
    const bool ahead = node + lag < grid.terminal_node();
    std::vector<double> future(n, 0.0);
    if (ahead) future = estimator.project(increments, grid.step_of_node(node), p.at_node(node + lag));
    const double denom = params.L(t) + (ahead ? params.Ltilde(t + params.delay) : 0.0);
    for (std::size_t q = 0; q < n; ++q) {
      const double num =
          params.E(t) * p(q, node) + (ahead ? params.F(t + params.delay) * future[q] : 0.0);
      u(q, node) = num / denom;
    }
  }
  fill_tail(u);
  return u;
}

ExampleSetup lq_problem(const LqParams& params, std::size_t n_steps) {
  require(params.delay > 0.0, "lq delay must be positive");
  require(params.horizon > 0.0, "lq horizon must be positive");
  const double lags[] = {params.delay};
  const TimeGrid grid = make_grid(params.horizon, n_steps, lags, params.delay, params.delay);

  ControlProblem cp;
  cp.name = "lq";
  cp.grid = grid;
  const MeasureSpec dirac{DiracMeasure{params.delay}, {}};
  cp.kernel_y = discretize_measure(dirac, grid);
  cp.kernel_z = discretize_measure(dirac, grid);
  cp.kernel_v = discretize_measure(dirac, grid);
  const LqParams q = params;
  cp.f = [q](const Arguments& x) {
    return q.A(x.t) * x.y + q.B(x.t) * x.y_a + q.C(x.t) * x.z + q.D(x.t) * x.z_a +
           q.E(x.t) * x.v + q.F(x.t) * x.v_d;
  };
  cp.f_partials = [q](const Arguments& x) {
    return Partials{q.A(x.t), q.B(x.t), q.C(x.t), q.D(x.t), q.E(x.t), q.F(x.t)};
  };
  cp.l = [q](const Arguments& x) {
    return 0.5 * (q.L(x.t) * x.v * x.v + q.Ltilde(x.t) * x.v_d * x.v_d);
  };
  cp.l_partials = [q](const Arguments& x) {
    return Partials{0.0, 0.0, 0.0, 0.0, q.L(x.t) * x.v, q.Ltilde(x.t) * x.v_d};
  };
  cp.gamma = [](double y) { return y; };
  cp.gamma_y = [](double) { return 1.0; };
  cp.initial_control = q.phi;
  cp.terminal_y = q.xi;
  cp.terminal_z = q.eta;
  double lip = 0.0;
  for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
    const double t = grid.time(node);
    lip = std::max({lip, std::abs(q.A(t)) + std::abs(q.B(t)), std::abs(q.C(t)) + std::abs(q.D(t))});
  }
  cp.lipschitz = lip;
  cp.convex = true;

  const IncrementEnsemble single = brownian_increments(grid, 1, 0);
  const PathEnsemble p = lq_adjoint_segments(lq_adjoint_coefficients(params), params.delay, grid,
                                             single);
  PathEnsemble u = lq_optimal_control(params, cp, p, single, ConditionalEstimator::deterministic());
  double scale = 0.0;
  for (std::size_t node = grid.zero_node(); node <= grid.terminal_node(); ++node) {
    const double t = grid.time(node);
    scale = std::max(scale, (std::abs(q.E(t)) + std::abs(q.F(t))) * std::abs(p(0, node)));
  }
  return {std::move(cp), std::move(u), scale};
}

ExampleSetup make_example(const std::string& name, std::size_t n_steps) {
  if (name == "climate") return climate_problem({}, n_steps);
  if (name == "consumption") return consumption_problem({}, n_steps);
  if (name == "lq") return lq_problem({}, n_steps);
  fail(ErrorCode::invalid_argument, "unknown example '" + name + "'");
}

}  // namespace anticip
