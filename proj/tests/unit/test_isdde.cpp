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

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "anticip/error.hpp"
#include "anticip/isdde.hpp"

using namespace anticip;

namespace {

double rms_at_terminal(const PathEnsemble& a, const PathEnsemble& b) {
  const std::size_t node = a.grid().terminal_node();
  double sum = 0.0;
  for (std::size_t q = 0; q < a.n_paths(); ++q) {
    const double d = a(q, node) - b(q, node);
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.n_paths()));
}

// The adjoint ISDDE of the LQ example as a forward problem.
ForwardProblem lq_forward(double A, double B, double C, double D, const TimeGrid& g, double delay) {
  const DelayKernel k = discretize_measure({DiracMeasure{delay}, {}}, g);
  ForwardProblem fp;
  fp.drift = [=](const ForwardState& s) { return A * s.x + B * s.delayed[0]; };
  fp.diffusion = [=](const ForwardState& s) { return C * s.x + D * s.delayed[0]; };
  fp.channels.push_back({k, std::nullopt});
  fp.initial_value = -1.0;
  return fp;
}

LqCoefficients constants(double A, double B, double C, double D) {
  return {[A](double) { return A; }, [B](double) { return B; }, [C](double) { return C; },
          [D](double) { return D; }};
}

}  // namespace

TEST_SUITE("isdde") {

TEST_CASE("zero coefficients keep the initial value") {
  const TimeGrid g = make_grid(1.0, 10, {}, 0.0, 0.0);
  const auto fp = ForwardProblem::scalar([](double, double, double) { return 0.0; },
                                         [](double, double, double) { return 0.0; }, {}, {}, 3.0);
  const PathEnsemble x = euler_maruyama(fp, g, brownian_increments(g, 4, 1));
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    for (std::size_t q = 0; q < 4; ++q) CHECK(x(q, i) == 3.0);
  }
}

TEST_CASE("exponential growth with first-order error") {
  std::vector<double> errs;
  for (std::size_t n : {100, 200, 400}) {
    const TimeGrid g = make_grid(1.0, n, {}, 0.0, 0.0);
    const auto fp =
        ForwardProblem::scalar([](double, double x, double) { return x; }, {}, {}, {}, 1.0);
    const PathEnsemble x = euler_maruyama(fp, g, brownian_increments(g, 1, 0));
    errs.push_back(std::abs(x(0, g.terminal_node()) - std::exp(1.0)));
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(errs[1] / errs[2] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("method of steps on the first delay interval") {
  const double lags[] = {0.5};
  const TimeGrid g = make_grid(1.0, 20, lags, 0.5, 0.0);
  const DelayKernel k = discretize_measure({DiracMeasure{0.5}, {}}, g);
  const auto fp = ForwardProblem::scalar([](double, double, double xd) { return xd; }, {}, k,
                                         [](double) { return 1.0; }, 1.0);
  const PathEnsemble x = euler_maruyama(fp, g, brownian_increments(g, 1, 0));
  for (std::size_t s = 0; s <= 10; ++s) {
    const std::size_t node = g.node_of_step(s);
    CHECK(x(0, node) == doctest::Approx(1.0 + g.time(node)).epsilon(1e-14));
  }
  for (std::size_t node = 0; node < g.zero_node(); ++node) CHECK(x(0, node) == 1.0);
}

TEST_CASE("zero delay reproduces the plain SDE") {
  const TimeGrid g = make_grid(1.0, 50, {}, 0.0, 0.0);
  const DelayKernel k = discretize_measure({DiracMeasure{0.0}, {}}, g);
  const auto b = [](double t, double, double xd) { return std::sin(t) - 0.5 * xd; };
  const auto s = [](double, double, double xd) { return 0.2 * xd; };
  const auto delayed = ForwardProblem::scalar(b, s, k, {}, 1.0);
  const auto plain = ForwardProblem::scalar([&](double t, double x, double) { return b(t, x, x); },
                                            [&](double t, double x, double) { return s(t, x, x); },
                                            {}, {}, 1.0);
  const IncrementEnsemble incs = brownian_increments(g, 16, 4);
  const PathEnsemble a = euler_maruyama(delayed, g, incs);
  const PathEnsemble c = euler_maruyama(plain, g, incs);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    for (std::size_t q = 0; q < 16; ++q) CHECK(a(q, i) == c(q, i));
  }
}

TEST_CASE("blow-up is reported, not clamped") {
  const TimeGrid g = make_grid(1.0, 1000, {}, 0.0, 0.0);
  const auto fp =
      ForwardProblem::scalar([](double, double x, double) { return x * x; }, {}, {}, {}, 10.0);
  try {
    euler_maruyama(fp, g, brownian_increments(g, 1, 0));
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_finite);
  }
}

TEST_CASE("euler-maruyama is independent of the worker count") {
  const double lags[] = {0.25};
  const TimeGrid g = make_grid(1.0, 40, lags, 0.25, 0.0);
  const ForwardProblem fp = lq_forward(0.1, 0.2, 0.3, 0.1, g, 0.25);
  const IncrementEnsemble incs = brownian_increments(g, 300, 12);
  setenv("ANTICIP_SMP_THREADS", "1", 1);
  const PathEnsemble one = euler_maruyama(fp, g, incs);
  setenv("ANTICIP_SMP_THREADS", "3", 1);
  const PathEnsemble three = euler_maruyama(fp, g, incs);
  unsetenv("ANTICIP_SMP_THREADS");
  CHECK(one.raw().size() == three.raw().size());
  for (std::size_t i = 0; i < one.raw().size(); ++i) CHECK(one.raw()[i] == three.raw()[i]);
}

TEST_CASE("consumption adjoint closed form") {
  const TimeGrid g = make_grid(1.0, 10, {}, 0.5, 0.0);
  const PathEnsemble flat = consumption_adjoint_closed_form(0.0, g);
  for (std::size_t i = g.zero_node(); i <= g.terminal_node(); ++i) CHECK(flat(0, i) == -1.0);
  for (std::size_t i = 0; i < g.zero_node(); ++i) CHECK(flat(0, i) == 0.0);
  const PathEnsemble p = consumption_adjoint_closed_form(1.0, g);
  CHECK(p(0, g.terminal_node()) == doctest::Approx(-1.5430806348152437).epsilon(1e-15));
}

TEST_CASE("consumption adjoint solves its integro-differential equation") {
  // (p(t+h) - p(t)) / h - b int_0^t p ds -> 0 at O(h)
  const double b = 1.0;
  std::vector<double> worst;
  for (std::size_t n : {50, 100, 200}) {
    const TimeGrid g = make_grid(1.0, n, {}, 0.0, 0.0);
    const PathEnsemble p = consumption_adjoint_closed_form(b, g);
    const double h = g.step();
    double integral = 0.0;
    double res = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t i = g.node_of_step(s);
      const double slope = (p(0, i + 1) - p(0, i)) / h;
      res = std::max(res, std::abs(slope - b * integral));
      integral += 0.5 * h * (p(0, i) + p(0, i + 1));
    }
    worst.push_back(res);
  }
  CHECK(worst[0] / worst[1] == doctest::Approx(2.0).epsilon(0.1));
  CHECK(worst[1] / worst[2] == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("segments without delay feedback are the stochastic exponential") {
  const double lags[] = {0.25};
  const TimeGrid g = make_grid(1.0, 40, lags, 0.25, 0.0);
  const IncrementEnsemble incs = brownian_increments(g, 8, 3);
  const double A = 0.4;
  const double C = 0.3;
  const PathEnsemble p = lq_adjoint_segments(constants(A, 0.0, C, 0.0), 0.25, g, incs);
  for (std::size_t s = 0; s <= g.n_steps(); ++s) {
    const double t = g.time(g.node_of_step(s));
    for (std::size_t q = 0; q < 8; ++q) {
      const double exact = -std::exp(A * t + C * incs.level(q, s) - 0.5 * C * C * t);
      CHECK(p(q, g.node_of_step(s)) == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("segments with constant delay feedback") {
  const double beta = 0.7;
  const double lags[] = {0.5};
  const TimeGrid g = make_grid(1.0, 20, lags, 0.5, 0.0);
  const PathEnsemble p =
      lq_adjoint_segments(constants(0.0, beta, 0.0, 0.0), 0.5, g, brownian_increments(g, 1, 0));
  for (std::size_t s = 0; s <= g.n_steps(); ++s) {
    const double t = g.time(g.node_of_step(s));
    const double exact = t <= 0.5 ? -1.0 : -1.0 - beta * (t - 0.5);
    CHECK(p(0, g.node_of_step(s)) == doctest::Approx(exact).epsilon(1e-13));
  }
  for (std::size_t i = 0; i < g.zero_node(); ++i) CHECK(p(0, i) == 0.0);
}

TEST_CASE("segment values do not depend on later segments") {
  const double lags[] = {0.25};
  const TimeGrid long_grid = make_grid(1.0, 40, lags, 0.25, 0.0);
  const TimeGrid short_grid = make_grid(0.5, 20, lags, 0.25, 0.0);
  const IncrementEnsemble incs = brownian_increments(long_grid, 6, 21);
  const IncrementEnsemble short_incs = brownian_increments(short_grid, 6, 21);
  const auto coef = constants(0.1, 0.2, 0.3, 0.1);
  const PathEnsemble a = lq_adjoint_segments(coef, 0.25, long_grid, incs);
  const PathEnsemble b = lq_adjoint_segments(coef, 0.25, short_grid, short_incs);
  for (std::size_t s = 0; s <= 20; ++s) {
    for (std::size_t q = 0; q < 6; ++q) {
      CHECK(a(q, long_grid.node_of_step(s)) == b(q, short_grid.node_of_step(s)));
    }
  }
}

TEST_CASE("strong convergence of euler-maruyama against the segments") {
  std::vector<double> errs;
  for (std::size_t n : {40, 80, 160, 320}) {
    const double lags[] = {0.25};
    const TimeGrid g = make_grid(1.0, n, lags, 0.25, 0.0);
    const IncrementEnsemble incs = brownian_increments(g, 4000, 77);
    const PathEnsemble em = euler_maruyama(lq_forward(0.1, 0.2, 0.3, 0.1, g, 0.25), g, incs);
    const PathEnsemble seg = lq_adjoint_segments(constants(0.1, 0.2, 0.3, 0.1), 0.25, g, incs);
    errs.push_back(rms_at_terminal(em, seg));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double factor = errs[i - 1] / errs[i];
    CHECK(factor >= 1.2);
    CHECK(factor <= 1.7);
  }
}

TEST_CASE("segment recursion rejects a misaligned or missing history") {
  const TimeGrid g = make_grid(1.0, 10, {}, 0.0, 0.0);
  const IncrementEnsemble incs = brownian_increments(g, 1, 0);
  CHECK_THROWS_AS(lq_adjoint_segments(constants(0, 0, 0, 0), 0.25, g, incs), Error);
  CHECK_THROWS_AS(lq_adjoint_segments(constants(0, 0, 0, 0), 0.0, g, incs), Error);
}

}
