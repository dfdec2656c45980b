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
#include <vector>

#include "anticip/error.hpp"
#include "anticip/iabsde.hpp"
#include "random_problems.hpp"

using namespace anticip;

namespace {

BackwardProblem linear(double a, double c, double xi) {
  BackwardProblem bp;
  bp.generator = [=](const Arguments& x) { return a * x.y + c; };
  bp.terminal_y = [xi](double) { return xi; };
  return bp;
}

const auto det = ConditionalEstimator::deterministic();

}  // namespace

TEST_SUITE("iabsde") {

TEST_CASE("explicit and implicit sweeps follow their recurrences") {
  const TimeGrid g = make_grid(1.0, 16, {}, 0.0, 0.0);
  const IncrementEnsemble incs = brownian_increments(g, 1, 0);
  const BackwardProblem bp = linear(0.7, 0.3, 2.0);
  const double h = g.step();
  const auto ex = picard_solve(bp, incs, det, 1e-12, 5, BackwardScheme::explicit_y);
  const auto im = picard_solve(bp, incs, det, 1e-12, 5, BackwardScheme::implicit_y);
  double ye = 2.0;
  double yi = 2.0;
  for (std::size_t s = g.n_steps(); s-- > 0;) {
    ye = ye + h * (0.7 * ye + 0.3);
    yi = (yi + h * 0.3) / (1.0 - 0.7 * h);
    CHECK(ex.state.Y(0, g.node_of_step(s)) == doctest::Approx(ye).epsilon(1e-14));
    CHECK(im.state.Y(0, g.node_of_step(s)) == doctest::Approx(yi).epsilon(1e-13));
    CHECK(ex.state.Z(0, g.node_of_step(s)) == 0.0);
  }
}

TEST_CASE("deterministic linear solution converges at first order") {
  const double a = 0.7;
  const double c = 0.3;
  const double exact = (2.0 + c / a) * std::exp(a) - c / a;
  std::vector<double> errs;
  for (std::size_t n : {50, 100, 200, 400}) {
    const TimeGrid g = make_grid(1.0, n, {}, 0.0, 0.0);
    const auto r = picard_solve(linear(a, c, 2.0), brownian_increments(g, 1, 0), det, 1e-12, 5);
    errs.push_back(std::abs(r.state.Y(0, g.zero_node()) - exact));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    CHECK(errs[i - 1] / errs[i] == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("without anticipation one extra sweep confirms the fixed point") {
  const TimeGrid g = make_grid(1.0, 8, {}, 0.0, 0.0);
  const auto r = picard_solve(linear(0.1, 0.0, 1.0), brownian_increments(g, 1, 0), det, 1e-12, 5);
  CHECK(r.iterations == 1);
  REQUIRE(r.residuals.size() == 1);
  CHECK(r.residuals[0] == 0.0);
}

TEST_CASE("dirac anticipation resolves one segment per sweep") {
  const double b = 0.6;
  const double lags[] = {0.25};
  const TimeGrid g = make_grid(1.0, 20, lags, 0.0, 0.25);
  BackwardProblem bp;
  bp.generator = [b](const Arguments& x) { return b * x.y_a; };
  bp.terminal_y = [](double) { return 1.0; };
  bp.kernel_y = discretize_measure({DiracMeasure{0.25}, {}}, g);
  const auto r = picard_solve(bp, brownian_increments(g, 1, 0), det, 1e-14, 20);
  CHECK(r.iterations <= 5);
  CHECK(r.residuals.back() == 0.0);
  // last delay interval: Y(t) = 1 + b (T - t)
  for (std::size_t s = 15; s <= 20; ++s) {
    const std::size_t node = g.node_of_step(s);
    CHECK(r.state.Y(0, node) == doctest::Approx(1.0 + b * (1.0 - g.time(node))).epsilon(1e-13));
  }
  // one interval earlier: Y(t) = Y(0.75) + b int_t^0.75 (1 + b (0.75 - s)) ds on the grid
  const double h = g.step();
  double y = r.state.Y(0, g.node_of_step(15));
  for (std::size_t s = 15; s-- > 10;) {
    y += h * b * (1.0 + b * (1.0 - g.time(g.node_of_step(s + 5))));
    CHECK(r.state.Y(0, g.node_of_step(s)) == doctest::Approx(y).epsilon(1e-13));
  }
}

TEST_CASE("Z recovers the martingale integrand") {
  // f = W_t with zero terminal value gives Y = (T - t) W_t and Z = T - t
  const TimeGrid g = make_grid(1.0, 10, {}, 0.0, 0.0);
  const std::size_t n_paths = 20000;
  const IncrementEnsemble incs = brownian_increments(g, n_paths, 5);
  BackwardProblem bp;
  bp.generator = [&](const Arguments& x) { return incs.level(x.path, g.step_of_node(x.node)); };
  const auto r =
      picard_solve(bp, incs, ConditionalEstimator::poly_regression(2), 1e-12, 5);
  const double h = g.step();
  for (std::size_t s = 0; s < g.n_steps(); ++s) {
    const std::size_t node = g.node_of_step(s);
    const double remaining = static_cast<double>(g.n_steps() - s) * h;
    CHECK(r.state.Z.mean(node) == doctest::Approx(remaining - h).epsilon(0.03));
    double sq = 0.0;
    for (std::size_t q = 0; q < n_paths; ++q) {
      const double d = r.state.Y(q, node) - remaining * incs.level(q, s);
      sq += d * d;
    }
    CHECK(std::sqrt(sq / n_paths) < 5e-3);
  }
}

TEST_CASE("zero data gives the zero solution") {
  const auto rp = testing::random_linear_problem(3, true);
  const auto r = picard_solve(testing::random_state_problem(rp), rp.increments, rp.estimator,
                              1e-12, 60);
  for (double v : r.state.Y.raw()) CHECK(v == 0.0);
  for (double v : r.state.Z.raw()) CHECK(v == 0.0);
}

TEST_CASE("picard contracts on random problems") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto rp = testing::random_linear_problem(seed);
    const auto r = picard_solve(testing::random_state_problem(rp), rp.increments, rp.estimator,
                                1e-10, 60);
    CHECK(r.residuals.back() < 1e-10);
    CHECK(r.iterations == r.residuals.size());
    for (std::size_t k = 1; k < r.residuals.size(); ++k) {
      CHECK(r.residuals[k] <= 0.5 * r.residuals[k - 1]);
    }
  }
}

TEST_CASE("exhausted iteration budget reports the last residual") {
  const auto rp = testing::random_linear_problem(2);
  try {
    picard_solve(testing::random_state_problem(rp), rp.increments, rp.estimator, 1e-14, 2);
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_convergence);
    REQUIRE(e.value().has_value());
    CHECK(*e.value() > 1e-14);
  }
}

TEST_CASE("a priori estimate holds with the frozen constant") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto rp = testing::random_linear_problem(seed);
    const auto bp = testing::random_state_problem(rp);
    const auto r = picard_solve(bp, rp.increments, rp.estimator, 1e-12, 60);
    const auto est = apriori_estimate_check(bp, r.state);
    CHECK(est.lhs > 0.0);
    CHECK(est.rhs > 0.0);
    CHECK(est.ratio == doctest::Approx(est.lhs / est.rhs));
    CHECK(est.ratio <= 4.0);
  }
}

TEST_CASE("invalid inputs are rejected") {
  const TimeGrid g = make_grid(1.0, 8, {}, 0.0, 0.0);
  const IncrementEnsemble incs = brownian_increments(g, 2, 0);
  CHECK_THROWS_AS(picard_solve(linear(0, 0, 0), incs, det, 0.0, 5), Error);
  CHECK_THROWS_AS(picard_solve(linear(0, 0, 0), incs, det, 1e-8, 0), Error);
  BackwardProblem bp = linear(0, 0, 0);
  bp.control = PathEnsemble(g, 3);
  CHECK_THROWS_AS(picard_solve(bp, incs, det, 1e-8, 5), Error);
  CHECK_THROWS_AS(picard_solve(BackwardProblem{}, incs, det, 1e-8, 5), Error);
}

}
