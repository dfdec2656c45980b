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
#include "anticip/estimator.hpp"
#include "anticip/kernels.hpp"
#include "anticip/philox.hpp"

using namespace anticip;

namespace {

PathEnsemble deterministic(const TimeGrid& g, double (*fn)(double)) {
  PathEnsemble x(g, 1);
  for (std::size_t i = 0; i < g.node_count(); ++i) x(0, i) = fn(g.time(i));
  return x;
}

// Random ensemble with p zero on history and x zero on future nodes.
void random_pair(const TimeGrid& g, std::size_t n, std::uint64_t seed, PathEnsemble& p,
                 PathEnsemble& x) {
  p = PathEnsemble(g, n);
  x = PathEnsemble(g, n);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    for (std::size_t q = 0; q < n; ++q) {
      const auto u = counter_uniforms(seed, Stream::probe, i, q);
      if (!g.is_history(i)) p(q, i) = 2.0 * u[0] - 1.0;
      if (!g.is_future(i)) x(q, i) = 2.0 * u[1] - 1.0;
    }
  }
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("dirac kernel is a single atom") {
  const double lags[] = {0.5};
  const TimeGrid g = make_grid(1.0, 10, lags, 0.5, 0.5);
  const DelayKernel k = discretize_measure({DiracMeasure{0.5}, {}}, g);
  REQUIRE(k.atoms().size() == 1);
  CHECK(k.atoms()[0].lag_index == 5);
  CHECK(k.atoms()[0].mass == 1.0);
  CHECK(k.total_bound() == 1.0);
}

TEST_CASE("exponential truncation span") {
  CHECK(exponential_truncation_span(1.0, 1e-6) == doctest::Approx(13.815510557964274).epsilon(1e-14));
  for (double rate : {0.5, 1.0, 3.0}) {
    const double span = exponential_truncation_span(rate, 1e-6);
    CHECK(std::exp(-rate * span) / rate == doctest::Approx(1e-6).epsilon(1e-10));
  }
  // a fat tail needs no truncation when lambda * tol >= 1
  CHECK(exponential_truncation_span(1e7, 1e-6) == 0.0);
}

TEST_CASE("exponential kernel wider than the grid") {
  const TimeGrid g = make_grid(1.0, 10, {}, 1.0, 1.0);
  try {
    discretize_measure({ExponentialMeasure{1.0, 1e-6}, {}}, g);
    FAIL("expected TailTooWide");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::tail_too_wide);
  }
}

TEST_CASE("uniform kernel mass is exact") {
  const TimeGrid g = make_grid(1.0, 4, {}, 1.0, 1.0);
  const DelayKernel k = discretize_measure({UniformMeasure{1.0}, {}}, g);
  CHECK(k.total_mass() == 1.0);
  const TimeGrid g3 = make_grid(0.9, 3, {}, 1.0, 1.0);
  const DelayKernel k3 = discretize_measure({UniformMeasure{1.0}, {}}, g3);
  CHECK(k3.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("delay examples") {
  const double lags[] = {0.3};
  const TimeGrid g = make_grid(1.0, 10, lags, 0.3, 0.3);
  const PathEnsemble x = deterministic(g, [](double t) { return t; });
  const DelayKernel id = discretize_measure({DiracMeasure{0.0}, {}}, g);
  const DelayKernel shift = discretize_measure({DiracMeasure{0.3}, {}}, g);
  const std::size_t node = g.zero_node() + 7;
  CHECK(delay_apply(id, x, node)[0] == doctest::Approx(0.7));
  CHECK(delay_apply(shift, x, node)[0] == doctest::Approx(0.4));
}

TEST_CASE("exponential delay of a constant") {
  const double span = exponential_truncation_span(1.0, 1e-6);
  for (double h : {0.05, 0.01}) {
    const auto n = static_cast<std::size_t>(std::lround(1.0 / h));
    const TimeGrid g = make_grid(1.0, n, {}, span, span);
    const DelayKernel k = discretize_measure({ExponentialMeasure{1.0, 1e-6}, {}}, g);
    const PathEnsemble c(g, 1, 2.0);
    const double got = delay_apply(k, c, g.zero_node())[0];
    const double exact = 2.0 * (1.0 - std::exp(-span));
    CHECK(std::abs(got - exact) <= 2.0 * h);
  }
}

TEST_CASE("left-endpoint quadrature converges at order one") {
  // int_0^inf e^{-s} sin(t - s) ds = (sin t - cos t) / 2
  const double span = exponential_truncation_span(1.0, 1e-9);
  std::vector<double> errs;
  for (std::size_t n : {20, 40, 80}) {
    const TimeGrid g = make_grid(1.0, n, {}, span, span);
    const DelayKernel k = discretize_measure({ExponentialMeasure{1.0, 1e-9}, {}}, g);
    const PathEnsemble x = deterministic(g, [](double t) { return std::sin(t); });
    const double got = delay_apply(k, x, g.terminal_node())[0];
    errs.push_back(std::abs(got - 0.5 * (std::sin(1.0) - std::cos(1.0))));
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(2.0).epsilon(0.1));
  CHECK(errs[1] / errs[2] == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("delay is linear and bounded") {
  const double span = exponential_truncation_span(2.0, 1e-6);
  const TimeGrid g = make_grid(1.0, 20, {}, span, span);
  const DelayKernel k = discretize_measure(
      {ExponentialMeasure{2.0, 1e-6}, [](double s, double t) { return std::cos(s - t); }}, g);
  PathEnsemble x(g, 3);
  PathEnsemble y(g, 3);
  random_pair(g, 3, 8, x, y);
  PathEnsemble combo(g, 3);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    for (std::size_t q = 0; q < 3; ++q) combo(q, i) = 2.0 * x(q, i) - 3.0 * y(q, i);
  }
  for (std::size_t node = g.zero_node(); node <= g.terminal_node(); ++node) {
    const auto a = delay_apply(k, x, node);
    const auto b = delay_apply(k, y, node);
    const auto c = delay_apply(k, combo, node);
    for (std::size_t q = 0; q < 3; ++q) {
      CHECK(c[q] == doctest::Approx(2.0 * a[q] - 3.0 * b[q]).epsilon(1e-12));
      CHECK(std::abs(a[q]) <= k.total_bound() * 1.0 + 1e-15);
    }
  }
}

TEST_CASE("weighted delay multiplies before summing") {
  const double lags[] = {0.2};
  const TimeGrid g = make_grid(1.0, 10, lags, 0.2, 0.2);
  const DelayKernel k = discretize_measure({DiracMeasure{0.2}, {}}, g);
  const PathEnsemble x = deterministic(g, [](double t) { return t; });
  const PathEnsemble m = deterministic(g, [](double t) { return t + 1.0; });
  const std::size_t node = g.zero_node() + 5;
  CHECK(delay_apply_weighted(k, x, m, node)[0] == doctest::Approx(0.3 * 1.3));
}

TEST_CASE("delay past the history is an underflow") {
  const double lags[] = {0.3};
  const TimeGrid g = make_grid(1.0, 10, lags, 0.3, 0.3);
  const TimeGrid shallow = make_grid(1.0, 10, {}, 0.1, 0.3);
  const DelayKernel k = discretize_measure({DiracMeasure{0.3}, {}}, g);
  try {
    delay_apply(k, PathEnsemble(shallow, 1), shallow.zero_node());
    FAIL("expected IndexUnderflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::index_underflow);
  }
}

TEST_CASE("anticipation of deterministic data") {
  const double lags[] = {0.3};
  const TimeGrid g = make_grid(1.0, 10, lags, 0.3, 0.3);
  const IncrementEnsemble info = brownian_increments(g, 1, 0);
  const auto est = ConditionalEstimator::poly_regression(2);
  const DelayKernel dirac = discretize_measure({DiracMeasure{0.3}, {}}, g);
  const PathEnsemble x = deterministic(g, [](double t) { return t * t; });
  const std::size_t node = g.zero_node() + 4;
  CHECK(anticipate_apply(dirac, x, node, est, info)[0] == doctest::Approx(0.49));
  const DelayKernel uni = discretize_measure({UniformMeasure{0.3}, {}}, g);
  const PathEnsemble c(g, 1, 1.5);
  CHECK(anticipate_apply(uni, c, node, est, info)[0] == doctest::Approx(1.5 * uni.total_mass()));
}

TEST_CASE("anticipation outside the horizon is rejected") {
  const double lags[] = {0.3};
  const TimeGrid g = make_grid(1.0, 10, lags, 0.3, 0.3);
  const TimeGrid short_future = make_grid(1.0, 10, {}, 0.3, 0.1);
  const DelayKernel k = discretize_measure({DiracMeasure{0.3}, {}}, g);
  const IncrementEnsemble info = brownian_increments(short_future, 1, 0);
  try {
    anticipate_apply(k, PathEnsemble(short_future, 1), short_future.terminal_node(),
                     ConditionalEstimator::deterministic(), info);
    FAIL("expected IndexOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::index_overflow);
  }
}

TEST_CASE("martingale oracle for regression anticipation") {
  const double lags[] = {0.25};
  const TimeGrid g = make_grid(1.0, 20, lags, 0.25, 0.25);
  const std::size_t n = 20000;
  const IncrementEnsemble info = brownian_increments(g, n, 17);
  PathEnsemble w(g, n);
  for (std::size_t s = 0; s <= g.n_steps(); ++s) {
    for (std::size_t q = 0; q < n; ++q) w(q, g.node_of_step(s)) = info.level(q, s);
  }
  const DelayKernel k = discretize_measure({DiracMeasure{0.25}, {}}, g);
  const std::size_t node = g.zero_node() + 10;
  const auto est = anticipate_apply(k, w, node, ConditionalEstimator::poly_regression(1), info);
  double mse = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    const double d = est[q] - info.level(q, 10);
    mse += d * d;
  }
  const double rms = std::sqrt(mse / static_cast<double>(n));
  CHECK(rms <= 5.0 * std::sqrt(0.25) * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("pairing identity holds for every kernel type") {
  const double span = exponential_truncation_span(1.5, 1e-6);
  const double lags[] = {0.3, 0.1};
  const TimeGrid g = make_grid(1.0, 20, lags, span, span);
  const Density wavy = [](double s, double t) { return 1.0 + 0.5 * std::sin(3.0 * s + t); };
  const std::vector<MeasureSpec> specs = {
      {DiracMeasure{0.3}, {}},
      {DiracMeasure{0.0}, wavy},
      {ExponentialMeasure{1.5, 1e-6}, wavy},
      {UniformMeasure{0.7}, {}},
      {AtomicMeasure{{{0.1, 0.4}, {0.3, -0.2}}}, wavy},
  };
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PathEnsemble p(g, 4);
    PathEnsemble x(g, 4);
    random_pair(g, 4, seed, p, x);
    for (const auto& spec : specs) {
      const PairingGap gap = adjoint_pairing_check(discretize_measure(spec, g), p, x);
      CHECK(gap.scale > 0.0);
      CHECK(gap.relative() <= 1e-12);
    }
  }
}

TEST_CASE("dirac pairing telescopes exactly") {
  const double lags[] = {0.2};
  const TimeGrid g = make_grid(1.0, 10, lags, 0.2, 0.2);
  PathEnsemble p(g, 1);
  PathEnsemble x(g, 1);
  for (std::size_t i = g.zero_node(); i <= g.terminal_node(); ++i) {
    p(0, i) = static_cast<double>(i);
    x(0, i) = 1.0 / static_cast<double>(i + 1);
  }
  const DelayKernel k = discretize_measure({DiracMeasure{0.2}, {}}, g);
  CHECK(adjoint_pairing_check(k, p, x).gap == 0.0);
}

TEST_CASE("pairing detects boundary violations") {
  const double lags[] = {0.3};
  const TimeGrid g = make_grid(1.0, 10, lags, 0.3, 0.3);
  PathEnsemble p(g, 2);
  PathEnsemble x(g, 2);
  random_pair(g, 2, 1, p, x);
  for (std::size_t i = g.terminal_node() + 1; i < g.node_count(); ++i) {
    x(0, i) = 1.0;
    x(1, i) = -0.5;
  }
  const DelayKernel k = discretize_measure({DiracMeasure{0.3}, {}}, g);
  CHECK(adjoint_pairing_check(k, p, x).relative() > 1e-6);
}

}
