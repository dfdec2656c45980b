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

#include "anticip/estimator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "anticip/error.hpp"

namespace anticip {

namespace {

bool all_equal(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [&](double v) { return v == values[0]; });
}

double sample_mean(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

bool trivial_information(const IncrementEnsemble& info, std::size_t step) {
  if (step == 0) return true;
  const auto w = info.step_levels(step);
  return all_equal(w);
}

std::vector<double> regress(const IncrementEnsemble& info, std::size_t step,
                            std::span<const double> values, int degree) {
  const std::size_t n = values.size();
  const auto w = info.step_levels(step);
  const double scale = 1.0 / std::sqrt(static_cast<double>(step) * info.grid().step());
  const auto basis_size = static_cast<std::size_t>(degree) + 1;
  if (n < basis_size) {
    fail(ErrorCode::regression_singular,
         "regression needs at least degree+1 paths");
  }
  // probabilists' Hermite polynomials He_k(x), k = 0..degree
  std::vector<double> basis(n * basis_size);
  for (std::size_t p = 0; p < n; ++p) {
    const double x = w[p] * scale;
    double* row = basis.data() + p * basis_size;
    row[0] = 1.0;
    if (basis_size > 1) row[1] = x;
    for (std::size_t k = 2; k < basis_size; ++k) {
      row[k] = x * row[k - 1] - static_cast<double>(k - 1) * row[k - 2];
    }
  }
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(basis_size, basis_size);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(basis_size);
  for (std::size_t p = 0; p < n; ++p) {
    const double* row = basis.data() + p * basis_size;
    for (std::size_t a = 0; a < basis_size; ++a) {
      rhs(a) += row[a] * values[p];
      for (std::size_t b = 0; b <= a; ++b) gram(a, b) += row[a] * row[b];
    }
  }
  for (std::size_t a = 0; a < basis_size; ++a) {
    for (std::size_t b = a + 1; b < basis_size; ++b) gram(a, b) = gram(b, a);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> spectrum(gram, Eigen::EigenvaluesOnly);
  const double largest = spectrum.eigenvalues().maxCoeff();
  const double smallest = spectrum.eigenvalues().minCoeff();
  if (!(largest > 0.0) || smallest <= 1e-12 * largest) {
    fail(ErrorCode::regression_singular,
         "normal equations are rank-deficient at step " + std::to_string(step));
  }
  const Eigen::VectorXd coef = gram.ldlt().solve(rhs);
  std::vector<double> out(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double* row = basis.data() + p * basis_size;
    double v = 0.0;
    for (std::size_t a = 0; a < basis_size; ++a) v += coef(static_cast<Eigen::Index>(a)) * row[a];
    out[p] = v;
  }
  return out;
}

std::vector<double> bin_average(const IncrementEnsemble& info, std::size_t step,
                                std::span<const double> values, std::size_t bin_size) {
  const std::size_t n = values.size();
  const auto w = info.step_levels(step);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });
  std::vector<double> out(n);
  for (std::size_t begin = 0; begin < n; begin += bin_size) {
    std::size_t end = std::min(n, begin + bin_size);
    // a short trailing bin is folded into its predecessor
    if (n - end < bin_size / 2) end = n;
    double sum = 0.0;
    for (std::size_t j = begin; j < end; ++j) sum += values[order[j]];
    const double avg = sum / static_cast<double>(end - begin);
    for (std::size_t j = begin; j < end; ++j) out[order[j]] = avg;
    if (end == n) break;
  }
  return out;
}

}  // namespace

ConditionalEstimator ConditionalEstimator::poly_regression(int degree) {
  require(degree >= 0, "regression degree must be nonnegative");
  return {Kind::poly_regression, degree, 1};
}

ConditionalEstimator ConditionalEstimator::nested_mc(std::size_t inner_paths) {
  require(inner_paths >= 1, "nested_mc needs at least one inner path");
  return {Kind::nested_mc, 0, inner_paths};
}

std::vector<double> ConditionalEstimator::project(const IncrementEnsemble& info,
                                                  std::size_t step,
                                                  std::span<const double> values) const {
  require(values.size() == info.n_paths(), "estimator input must have one value per path");
  if (all_equal(values)) return {values.begin(), values.end()};
  if (kind_ == Kind::deterministic || trivial_information(info, step) ||
      (kind_ == Kind::poly_regression && degree_ == 0)) {
    return std::vector<double>(values.size(), sample_mean(values));
  }
  if (kind_ == Kind::poly_regression) return regress(info, step, values, degree_);
  return bin_average(info, step, values, inner_paths_);
}

std::vector<double> ConditionalEstimator::project_increment(
    const IncrementEnsemble& info, std::size_t step, std::span<const double> values) const {
  require(values.size() == info.n_paths(), "estimator input must have one value per path");
  if (all_equal(values)) return std::vector<double>(values.size(), 0.0);
  const auto dw = info.step_increments(step);
  std::vector<double> weighted(values.size());
  for (std::size_t p = 0; p < values.size(); ++p) weighted[p] = values[p] * dw[p];
  auto out = project(info, step, weighted);
  const double h = info.grid().step();
  for (double& v : out) v /= h;
  return out;
}

}  // namespace anticip
