#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "qdc/baselines.hpp"
#include "qdc/rng.hpp"

using namespace qdc;

TEST_CASE("ridge separates two well-separated 1d classes") {
  Matrix x(6, 1);
  std::vector<int> y;
  const double values[6] = {-2.1, -2.0, -1.9, 1.9, 2.0, 2.1};
  for (int i = 0; i < 6; ++i) {
    x(static_cast<std::size_t>(i), 0) = values[i];
    y.push_back(i < 3 ? 1 : 2);
  }
  const Matrix w = ridge_fit(x, y, 1e-6);
  // The decision threshold sits between the class means: scores cross at 0.
  const Vector left = ridge_scores(w, {-2.0});
  const Vector right = ridge_scores(w, {2.0});
  CHECK(left[0] > left[1]);
  CHECK(right[1] > right[0]);
}

TEST_CASE("ridge weights vanish as the penalty grows") {
  Xoshiro256 rng(103);
  Matrix x(20, 3);
  std::vector<int> y;
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
    y.push_back(static_cast<int>(i % 2) + 1);
  }
  const Matrix w = ridge_fit(x, y, 1e9);
  for (std::size_t k = 0; k < w.rows(); ++k)
    for (std::size_t j = 0; j + 1 < w.cols(); ++j)  // intercept is unpenalized
      CHECK(std::fabs(w(k, j)) < 1e-6);
}

TEST_CASE("ridge closed form matches gradient descent") {
  Xoshiro256 rng(107);
  const std::size_t n = 24, p = 5;
  Matrix x(n, p);
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
    y.push_back(static_cast<int>(i % 3) + 1);
  }
  const double lambda = 0.37;
  const Matrix w = ridge_fit(x, y, lambda);

  // The oracle minimizes the same penalized objective per class column.
  Matrix x_aug(n, p + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) x_aug(i, j) = x(i, j);
    x_aug(i, p) = 1.0;
  }
  for (int k = 1; k <= 3; ++k) {
    Vector target(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) target[i] = (y[i] == k) ? 1.0 : 0.0;
    const Vector beta = oracle::ridge_gradient_descent(x_aug, target, lambda);
    for (std::size_t j = 0; j <= p; ++j)
      CHECK(w(static_cast<std::size_t>(k - 1), j) == doctest::Approx(beta[j]).epsilon(1e-6));
  }
}

TEST_CASE("ridge with zero penalty falls back to the pseudo-inverse") {
  // Duplicate columns make the normal matrix singular at lambda = 0.
  Matrix x(4, 2);
  std::vector<int> y = {1, 1, 2, 2};
  for (std::size_t i = 0; i < 4; ++i) {
    x(i, 0) = static_cast<double>(i) - 1.5;
    x(i, 1) = x(i, 0);
  }
  const Matrix w = ridge_fit(x, y, 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r)
    for (std::size_t c = 0; c < w.cols(); ++c) CHECK(std::isfinite(w(r, c)));
}

TEST_CASE("ridge cross-validation picks a sensible penalty deterministically") {
  Xoshiro256 rng(109);
  const std::size_t n = 60;
  Matrix x(n, 2);
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    const int k = static_cast<int>(i % 2) + 1;
    x(i, 0) = (k == 1 ? -1.0 : 1.0) + 0.3 * rng.next_gaussian();
    x(i, 1) = 0.3 * rng.next_gaussian();
    y.push_back(k);
  }
  const double a = ridge_cv_lambda(x, y, kRidgeLambdaGrid, 5);
  const double b = ridge_cv_lambda(x, y, kRidgeLambdaGrid, 5);
  CHECK(a == b);
  CHECK(a <= 100.0);
  CHECK(a >= 1e-4);
}

TEST_CASE("quad_feature_map matches the monomial expansion") {
  const Vector m = quad_feature_map({2.0, -1.0});
  REQUIRE(m.size() == 5);
  CHECK(m[0] == doctest::Approx(2.0));
  CHECK(m[1] == doctest::Approx(-1.0));
  CHECK(m[2] == doctest::Approx(4.0));
  CHECK(m[3] == doctest::Approx(-2.0));
  CHECK(m[4] == doctest::Approx(1.0));
}
