#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "qdc/errors.hpp"
#include "qdc/preprocess.hpp"
#include "qdc/rng.hpp"
#include "qdc/solvers.hpp"

using namespace qdc;

namespace {

Vector random_unit(std::size_t q, Xoshiro256& rng) {
  Vector v(q);
  for (double& x : v) x = rng.next_gaussian();
  return l2_normalize(v);
}

ClassEnsemble random_ensemble(std::size_t q, std::size_t k, Xoshiro256& rng,
                              std::size_t per_class = 4) {
  std::vector<DensityMatrix> states;
  std::vector<int> labels;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t i = 0; i < per_class; ++i) {
      states.push_back(to_density(random_unit(q, rng)));
      labels.push_back(static_cast<int>(c) + 1);
    }
  return class_centroids(states, labels);
}

ClassEnsemble two_state_ensemble(const Vector& x, const Vector& y) {
  ClassEnsemble ens;
  ens.centroids.push_back(to_density(x));
  ens.centroids.push_back(to_density(y));
  ens.priors = {0.5, 0.5};
  return ens;
}

}  // namespace

TEST_CASE("sdp recovers perfect discrimination of orthogonal states") {
  ClassEnsemble ens;
  ens.centroids.push_back(to_density({1.0, 0.0, 0.0}));
  ens.centroids.push_back(to_density({0.0, 1.0, 0.0}));
  ens.centroids.push_back(to_density({0.0, 0.0, 1.0}));
  ens.priors = {1.0 / 3, 1.0 / 3, 1.0 / 3};

  PovmSdpProblem problem;
  problem.ensemble = ens;
  auto [povm, report] = solve_povm_sdp(problem);
  povm.validate();
  CHECK(report.converged);
  CHECK(report.objective_value == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("sdp reaches the two-state optimum certified by the grid oracle") {
  const double c = 0.6;
  const Vector x = {1.0, 0.0};
  const Vector y = {c, std::sqrt(1.0 - c * c)};
  PovmSdpProblem problem;
  problem.ensemble = two_state_ensemble(x, y);
  auto [povm, report] = solve_povm_sdp(problem, 1e-7);
  const double reference = oracle::helstrom_grid(x, y);
  CHECK(reference == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(report.objective_value == doctest::Approx(reference).epsilon(1e-4));
}

TEST_CASE("gap sdp on orthogonal centroids reaches gamma = 1") {
  ClassEnsemble ens;
  ens.centroids.push_back(DensityMatrix(SymMatrix(Matrix::from_rows({{1, 0}, {0, 0}}))));
  ens.centroids.push_back(DensityMatrix(SymMatrix(Matrix::from_rows({{0, 0}, {0, 1}}))));
  ens.priors = {0.5, 0.5};
  PovmSdpProblem problem;
  problem.objective = SdpObjective::MaxGap;
  problem.ensemble = ens;
  auto [povm, report] = solve_povm_sdp(problem, 1e-7);
  povm.validate();
  CHECK(report.objective_value == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("sdp rejects bad arguments") {
  PovmSdpProblem problem;
  problem.ensemble = two_state_ensemble({1.0, 0.0}, {0.0, 1.0});
  CHECK_THROWS_AS(solve_povm_sdp(problem, 1e-12), invalid_input);
  CHECK_THROWS_AS(solve_povm_sdp(problem, 1e-6, 0), invalid_input);
}

TEST_CASE("sdp objective never exceeds one and feasibility holds") {
  Xoshiro256 rng(71);
  for (int t = 0; t < 6; ++t) {
    const ClassEnsemble ens = random_ensemble(2 + rng.next_below(3), 2 + rng.next_below(2), rng);
    PovmSdpProblem problem;
    problem.ensemble = ens;
    const double tol = 1e-6;
    auto [povm, report] = solve_povm_sdp(problem, tol);
    CHECK(report.objective_value <= 1.0 + tol);
    CHECK(povm.min_element_eigenvalue() >= -tol);
    CHECK(povm.completeness_residual() <= tol);
  }
}

TEST_CASE("allowing an inconclusive outcome does not change the optimum") {
  Xoshiro256 rng(73);
  for (int t = 0; t < 4; ++t) {
    const ClassEnsemble ens = random_ensemble(2 + rng.next_below(2), 2, rng, 3);
    PovmSdpProblem eq;
    eq.ensemble = ens;
    PovmSdpProblem ineq = eq;
    ineq.completeness = SdpCompleteness::Inequality;
    const double tol = 1e-6;
    auto [povm_eq, rep_eq] = solve_povm_sdp(eq, tol);
    auto [povm_ineq, rep_ineq] = solve_povm_sdp(ineq, tol);
    CHECK(povm_ineq.mode == CompletenessMode::Subnormalized);
    CHECK(std::fabs(rep_eq.objective_value - rep_ineq.objective_value) <= 2 * tol);
  }
}

TEST_CASE("lp solves the textbook two-class instance exactly") {
  // Certified independently by vertex enumeration over the box + gap
  // polytope in (beta_1, beta_2, gamma).
  const std::vector<Vector> centroids = {{1.0, 0.0}, {0.0, 1.0}};
  const double bound = 1.0;

  std::vector<std::vector<double>> a;
  std::vector<double> b;
  // Box facets |beta| <= 1 for 4 coordinates (variables 0..3), gamma is 4.
  for (std::size_t v = 0; v < 4; ++v) {
    std::vector<double> up(5, 0.0), dn(5, 0.0);
    up[v] = 1.0;
    dn[v] = -1.0;
    a.push_back(up);
    b.push_back(bound);
    a.push_back(dn);
    b.push_back(bound);
  }
  // beta_2 . c_1 + gamma - beta_1 . c_1 <= 0  -> -b1x + b2x + g <= 0
  a.push_back({-1.0, 0.0, 1.0, 0.0, 1.0});
  b.push_back(0.0);
  // beta_1 . c_2 + gamma - beta_2 . c_2 <= 0  -> b1y - b2y + g <= 0
  a.push_back({0.0, 1.0, 0.0, -1.0, 1.0});
  b.push_back(0.0);
  const std::vector<double> objective = {0.0, 0.0, 0.0, 0.0, 1.0};
  const auto reference = oracle::lp_vertex_enumeration(a, b, objective);
  REQUIRE(reference.has_value());
  CHECK(*reference == doctest::Approx(2.0).epsilon(1e-9));

  const BoxGapLpSolution sol = solve_box_gap_lp(centroids, bound);
  CHECK(sol.gamma == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(sol.report.converged);
}

TEST_CASE("lp on identical centroids yields zero gap") {
  const std::vector<Vector> centroids = {{0.5, 0.5}, {0.5, 0.5}};
  const BoxGapLpSolution sol = solve_box_gap_lp(centroids, 1.0);
  CHECK(sol.gamma == doctest::Approx(0.0));
}

TEST_CASE("lp optimum scales linearly with the box bound") {
  Xoshiro256 rng(79);
  std::vector<Vector> centroids;
  for (int k = 0; k < 3; ++k) {
    Vector c(4);
    for (double& v : c) v = rng.uniform(-1.0, 1.0);
    centroids.push_back(std::move(c));
  }
  const BoxGapLpSolution one = solve_box_gap_lp(centroids, 1.0);
  const BoxGapLpSolution two = solve_box_gap_lp(centroids, 2.0);
  CHECK(two.gamma == doctest::Approx(2.0 * one.gamma).epsilon(1e-7));
}

TEST_CASE("lp matches vertex enumeration on random small instances") {
  Xoshiro256 rng(83);
  for (int t = 0; t < 8; ++t) {
    const std::size_t q = 2;
    std::vector<Vector> centroids(2, Vector(q));
    for (auto& c : centroids)
      for (double& v : c) v = rng.uniform(-1.0, 1.0);

    std::vector<std::vector<double>> a;
    std::vector<double> b;
    const std::size_t n_vars = q * 2 + 1;
    for (std::size_t v = 0; v < q * 2; ++v) {
      std::vector<double> up(n_vars, 0.0), dn(n_vars, 0.0);
      up[v] = 1.0;
      dn[v] = -1.0;
      a.push_back(up);
      b.push_back(1.0);
      a.push_back(dn);
      b.push_back(1.0);
    }
    for (int k = 0; k < 2; ++k) {
      const int j = 1 - k;
      std::vector<double> row(n_vars, 0.0);
      for (std::size_t f = 0; f < q; ++f) {
        row[static_cast<std::size_t>(j) * q + f] += centroids[static_cast<std::size_t>(k)][f];
        row[static_cast<std::size_t>(k) * q + f] -= centroids[static_cast<std::size_t>(k)][f];
      }
      row[q * 2] = 1.0;
      a.push_back(row);
      b.push_back(0.0);
    }
    std::vector<double> objective(n_vars, 0.0);
    objective.back() = 1.0;

    const auto reference = oracle::lp_vertex_enumeration(a, b, objective);
    REQUIRE(reference.has_value());
    const BoxGapLpSolution sol = solve_box_gap_lp(centroids, 1.0);
    CHECK(sol.gamma == doctest::Approx(*reference).epsilon(1e-7));
  }
}

TEST_CASE("lp relaxation upper-bounds the gap sdp") {
  Xoshiro256 rng(89);
  for (int t = 0; t < 3; ++t) {
    const std::size_t q = 2 + rng.next_below(2);
    const ClassEnsemble ens = random_ensemble(q, 2, rng, 3);

    PovmSdpProblem problem;
    problem.objective = SdpObjective::MaxGap;
    problem.ensemble = ens;
    auto [povm, report] = solve_povm_sdp(problem, 1e-7);

    // LP features: all q^2 entries of the centroid matrices, box bound 1.
    std::vector<Vector> lp_centroids;
    for (const auto& c : ens.centroids) {
      const Matrix& m = c.mat();
      lp_centroids.emplace_back(m.data(), m.data() + q * q);
    }
    const BoxGapLpSolution lp = solve_box_gap_lp(lp_centroids, 1.0);
    CHECK(lp.gamma >= report.objective_value - 1e-5);
  }
}

TEST_CASE("sdp refuses oversized blocks") {
  PovmSdpProblem problem;
  ClassEnsemble ens;
  Matrix big = Matrix::identity(300);
  big *= 1.0 / 300.0;
  ens.centroids.emplace_back(SymMatrix(big));
  ens.centroids.emplace_back(SymMatrix(big));
  ens.priors = {0.5, 0.5};
  problem.ensemble = ens;
  CHECK_THROWS_AS(solve_povm_sdp(problem), resource_limit);
}
