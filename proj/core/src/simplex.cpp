#include <algorithm>
#include <cmath>

#include "qdc/errors.hpp"
#include "qdc/solvers.hpp"

namespace qdc {

namespace {

struct SparseColumn {
  std::vector<std::pair<std::size_t, double>> entries;  // (row, value)
};

// Gauss-Jordan inverse with partial pivoting; used for periodic
// refactorization of the basis inverse.
Matrix invert(Matrix a) {
  const std::size_t n = a.rows();
  Matrix inv = Matrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::fabs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::fabs(a(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < 1e-13) throw solver_failure("simplex: singular basis");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    }
    const double d = 1.0 / a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) *= d;
      inv(col, j) *= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

}  // namespace

BoxGapLpSolution solve_box_gap_lp(const std::vector<Vector>& class_centroids, double bound,
                                  double tol) {
  const std::size_t K = class_centroids.size();
  if (K < 2) throw invalid_input("solve_box_gap_lp: need at least two classes");
  if (!(bound > 0.0)) throw invalid_input("solve_box_gap_lp: bound must be positive");
  const std::size_t q = class_centroids.front().size();
  for (const auto& c : class_centroids)
    if (c.size() != q) throw invalid_input("solve_box_gap_lp: centroid length mismatch");

  // Standard form, after the shift beta = beta' - bound (which cancels in
  // the gap rows):
  //   maximize gamma
  //   beta'_{k,f} + box_slack = 2*bound                 (qK rows)
  //   (beta'_j - beta'_k) . c_k + gamma + gap_slack = 0 (K(K-1) rows)
  // with all variables nonnegative. gamma >= 0 loses nothing: beta = 0,
  // gamma = 0 is always feasible, so the optimum is nonnegative.
  struct Pair {
    std::size_t j, k;
  };
  std::vector<Pair> pairs;
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t j = 0; j < K; ++j)
      if (j != k) pairs.push_back({j, k});
  const std::size_t P = pairs.size();

  const std::size_t n_beta = q * K;
  const std::size_t idx_gamma = n_beta;
  const std::size_t idx_box_slack = n_beta + 1;
  const std::size_t idx_gap_slack = idx_box_slack + n_beta;
  const std::size_t n_vars = idx_gap_slack + P;
  const std::size_t m = n_beta + P;

  std::vector<SparseColumn> cols(n_vars);
  for (std::size_t l = 0; l < K; ++l) {
    for (std::size_t f = 0; f < q; ++f) {
      SparseColumn& col = cols[l * q + f];
      col.entries.emplace_back(l * q + f, 1.0);  // box row
      for (std::size_t p = 0; p < P; ++p) {
        const double ck = class_centroids[pairs[p].k][f];
        if (ck == 0.0) continue;
        if (pairs[p].j == l) col.entries.emplace_back(n_beta + p, ck);
        if (pairs[p].k == l) col.entries.emplace_back(n_beta + p, -ck);
      }
    }
  }
  for (std::size_t p = 0; p < P; ++p) cols[idx_gamma].entries.emplace_back(n_beta + p, 1.0);
  for (std::size_t i = 0; i < n_beta; ++i) cols[idx_box_slack + i].entries.emplace_back(i, 1.0);
  for (std::size_t p = 0; p < P; ++p) cols[idx_gap_slack + p].entries.emplace_back(n_beta + p, 1.0);

  Vector b(m, 0.0);
  for (std::size_t i = 0; i < n_beta; ++i) b[i] = 2.0 * bound;

  Vector c(n_vars, 0.0);
  c[idx_gamma] = 1.0;

  // Start from the all-slack basis (beta' = 0, gamma = 0).
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < n_beta; ++i) basis[i] = idx_box_slack + i;
  for (std::size_t p = 0; p < P; ++p) basis[n_beta + p] = idx_gap_slack + p;
  std::vector<char> is_basic(n_vars, 0);
  for (std::size_t i : basis) is_basic[i] = 1;

  Matrix binv = Matrix::identity(m);
  Vector xb = b;

  const double rc_tol = std::max(tol, 1e-11);
  const double pivot_tol = 1e-11;
  int iterations = 0;
  // Bland's rule terminates; the cap is a safety net against a broken basis.
  const long long iter_cap = 200000 + 200ll * static_cast<long long>(n_vars);

  Vector y(m), d(m);
  for (;;) {
    ++iterations;
    if (iterations > iter_cap)
      throw solver_failure("simplex: iteration cap exceeded");

    // y = c_B^T B^{-1}
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double cb = c[basis[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) y[j] += cb * binv(i, j);
    }

    // Bland's entering rule: the lowest-index column with a positive
    // reduced cost.
    std::size_t entering = n_vars;
    for (std::size_t jcol = 0; jcol < n_vars; ++jcol) {
      if (is_basic[jcol]) continue;
      double rc = c[jcol];
      for (const auto& [r, v] : cols[jcol].entries) rc -= y[r] * v;
      if (rc > rc_tol) {
        entering = jcol;
        break;
      }
    }
    if (entering == n_vars) break;  // optimal

    // d = B^{-1} A_entering
    std::fill(d.begin(), d.end(), 0.0);
    for (const auto& [r, v] : cols[entering].entries)
      for (std::size_t i = 0; i < m; ++i) d[i] += binv(i, r) * v;

    // Ratio test; Bland's leaving rule breaks ties by the smallest basic
    // variable index.
    std::size_t leave = m;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (d[i] <= pivot_tol) continue;
      const double ratio = xb[i] / d[i];
      if (leave == m || ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == m) throw solver_failure("simplex: unbounded direction");

    // Pivot: update x_B and the explicit inverse.
    const double step = xb[leave] / d[leave];
    for (std::size_t i = 0; i < m; ++i) xb[i] -= step * d[i];
    xb[leave] = step;

    const double inv_piv = 1.0 / d[leave];
    for (std::size_t j = 0; j < m; ++j) binv(leave, j) *= inv_piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = d[i];
      if (f == 0.0) continue;
      const double* lr = binv.row(leave);
      double* ir = binv.row(i);
      for (std::size_t j = 0; j < m; ++j) ir[j] -= f * lr[j];
    }

    is_basic[basis[leave]] = 0;
    is_basic[entering] = 1;
    basis[leave] = entering;

    // Periodic refactorization keeps the explicit inverse honest.
    if (iterations % 512 == 0) {
      Matrix bmat(m, m, 0.0);
      for (std::size_t i = 0; i < m; ++i)
        for (const auto& [r, v] : cols[basis[i]].entries) bmat(r, i) = v;
      binv = invert(bmat);
      std::fill(xb.begin(), xb.end(), 0.0);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) xb[i] += binv(i, j) * b[j];
    }
  }

  // Extract the solution.
  Vector full(n_vars, 0.0);
  for (std::size_t i = 0; i < m; ++i) full[basis[i]] = std::max(0.0, xb[i]);

  BoxGapLpSolution sol;
  sol.weights.assign(K, Vector(q, 0.0));
  for (std::size_t l = 0; l < K; ++l)
    for (std::size_t f = 0; f < q; ++f) sol.weights[l][f] = full[l * q + f] - bound;
  sol.gamma = full[idx_gamma];

  // Feasibility check on the original formulation.
  double violation = 0.0;
  for (std::size_t l = 0; l < K; ++l)
    for (double w : sol.weights[l]) violation = std::max(violation, std::fabs(w) - bound);
  for (const auto& [j, k] : pairs) {
    const double lhs = dot(sol.weights[j], class_centroids[k]) + sol.gamma;
    const double rhs = dot(sol.weights[k], class_centroids[k]);
    violation = std::max(violation, lhs - rhs);
  }

  sol.report.objective_value = sol.gamma;
  sol.report.iterations = iterations;
  sol.report.primal_residual = 0.0;
  sol.report.constraint_violation = std::max(0.0, violation);
  sol.report.converged = violation <= std::max(tol, 1e-7);
  if (!sol.report.converged)
    throw solver_failure("simplex: returned point violates constraints");
  return sol;
}

}  // namespace qdc
