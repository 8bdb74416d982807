#include "qdc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qdc/errors.hpp"

namespace qdc {

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) throw invalid_input("SymMatrix: matrix not square");
  m_ = Matrix(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
  }
}

namespace {

// Householder reduction of a symmetric matrix (stored in z) to
// tridiagonal form. On exit d holds the diagonal, e the subdiagonal
// (e[0] unused), and z the accumulated orthogonal transform.
void tridiagonalize(Matrix& z, Vector& d, Vector& e) {
  const int n = static_cast<int>(z.rows());
  for (int i = n - 1; i >= 1; --i) {
    const int l = i - 1;
    double h = 0.0;
    double scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
      if (scale == 0.0) {
        e[i] = z(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          z(i, k) /= scale;
          h += z(i, k) * z(i, k);
        }
        double f = z(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        z(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          z(j, i) = z(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
          for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
          e[j] = g / h;
          f += e[j] * z(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = z(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
        }
      }
    } else {
      e[i] = z(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  // Accumulate the transformation.
  for (int i = 0; i < n; ++i) {
    const int l = i - 1;
    if (d[i] != 0.0) {
      for (int j = 0; j <= l; ++j) {
        double g = 0.0;
        for (int k = 0; k <= l; ++k) g += z(i, k) * z(k, j);
        for (int k = 0; k <= l; ++k) z(k, j) -= g * z(k, i);
      }
    }
    d[i] = z(i, i);
    z(i, i) = 1.0;
    for (int j = 0; j <= l; ++j) {
      z(j, i) = 0.0;
      z(i, j) = 0.0;
    }
  }
}

// Implicit-shift QL iteration on the tridiagonal (d, e). zt holds the
// transformation transposed (eigenvectors as rows), so the plane
// rotations run over contiguous memory. Throws on (practically
// unreachable) non-convergence.
void ql_implicit(Vector& d, Vector& e, Matrix& zt) {
  const int n = static_cast<int>(d.size());
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= 2.3e-16 * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) throw error("sym_eig: QL iteration failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          double* lo = zt.row(i);
          double* hi = zt.row(i + 1);
          for (int k = 0; k < n; ++k) {
            f = hi[k];
            hi[k] = s * lo[k] + c * f;
            lo[k] = c * lo[k] - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

EigDecomposition sym_eig(const SymMatrix& s) {
  if (!s.mat().all_finite()) throw invalid_input("sym_eig: non-finite entries");
  const std::size_t n = s.dim();
  if (n == 0) return {{}, {}};

  Matrix z = s.mat();
  Vector d(n, 0.0);
  Vector e(n, 0.0);
  tridiagonalize(z, d, e);
  Matrix zt = z.transpose();
  ql_implicit(d, e, zt);

  // Descending eigenvalues; ties keep original index order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });

  EigDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.eigenvalues[c] = d[order[c]];
    const double* vec = zt.row(order[c]);
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, c) = vec[r];
  }
  return out;
}

namespace {

// Rebuild sum_i f(lambda_i) v_i v_i^T from a decomposition.
SymMatrix spectral_build(const EigDecomposition& eig, const Vector& fvals) {
  const std::size_t n = eig.eigenvalues.size();
  Matrix out(n, n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    const double f = fvals[c];
    if (f == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double vif = eig.eigenvectors(i, c) * f;
      if (vif == 0.0) continue;
      double* oi = out.row(i);
      for (std::size_t j = 0; j < n; ++j) oi[j] += vif * eig.eigenvectors(j, c);
    }
  }
  return SymMatrix(out);
}

}  // namespace

SymMatrix pinv_pow(const SymMatrix& s, double exponent, double rel_threshold) {
  if (rel_threshold < 0.0 || rel_threshold >= 1.0)
    throw invalid_input("pinv_pow: rel_threshold outside [0,1)");
  EigDecomposition eig = sym_eig(s);
  const std::size_t n = eig.eigenvalues.size();
  if (n == 0) return s;

  const double lambda_max = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.front();
  const double psd_tol = 1e-10 * std::max(1.0, std::fabs(lambda_max));
  const double cut = rel_threshold * std::max(lambda_max, 0.0);

  Vector fvals(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double lam = eig.eigenvalues[i];
    if (lam < -psd_tol)
      throw not_psd("pinv_pow: eigenvalue below PSD tolerance");
    if (lam < 0.0) lam = 0.0;
    if (lam > cut && lam > 0.0) fvals[i] = std::pow(lam, exponent);
  }
  return spectral_build(eig, fvals);
}

SymMatrix psd_project(const SymMatrix& s) {
  if (!s.mat().all_finite()) throw invalid_input("psd_project: non-finite entries");
  EigDecomposition eig = sym_eig(s);
  Vector fvals(eig.eigenvalues.size(), 0.0);
  bool negative = false;
  for (std::size_t i = 0; i < fvals.size(); ++i) {
    if (eig.eigenvalues[i] > 0.0)
      fvals[i] = eig.eigenvalues[i];
    else
      negative = true;
  }
  if (!negative) return s;  // already PSD
  return spectral_build(eig, fvals);
}

double trace_distance(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw invalid_input("trace_distance: dimension mismatch");
  SymMatrix diff(a.mat() - b.mat());
  EigDecomposition eig = sym_eig(diff);
  double s = 0.0;
  for (double lam : eig.eigenvalues) s += std::fabs(lam);
  return 0.5 * s;
}

namespace {

// In-place lower Cholesky; returns false on a non-positive pivot.
bool cholesky(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= a(j, k) * a(j, k);
    if (!(diag > 0.0)) return false;
    const double ljj = std::sqrt(diag);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      const double* ai = a.row(i);
      const double* aj = a.row(j);
      for (std::size_t k = 0; k < j; ++k) s -= ai[k] * aj[k];
      a(i, j) = s / ljj;
    }
  }
  return true;
}

void chol_solve_one(const Matrix& l, const double* b, double* x) {
  const std::size_t n = l.rows();
  // forward: L y = b
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    const double* li = l.row(i);
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * x[k];
    x[i] = s / li[i];
  }
  // backward: L^T x = y
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
}

}  // namespace

bool solve_spd(const SymMatrix& a, const Vector& b, Vector& x) {
  if (a.dim() != b.size()) throw invalid_input("solve_spd: dimension mismatch");
  Matrix l = a.mat();
  if (!cholesky(l)) return false;
  x.assign(b.size(), 0.0);
  chol_solve_one(l, b.data(), x.data());
  return true;
}

bool solve_spd(const SymMatrix& a, const Matrix& b, Matrix& x) {
  if (a.dim() != b.rows()) throw invalid_input("solve_spd: dimension mismatch");
  Matrix l = a.mat();
  if (!cholesky(l)) return false;
  const std::size_t n = b.rows();
  const std::size_t m = b.cols();
  x = Matrix(n, m);
  Vector col(n), sol(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
    chol_solve_one(l, col.data(), sol.data());
    for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
  }
  return true;
}

}  // namespace qdc
