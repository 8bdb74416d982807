#pragma once

#include "qdc/matrix.hpp"

namespace qdc {

// Square matrix kept exactly symmetric. The constructor symmetrizes
// (A + A^T)/2, so downstream spectral code never sees asymmetry noise.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& a);

  std::size_t dim() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

 private:
  Matrix m_;
};

// Eigenvalues sorted descending, eigenvectors as matching orthonormal
// columns. Ties keep the pre-sort order (stable), so results are
// reproducible run to run.
struct EigDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;
};

// Full spectral decomposition of a symmetric matrix, done by Householder
// reduction to tridiagonal form followed by the implicit-shift QL
// iteration. Throws invalid_input on non-finite entries.
EigDecomposition sym_eig(const SymMatrix& s);

inline constexpr double kDefaultPinvThreshold = 1e-10;

// S^exponent acting on the eigenspaces with eigenvalue above
// rel_threshold * lambda_max, zero on the rest. Eigenvalues in
// [-1e-10 * lambda_max, 0) are treated as roundoff and clipped to zero;
// anything more negative throws not_psd. With a negative exponent this is
// the regularized pseudo-inverse power.
SymMatrix pinv_pow(const SymMatrix& s, double exponent,
                   double rel_threshold = kDefaultPinvThreshold);

// Frobenius-nearest positive semi-definite matrix: keep the nonnegative
// part of the spectrum.
SymMatrix psd_project(const SymMatrix& s);

// (1/2) * sum |lambda_i(A - B)|.
double trace_distance(const SymMatrix& a, const SymMatrix& b);

// Cholesky solve for symmetric positive definite systems; returns false
// (leaving x untouched) when a pivot is not strictly positive.
bool solve_spd(const SymMatrix& a, const Vector& b, Vector& x);
// Multiple right-hand sides, columns of B.
bool solve_spd(const SymMatrix& a, const Matrix& b, Matrix& x);

}  // namespace qdc
