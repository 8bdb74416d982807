#pragma once

#include <vector>

#include "qdc/matrix.hpp"

namespace qdc {

// One-vs-all ridge regression in closed form. An intercept column of ones
// is appended internally and excluded from the L2 penalty. The returned
// matrix is K x (p+1); the last coefficient of each row is the intercept.
// With lambda = 0 and a singular normal matrix the solve falls back to the
// spectral pseudo-inverse.
Matrix ridge_fit(const Matrix& features, const std::vector<int>& labels, double lambda);

// Class scores w_k . (x, 1).
Vector ridge_scores(const Matrix& weights, const Vector& x);

// Picks the penalty with the best mean validation balanced accuracy over
// deterministic contiguous folds; ties go to the smallest value.
double ridge_cv_lambda(const Matrix& features, const std::vector<int>& labels,
                       const Vector& grid, int folds);

inline const Vector kRidgeLambdaGrid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};

// Degree-2 monomial features (u, u_i u_j for i <= j); the data vector used
// by the squared variants of the linear baselines.
Vector quad_feature_map(const Vector& u);

}  // namespace qdc
