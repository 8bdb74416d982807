#pragma once

#include <cstddef>
#include <utility>

#include "qdc/dataset.hpp"
#include "qdc/linalg.hpp"
#include "qdc/matrix.hpp"
#include "qdc/quantum.hpp"

namespace qdc {

// Column means are learned on the training split and applied to both sides.
std::pair<Dataset, Dataset> center_fit_apply(const Dataset& train, const Dataset& test);

// Divides each column by its training-split population standard deviation.
// Columns with (near) zero variance pass through unchanged.
std::pair<Dataset, Dataset> standardize_fit_apply(const Dataset& train, const Dataset& test);

struct PcaModel {
  Vector mean;        // length p
  Matrix components;  // p x p', orthonormal columns, descending variance
  std::size_t retained() const { return components.cols(); }
};

// Principal directions of the training covariance (population 1/N
// normalization). Each component's sign is fixed so that its
// largest-magnitude coordinate is positive.
PcaModel pca_fit(const Dataset& train, std::size_t p_prime);
Dataset pca_apply(const PcaModel& model, const Dataset& d);
Vector pca_apply(const PcaModel& model, const Vector& u);

// u / |u|. Throws zero_vector when |u| vanishes.
Vector l2_normalize(const Vector& u);

// ((|u|^2-1)/(|u|^2+1), 2u/(|u|^2+1)): a total, sign-preserving embedding
// of R^p onto the unit sphere in R^(p+1).
Vector inverse_stereographic(const Vector& u);

// (u, upper-triangular products u_i u_j with i <= j, row-major), the
// distinct monomials of degree 1 and 2. Output length p + p(p+1)/2.
Vector poly_expand(const Vector& u);

inline constexpr std::size_t kDefaultTensorCap = 10'000'000;

// m-fold Kronecker power, lexicographic index order. Unit norm is
// preserved. Throws resource_limit when q^m exceeds the entry cap.
Vector tensor_power(const Vector& x, std::size_t m,
                    std::size_t entry_cap = kDefaultTensorCap);

// x x^T for a unit vector x.
DensityMatrix to_density(const Vector& x);

// proj * rho * proj / Tr(proj * rho). proj must be an orthogonal projector;
// throws null_projection when the overlap trace is numerically zero.
DensityMatrix state_subspace_project(const DensityMatrix& rho, const SymMatrix& proj);

}  // namespace qdc
