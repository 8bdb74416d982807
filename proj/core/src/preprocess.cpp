#include "qdc/preprocess.hpp"

#include <cmath>

#include "qdc/errors.hpp"

namespace qdc {

namespace {

Vector column_means(const Matrix& x) {
  Vector mean(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* row = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += row[j];
  }
  const double inv = x.rows() ? 1.0 / static_cast<double>(x.rows()) : 0.0;
  for (double& m : mean) m *= inv;
  return mean;
}

void shift_columns(Matrix& x, const Vector& offset) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double* row = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) row[j] -= offset[j];
  }
}

void scale_columns(Matrix& x, const Vector& factor) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double* row = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) row[j] *= factor[j];
  }
}

}  // namespace

std::pair<Dataset, Dataset> center_fit_apply(const Dataset& train, const Dataset& test) {
  if (train.n_features() != test.n_features())
    throw invalid_input("center_fit_apply: feature dimension mismatch");
  const Vector mean = column_means(train.features);
  Dataset tr = train;
  Dataset te = test;
  shift_columns(tr.features, mean);
  shift_columns(te.features, mean);
  return {std::move(tr), std::move(te)};
}

std::pair<Dataset, Dataset> standardize_fit_apply(const Dataset& train, const Dataset& test) {
  if (train.n_features() != test.n_features())
    throw invalid_input("standardize_fit_apply: feature dimension mismatch");
  const std::size_t p = train.n_features();
  const Vector mean = column_means(train.features);
  Vector var(p, 0.0);
  for (std::size_t i = 0; i < train.n_samples(); ++i) {
    const double* row = train.features.row(i);
    for (std::size_t j = 0; j < p; ++j) {
      const double d = row[j] - mean[j];
      var[j] += d * d;
    }
  }
  const double inv_n = train.n_samples() ? 1.0 / static_cast<double>(train.n_samples()) : 0.0;
  Vector factor(p, 1.0);
  for (std::size_t j = 0; j < p; ++j) {
    const double sd = std::sqrt(var[j] * inv_n);
    if (sd > 1e-12) factor[j] = 1.0 / sd;  // constant columns pass through
  }
  Dataset tr = train;
  Dataset te = test;
  scale_columns(tr.features, factor);
  scale_columns(te.features, factor);
  return {std::move(tr), std::move(te)};
}

PcaModel pca_fit(const Dataset& train, std::size_t p_prime) {
  const std::size_t p = train.n_features();
  const std::size_t n = train.n_samples();
  if (p_prime < 1 || p_prime > p) throw invalid_input("pca_fit: p' outside [1, p]");
  if (n == 0) throw invalid_input("pca_fit: empty training set");

  PcaModel model;
  model.mean = column_means(train.features);

  Matrix centered = train.features;
  shift_columns(centered, model.mean);
  Matrix cov = transpose_times(centered, centered);
  cov *= 1.0 / static_cast<double>(n);

  EigDecomposition eig = sym_eig(SymMatrix(cov));
  model.components = Matrix(p, p_prime);
  for (std::size_t c = 0; c < p_prime; ++c) {
    // Sign rule: make the largest-magnitude coordinate positive,
    // smallest index winning magnitude ties.
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double a = std::fabs(eig.eigenvectors(i, c));
      if (a > best + 1e-15) {
        best = a;
        arg = i;
      }
    }
    const double sign = eig.eigenvectors(arg, c) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < p; ++i) model.components(i, c) = sign * eig.eigenvectors(i, c);
  }
  return model;
}

Vector pca_apply(const PcaModel& model, const Vector& u) {
  if (u.size() != model.mean.size()) throw invalid_input("pca_apply: dimension mismatch");
  Vector centered(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) centered[j] = u[j] - model.mean[j];
  return transpose_times(model.components, centered);
}

Dataset pca_apply(const PcaModel& model, const Dataset& d) {
  if (d.n_features() != model.mean.size()) throw invalid_input("pca_apply: dimension mismatch");
  Dataset out;
  out.labels = d.labels;
  out.class_count = d.class_count;
  out.label_map = d.label_map;
  Matrix centered = d.features;
  shift_columns(centered, model.mean);
  out.features = centered * model.components;
  return out;
}

Vector l2_normalize(const Vector& u) {
  const double n = norm2(u);
  if (!(n > 1e-300)) throw zero_vector("l2_normalize: zero vector");
  Vector x(u.size());
  const double inv = 1.0 / n;
  for (std::size_t i = 0; i < u.size(); ++i) x[i] = u[i] * inv;
  return x;
}

Vector inverse_stereographic(const Vector& u) {
  const double n2 = dot(u, u);
  const double denom = n2 + 1.0;
  Vector x(u.size() + 1);
  x[0] = (n2 - 1.0) / denom;
  for (std::size_t i = 0; i < u.size(); ++i) x[i + 1] = 2.0 * u[i] / denom;
  return x;
}

Vector poly_expand(const Vector& u) {
  const std::size_t p = u.size();
  Vector out;
  out.reserve(p + p * (p + 1) / 2);
  out.insert(out.end(), u.begin(), u.end());
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) out.push_back(u[i] * u[j]);
  return out;
}

Vector tensor_power(const Vector& x, std::size_t m, std::size_t entry_cap) {
  if (m < 1) throw invalid_input("tensor_power: m must be >= 1");
  const std::size_t q = x.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (q != 0 && total > entry_cap / q)
      throw resource_limit("tensor_power: q^m exceeds the entry cap");
    total *= q;
  }
  Vector out{1.0};
  out.reserve(total);
  for (std::size_t step = 0; step < m; ++step) {
    Vector next;
    next.reserve(out.size() * q);
    for (double a : out)
      for (double b : x) next.push_back(a * b);
    out = std::move(next);
  }
  return out;
}

DensityMatrix to_density(const Vector& x) {
  const double n = norm2(x);
  if (std::fabs(n - 1.0) > 1e-12)
    throw invalid_input("to_density: input is not unit norm");
  return DensityMatrix(SymMatrix(outer(x, x)));
}

DensityMatrix state_subspace_project(const DensityMatrix& rho, const SymMatrix& proj) {
  if (proj.dim() != rho.dim())
    throw invalid_input("state_subspace_project: dimension mismatch");
  const Matrix pp = proj.mat() * proj.mat();
  if ((pp - proj.mat()).frobenius_norm() > 1e-9)
    throw invalid_input("state_subspace_project: matrix is not an orthogonal projector");
  const double overlap = frobenius_dot(proj.mat(), rho.mat());
  if (overlap <= 1e-12)
    throw null_projection("state_subspace_project: state has no support in the subspace");
  Matrix projected = proj.mat() * rho.mat() * proj.mat();
  projected *= 1.0 / overlap;
  return DensityMatrix(SymMatrix(projected));
}

}  // namespace qdc
