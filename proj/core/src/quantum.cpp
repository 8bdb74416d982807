#include "qdc/quantum.hpp"

#include <cmath>

#include "qdc/errors.hpp"

namespace qdc {

DensityMatrix::DensityMatrix(SymMatrix m) : m_(std::move(m)) {
  if (!m_.mat().all_finite()) throw invalid_input("DensityMatrix: non-finite entries");
  const double tr = m_.mat().trace();
  if (std::fabs(tr - 1.0) > 1e-9) throw invalid_input("DensityMatrix: trace != 1");
  EigDecomposition eig = sym_eig(m_);
  const double lmax = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.front();
  for (double lam : eig.eigenvalues)
    if (lam < -1e-10 * std::max(1.0, lmax)) throw not_psd("DensityMatrix: negative eigenvalue");
}

const char* to_string(CompletenessMode mode) {
  switch (mode) {
    case CompletenessMode::Exact: return "exact";
    case CompletenessMode::Subnormalized: return "subnormalized";
    case CompletenessMode::SubspaceExact: return "subspace_exact";
  }
  return "?";
}

double Povm::min_element_eigenvalue() const {
  double worst = 0.0;
  bool first = true;
  for (const auto& e : elements) {
    EigDecomposition eig = sym_eig(e);
    const double mn = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.back();
    if (first || mn < worst) worst = mn;
    first = false;
  }
  return worst;
}

double Povm::completeness_residual() const {
  if (elements.empty()) return 0.0;
  Matrix sum(dim(), dim(), 0.0);
  for (const auto& e : elements) sum += e.mat();
  switch (mode) {
    case CompletenessMode::Exact:
      return (sum - Matrix::identity(dim())).frobenius_norm();
    case CompletenessMode::SubspaceExact: {
      if (!support) throw invalid_input("Povm: SubspaceExact without stored projector");
      return (sum - support->mat()).frobenius_norm();
    }
    case CompletenessMode::Subnormalized: {
      // Violation of sum <= I: how far the top eigenvalue exceeds 1.
      EigDecomposition eig = sym_eig(SymMatrix(sum));
      const double top = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.front();
      return std::max(0.0, top - 1.0);
    }
  }
  return 0.0;
}

void Povm::validate() const {
  if (elements.empty()) throw invalid_input("Povm: no elements");
  for (const auto& e : elements) {
    if (e.dim() != dim()) throw invalid_input("Povm: element dimension mismatch");
    if (!e.mat().all_finite()) throw invalid_input("Povm: non-finite element");
  }
  if (min_element_eigenvalue() < -1e-8) throw not_psd("Povm: element not PSD");
  const double resid = completeness_residual();
  const double tol = (mode == CompletenessMode::Subnormalized) ? 1e-8 : 1e-6;
  if (resid > tol) throw invalid_input("Povm: completeness violated for declared mode");
}

void ClassEnsemble::validate() const {
  if (centroids.size() < 2) throw invalid_input("ClassEnsemble: need at least two classes");
  if (priors.size() != centroids.size())
    throw invalid_input("ClassEnsemble: priors/centroids size mismatch");
  double s = 0.0;
  for (double p : priors) {
    if (p < 0.0) throw invalid_input("ClassEnsemble: negative prior");
    s += p;
  }
  if (std::fabs(s - 1.0) > 1e-12) throw invalid_input("ClassEnsemble: priors do not sum to 1");
  for (const auto& c : centroids)
    if (c.dim() != dim()) throw invalid_input("ClassEnsemble: centroid dimension mismatch");
}

SymMatrix ClassEnsemble::average() const {
  Matrix avg(dim(), dim(), 0.0);
  for (std::size_t k = 0; k < centroids.size(); ++k) {
    Matrix t = centroids[k].mat();
    t *= priors[k];
    avg += t;
  }
  return SymMatrix(avg);
}

ClassEnsemble class_centroids(const std::vector<DensityMatrix>& states,
                              const std::vector<int>& labels) {
  if (states.size() != labels.size())
    throw invalid_input("class_centroids: states/labels length mismatch");
  if (states.empty()) throw invalid_input("class_centroids: no states");

  int k_max = 0;
  for (int y : labels) {
    if (y < 1) throw invalid_input("class_centroids: labels must be >= 1");
    k_max = std::max(k_max, y);
  }
  const std::size_t q = states.front().dim();
  const std::size_t K = static_cast<std::size_t>(k_max);

  std::vector<Matrix> sums(K, Matrix(q, q, 0.0));
  std::vector<std::size_t> counts(K, 0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != q) throw invalid_input("class_centroids: state dimension mismatch");
    const std::size_t k = static_cast<std::size_t>(labels[i] - 1);
    sums[k] += states[i].mat();
    ++counts[k];
  }

  ClassEnsemble ens;
  ens.centroids.reserve(K);
  ens.priors.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (counts[k] == 0) throw degenerate_class("class_centroids: empty class");
    sums[k] *= 1.0 / static_cast<double>(counts[k]);
    ens.centroids.emplace_back(SymMatrix(sums[k]));
    ens.priors[k] = static_cast<double>(counts[k]) / static_cast<double>(states.size());
  }
  return ens;
}

Vector born_scores(const Povm& povm, const Vector& x) {
  if (x.size() != povm.dim()) throw invalid_input("born_scores: dimension mismatch");
  Vector out(povm.outcome_count());
  for (std::size_t k = 0; k < povm.outcome_count(); ++k) {
    const Vector ex = povm.elements[k].mat() * x;
    double s = dot(x, ex);
    if (s < 0.0) {
      if (s < -1e-6) throw not_psd("born_scores: negative score beyond element tolerance");
      s = 0.0;
    }
    out[k] = s;
  }
  return out;
}

Vector born_scores(const Povm& povm, const DensityMatrix& rho) {
  if (rho.dim() != povm.dim()) throw invalid_input("born_scores: dimension mismatch");
  Vector out(povm.outcome_count());
  for (std::size_t k = 0; k < povm.outcome_count(); ++k) {
    double s = frobenius_dot(povm.elements[k].mat(), rho.mat());
    if (s < 0.0) {
      if (s < -1e-6) throw not_psd("born_scores: negative score beyond element tolerance");
      s = 0.0;
    }
    out[k] = s;
  }
  return out;
}

Povm pgm(const ClassEnsemble& ensemble, double rel_threshold) {
  ensemble.validate();
  const std::size_t q = ensemble.dim();
  const SymMatrix avg = ensemble.average();

  // One decomposition yields both the inverse root and the support
  // projector, so the rank decision is made exactly once.
  EigDecomposition eig = sym_eig(avg);
  const double lmax = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.front();
  const double cut = rel_threshold * std::max(lmax, 0.0);

  std::size_t rank = 0;
  Vector inv_root_vals(q, 0.0);
  for (std::size_t i = 0; i < q; ++i) {
    double lam = eig.eigenvalues[i];
    if (lam < -1e-10 * std::max(1.0, lmax)) throw not_psd("pgm: ensemble average not PSD");
    if (lam > cut && lam > 0.0) {
      inv_root_vals[i] = 1.0 / std::sqrt(lam);
      ++rank;
    }
  }

  Matrix inv_root(q, q, 0.0);
  Matrix projector(q, q, 0.0);
  for (std::size_t c = 0; c < q; ++c) {
    if (inv_root_vals[c] == 0.0) continue;
    for (std::size_t i = 0; i < q; ++i) {
      const double vi = eig.eigenvectors(i, c);
      for (std::size_t j = 0; j < q; ++j) {
        const double vj = eig.eigenvectors(j, c);
        inv_root(i, j) += inv_root_vals[c] * vi * vj;
        projector(i, j) += vi * vj;
      }
    }
  }

  Povm out;
  out.elements.reserve(ensemble.class_count());
  for (std::size_t k = 0; k < ensemble.class_count(); ++k) {
    Matrix scaled = ensemble.centroids[k].mat();
    scaled *= ensemble.priors[k];
    out.elements.emplace_back(SymMatrix(inv_root * scaled * inv_root));
  }
  if (rank < q) {
    out.mode = CompletenessMode::SubspaceExact;
    out.support = SymMatrix(projector);
  } else {
    out.mode = CompletenessMode::Exact;
  }
  return out;
}

double success_probability(const Povm& povm, const ClassEnsemble& ensemble) {
  if (povm.outcome_count() != ensemble.class_count())
    throw invalid_input("success_probability: outcome/class count mismatch");
  if (povm.dim() != ensemble.dim())
    throw invalid_input("success_probability: dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < ensemble.class_count(); ++k)
    s += ensemble.priors[k] * frobenius_dot(povm.elements[k].mat(), ensemble.centroids[k].mat());
  return s;
}

}  // namespace qdc
