#pragma once

#include <optional>
#include <vector>

#include "qdc/linalg.hpp"
#include "qdc/matrix.hpp"

namespace qdc {

// Symmetric PSD matrix with unit trace. Construction validates both
// properties (eigenvalue tolerance -1e-10, trace tolerance 1e-9).
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(SymMatrix m);

  std::size_t dim() const { return m_.dim(); }
  const SymMatrix& sym() const { return m_; }
  const Matrix& mat() const { return m_.mat(); }

 private:
  SymMatrix m_;
};

enum class CompletenessMode {
  Exact,         // sum of elements equals the identity
  Subnormalized, // sum of elements <= identity
  SubspaceExact, // sum of elements equals a stored orthogonal projector
};

const char* to_string(CompletenessMode mode);

// Ordered measurement elements. Validation tolerances: each element PSD
// within -1e-8, completeness residual 1e-6 (Frobenius) for the exact
// modes, largest eigenvalue of the sum <= 1 + 1e-8 for Subnormalized.
struct Povm {
  std::vector<SymMatrix> elements;
  CompletenessMode mode = CompletenessMode::Exact;
  // Present iff mode == SubspaceExact.
  std::optional<SymMatrix> support;

  std::size_t outcome_count() const { return elements.size(); }
  std::size_t dim() const { return elements.empty() ? 0 : elements.front().dim(); }

  // Throws not_psd / invalid_input when the declared mode is violated.
  void validate() const;
  // Largest PSD violation and completeness residual, for reporting.
  double min_element_eigenvalue() const;
  double completeness_residual() const;
};

// Per-class average states with their empirical priors.
struct ClassEnsemble {
  std::vector<DensityMatrix> centroids;
  Vector priors;

  std::size_t class_count() const { return centroids.size(); }
  std::size_t dim() const { return centroids.empty() ? 0 : centroids.front().dim(); }
  void validate() const;

  // sum_k p_k centroid_k.
  SymMatrix average() const;
};

// Average the states of each class; priors are the class frequencies.
// Labels take values in {1..K}; an empty class throws degenerate_class.
ClassEnsemble class_centroids(const std::vector<DensityMatrix>& states,
                              const std::vector<int>& labels);

// Outcome probabilities x^T E_k x for a pure state. Tiny negatives from
// roundoff (>= -1e-9) are clipped to zero.
Vector born_scores(const Povm& povm, const Vector& x);
// Tr(E_k rho) for a general (possibly mixed) state.
Vector born_scores(const Povm& povm, const DensityMatrix& rho);

// Square-root measurement of the ensemble: E_k = R p_k rho_k R with
// R = (sum_k p_k rho_k)^(-1/2) as a regularized pseudo-inverse root.
// When the ensemble average is rank-deficient at rel_threshold the
// elements sum to the projector onto its support (SubspaceExact).
Povm pgm(const ClassEnsemble& ensemble, double rel_threshold = kDefaultPinvThreshold);

// sum_k p_k Tr(E_k rho_k).
double success_probability(const Povm& povm, const ClassEnsemble& ensemble);

}  // namespace qdc
