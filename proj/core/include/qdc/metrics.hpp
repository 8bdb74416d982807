#pragma once

#include <cstddef>
#include <vector>

#include "qdc/matrix.hpp"

namespace qdc {

// counts[k'-1][k-1] = number of class-k samples that were predicted k'.
// Column sums are the per-class sample counts.
struct ConfusionMatrix {
  std::size_t class_count = 0;
  std::vector<long long> counts;  // row-major K x K

  long long at(std::size_t predicted, std::size_t actual) const {
    return counts[predicted * class_count + actual];
  }
  std::vector<long long> column_sums() const;
};

ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels,
                          int class_count);

// (1/K) sum_k V_kk / N_k. Throws degenerate_class when some class has no
// samples.
double balanced_accuracy(const ConfusionMatrix& v);

// sum_k p_k * mean_{i in class k} score_i[k]. Classes absent from the
// evaluated set contribute zero.
double empirical_success_probability(const std::vector<Vector>& score_vectors,
                                     const std::vector<int>& labels, const Vector& priors);

// (1/N) sum_{i,k} (score_i[k] - delta_{y_i,k})^2. Note the 1/N only; the
// per-sample sums over k are not averaged over K.
double mean_squared_error(const std::vector<Vector>& score_vectors,
                          const std::vector<int>& labels);

}  // namespace qdc
