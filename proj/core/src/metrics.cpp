#include "qdc/metrics.hpp"

#include "qdc/errors.hpp"

namespace qdc {

std::vector<long long> ConfusionMatrix::column_sums() const {
  std::vector<long long> sums(class_count, 0);
  for (std::size_t kp = 0; kp < class_count; ++kp)
    for (std::size_t k = 0; k < class_count; ++k) sums[k] += at(kp, k);
  return sums;
}

ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels,
                          int class_count) {
  if (predictions.size() != labels.size())
    throw invalid_input("confusion: predictions/labels length mismatch");
  if (class_count < 1) throw invalid_input("confusion: class_count < 1");
  ConfusionMatrix v;
  v.class_count = static_cast<std::size_t>(class_count);
  v.counts.assign(v.class_count * v.class_count, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    const int yp = predictions[i];
    if (y < 1 || y > class_count || yp < 1 || yp > class_count)
      throw invalid_input("confusion: label outside {1..K}");
    ++v.counts[static_cast<std::size_t>(yp - 1) * v.class_count +
               static_cast<std::size_t>(y - 1)];
  }
  return v;
}

double balanced_accuracy(const ConfusionMatrix& v) {
  const std::vector<long long> n_k = v.column_sums();
  double sum = 0.0;
  for (std::size_t k = 0; k < v.class_count; ++k) {
    if (n_k[k] == 0) throw degenerate_class("balanced_accuracy: class with no samples");
    sum += static_cast<double>(v.at(k, k)) / static_cast<double>(n_k[k]);
  }
  return sum / static_cast<double>(v.class_count);
}

double empirical_success_probability(const std::vector<Vector>& score_vectors,
                                     const std::vector<int>& labels, const Vector& priors) {
  if (score_vectors.size() != labels.size())
    throw invalid_input("empirical_success_probability: length mismatch");
  const std::size_t K = priors.size();
  Vector class_sum(K, 0.0);
  std::vector<std::size_t> class_n(K, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::size_t k = static_cast<std::size_t>(labels[i] - 1);
    if (k >= K || score_vectors[i].size() != K)
      throw invalid_input("empirical_success_probability: shape mismatch");
    class_sum[k] += score_vectors[i][k];
    ++class_n[k];
  }
  double out = 0.0;
  for (std::size_t k = 0; k < K; ++k)
    if (class_n[k] > 0) out += priors[k] * class_sum[k] / static_cast<double>(class_n[k]);
  return out;
}

double mean_squared_error(const std::vector<Vector>& score_vectors,
                          const std::vector<int>& labels) {
  if (score_vectors.size() != labels.size())
    throw invalid_input("mean_squared_error: length mismatch");
  if (score_vectors.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Vector& s = score_vectors[i];
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double target = (static_cast<int>(k) + 1 == labels[i]) ? 1.0 : 0.0;
      const double d = s[k] - target;
      sum += d * d;
    }
  }
  return sum / static_cast<double>(labels.size());
}

}  // namespace qdc
