#include "qdc/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "qdc/errors.hpp"
#include "qdc/linalg.hpp"
#include "qdc/metrics.hpp"
#include "qdc/preprocess.hpp"

namespace qdc {

namespace {

int max_label(const std::vector<int>& labels) {
  int k = 0;
  for (int y : labels) {
    if (y < 1) throw invalid_input("ridge_fit: labels must be >= 1");
    k = std::max(k, y);
  }
  return k;
}

}  // namespace

Matrix ridge_fit(const Matrix& features, const std::vector<int>& labels, double lambda) {
  if (features.rows() != labels.size())
    throw invalid_input("ridge_fit: features/labels length mismatch");
  if (lambda < 0.0) throw invalid_input("ridge_fit: lambda must be >= 0");
  const std::size_t n = features.rows();
  const std::size_t p = features.cols();
  const int K = max_label(labels);

  // Augmented design [X, 1]; normal matrix with the penalty applied to all
  // coordinates except the intercept.
  Matrix xa(n, p + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double* src = features.row(i);
    double* dst = xa.row(i);
    std::copy(src, src + p, dst);
    dst[p] = 1.0;
  }
  Matrix normal = transpose_times(xa, xa);
  for (std::size_t j = 0; j < p; ++j) normal(j, j) += lambda;

  // X^T Y with one-hot targets.
  Matrix xty(p + 1, static_cast<std::size_t>(K), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = xa.row(i);
    const std::size_t k = static_cast<std::size_t>(labels[i] - 1);
    for (std::size_t j = 0; j < p + 1; ++j) xty(j, k) += xi[j];
  }

  Matrix beta;
  if (!solve_spd(SymMatrix(normal), xty, beta)) {
    // Singular normal matrix (possible when lambda == 0): spectral
    // pseudo-inverse instead.
    EigDecomposition eig = sym_eig(SymMatrix(normal));
    const double lmax = eig.eigenvalues.empty() ? 0.0 : std::fabs(eig.eigenvalues.front());
    const double cut = 1e-12 * std::max(1.0, lmax);
    Matrix vt_xty = transpose_times(eig.eigenvectors, xty);
    for (std::size_t r = 0; r < vt_xty.rows(); ++r) {
      const double lam = eig.eigenvalues[r];
      const double f = (lam > cut) ? 1.0 / lam : 0.0;
      for (std::size_t c = 0; c < vt_xty.cols(); ++c) vt_xty(r, c) *= f;
    }
    beta = eig.eigenvectors * vt_xty;
  }

  // Return K x (p+1), one weight row per class.
  return beta.transpose();
}

Vector ridge_scores(const Matrix& weights, const Vector& x) {
  if (weights.cols() != x.size() + 1) throw invalid_input("ridge_scores: dimension mismatch");
  Vector s(weights.rows());
  for (std::size_t k = 0; k < weights.rows(); ++k) {
    const double* w = weights.row(k);
    double acc = w[x.size()];  // intercept
    for (std::size_t j = 0; j < x.size(); ++j) acc += w[j] * x[j];
    s[k] = acc;
  }
  return s;
}

double ridge_cv_lambda(const Matrix& features, const std::vector<int>& labels,
                       const Vector& grid, int folds) {
  if (grid.empty()) throw invalid_input("ridge_cv_lambda: empty grid");
  const std::size_t n = features.rows();
  folds = std::max(2, std::min<int>(folds, static_cast<int>(n)));
  const int K = max_label(labels);

  Vector sorted = grid;
  std::sort(sorted.begin(), sorted.end());

  double best_lambda = sorted.front();
  double best_ba = -1.0;
  for (double lambda : sorted) {
    double ba_sum = 0.0;
    int ba_count = 0;
    for (int f = 0; f < folds; ++f) {
      std::vector<std::size_t> train_idx, val_idx;
      for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<int>(i % static_cast<std::size_t>(folds)) == f)
          val_idx.push_back(i);
        else
          train_idx.push_back(i);
      }
      if (val_idx.empty() || train_idx.empty()) continue;

      Matrix xt(train_idx.size(), features.cols());
      std::vector<int> yt(train_idx.size());
      for (std::size_t r = 0; r < train_idx.size(); ++r) {
        const double* src = features.row(train_idx[r]);
        std::copy(src, src + features.cols(), xt.row(r));
        yt[r] = labels[train_idx[r]];
      }
      // A fold might not contain every class; skip it rather than fail.
      bool all_classes = true;
      {
        std::vector<char> seen(static_cast<std::size_t>(K), 0);
        for (int y : yt) seen[static_cast<std::size_t>(y - 1)] = 1;
        for (char s : seen) all_classes = all_classes && s;
      }
      if (!all_classes) continue;

      const Matrix w = ridge_fit(xt, yt, lambda);
      std::vector<int> preds;
      std::vector<int> truth;
      preds.reserve(val_idx.size());
      for (std::size_t i : val_idx) {
        const double* src = features.row(i);
        Vector x(src, src + features.cols());
        const Vector s = ridge_scores(w, x);
        int arg = 1;
        for (std::size_t k = 1; k < s.size(); ++k)
          if (s[k] > s[arg - 1]) arg = static_cast<int>(k) + 1;
        preds.push_back(arg);
        truth.push_back(labels[i]);
      }
      // Validation folds can also miss classes; score only those present.
      ConfusionMatrix v = confusion(preds, truth, K);
      const std::vector<long long> nk = v.column_sums();
      double ba = 0.0;
      int present = 0;
      for (std::size_t k = 0; k < v.class_count; ++k) {
        if (nk[k] == 0) continue;
        ba += static_cast<double>(v.at(k, k)) / static_cast<double>(nk[k]);
        ++present;
      }
      if (present == 0) continue;
      ba_sum += ba / present;
      ++ba_count;
    }
    if (ba_count == 0) continue;
    const double mean_ba = ba_sum / ba_count;
    if (mean_ba > best_ba + 1e-12) {
      best_ba = mean_ba;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

Vector quad_feature_map(const Vector& u) { return poly_expand(u); }

}  // namespace qdc
