#include "qdc/classifiers.hpp"

#include <algorithm>
#include <cmath>

#include "qdc/errors.hpp"

namespace qdc {

const char* to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::SdpC: return "sdp";
    case ClassifierKind::SdpGammaC: return "sdp_gamma";
    case ClassifierKind::LpC: return "lp";
    case ClassifierKind::PgmC: return "pgm";
    case ClassifierKind::KPgmC: return "kpgm";
    case ClassifierKind::KPgmInfC: return "kpgm_inf";
    case ClassifierKind::QncC: return "qnc";
    case ClassifierKind::RidgeC: return "ridge";
  }
  return "?";
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
  if (name == "sdp") return ClassifierKind::SdpC;
  if (name == "sdp_gamma") return ClassifierKind::SdpGammaC;
  if (name == "lp") return ClassifierKind::LpC;
  if (name == "pgm") return ClassifierKind::PgmC;
  if (name == "kpgm") return ClassifierKind::KPgmC;
  if (name == "kpgm_inf") return ClassifierKind::KPgmInfC;
  if (name == "qnc") return ClassifierKind::QncC;
  if (name == "ridge") return ClassifierKind::RidgeC;
  throw config_error("unknown classifier kind '" + name + "'");
}

bool is_povm_kind(ClassifierKind kind) {
  return kind == ClassifierKind::SdpC || kind == ClassifierKind::SdpGammaC ||
         kind == ClassifierKind::PgmC || kind == ClassifierKind::KPgmC;
}

bool is_kernel_kind(ClassifierKind kind) {
  return kind == ClassifierKind::KPgmC || kind == ClassifierKind::KPgmInfC;
}

// -- Pipeline --------------------------------------------------------------

Vector Pipeline::apply_from(const Vector& raw, std::size_t from) const {
  Vector x = raw;
  for (std::size_t si = from; si < stages_.size(); ++si) {
    const PipelineStage& stage = stages_[si];
    if (const auto* c = std::get_if<CenterStage>(&stage)) {
      if (x.size() != c->mean.size()) throw invalid_input("pipeline: center size mismatch");
      for (std::size_t j = 0; j < x.size(); ++j) x[j] -= c->mean[j];
    } else if (const auto* s = std::get_if<StandardizeStage>(&stage)) {
      if (x.size() != s->inv_std.size())
        throw invalid_input("pipeline: standardize size mismatch");
      for (std::size_t j = 0; j < x.size(); ++j) x[j] *= s->inv_std[j];
    } else if (const auto* p = std::get_if<PcaStage>(&stage)) {
      x = pca_apply(p->model, x);
    } else if (const auto* n = std::get_if<NormalizeStage>(&stage)) {
      switch (n->kind) {
        case NormalizationKind::None: break;
        case NormalizationKind::L2: x = l2_normalize(x); break;
        case NormalizationKind::Stereographic: x = inverse_stereographic(x); break;
      }
    } else if (std::get_if<PolyExpandStage>(&stage)) {
      x = poly_expand(x);
    } else if (const auto* t = std::get_if<TensorStage>(&stage)) {
      x = tensor_power(x, t->copies, t->entry_cap);
    } else if (const auto* sub = std::get_if<SubspaceStage>(&stage)) {
      if (x.size() != sub->basis.rows()) throw invalid_input("pipeline: subspace size mismatch");
      Vector reduced = transpose_times(sub->basis, x);
      const double n2 = dot(reduced, reduced);
      if (n2 <= 1e-12)
        throw null_projection("pipeline: sample has no support in the fitted subspace");
      const double inv = 1.0 / std::sqrt(n2);
      for (double& v : reduced) v *= inv;
      x = std::move(reduced);
    }
  }
  return x;
}

std::size_t Pipeline::reported_features(std::size_t raw_features) const {
  std::size_t f = raw_features;
  for (const PipelineStage& stage : stages_) {
    if (const auto* p = std::get_if<PcaStage>(&stage)) f = p->model.retained();
  }
  return f;
}

// -- Fitting ----------------------------------------------------------------

namespace {

// Fit the feature-space stages on the training matrix and return the
// transformed rows; the same arithmetic as Pipeline::apply, batched.
Matrix fit_feature_stages(const Dataset& train, const FitOptions& opt, Pipeline& pipeline) {
  Matrix x = train.features;
  const std::size_t n = x.rows();

  if (opt.center) {
    Vector mean(x.cols(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = x.row(i);
      for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += row[j];
    }
    for (double& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      double* row = x.row(i);
      for (std::size_t j = 0; j < x.cols(); ++j) row[j] -= mean[j];
    }
    pipeline.push(CenterStage{std::move(mean)});
  }

  if (opt.standardize) {
    Vector mean(x.cols(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = x.row(i);
      for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += row[j];
    }
    for (double& m : mean) m /= static_cast<double>(n);
    Vector var(x.cols(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = x.row(i);
      for (std::size_t j = 0; j < x.cols(); ++j) {
        const double d = row[j] - mean[j];
        var[j] += d * d;
      }
    }
    Vector inv_std(x.cols(), 1.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double sd = std::sqrt(var[j] / static_cast<double>(n));
      if (sd > 1e-12) inv_std[j] = 1.0 / sd;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double* row = x.row(i);
      for (std::size_t j = 0; j < x.cols(); ++j) row[j] *= inv_std[j];
    }
    pipeline.push(StandardizeStage{std::move(inv_std)});
  }

  if (opt.pca > 0) {
    Dataset tmp;
    tmp.features = x;
    tmp.labels = train.labels;
    tmp.class_count = train.class_count;
    PcaModel model = pca_fit(tmp, opt.pca);
    Matrix projected(n, opt.pca);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = x.row(i);
      Vector xi(row, row + x.cols());
      const Vector out = pca_apply(model, xi);
      std::copy(out.begin(), out.end(), projected.row(i));
    }
    pipeline.push(PcaStage{std::move(model)});
    x = std::move(projected);
  }
  return x;
}

Matrix apply_per_row(const Pipeline& pipeline, const Matrix& x, std::size_t from_stage) {
  std::vector<Vector> rows;
  rows.reserve(x.rows());
  std::size_t width = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    Vector xi(x.row(i), x.row(i) + x.cols());
    xi = pipeline.apply_from(xi, from_stage);
    width = xi.size();
    rows.push_back(std::move(xi));
  }
  Matrix out(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), out.row(i));
  return out;
}

// Class centroid density matrices accumulated directly from unit rows;
// avoids materializing one density matrix per sample.
ClassEnsemble ensemble_from_rows(const Matrix& states, const std::vector<int>& labels,
                                 int class_count) {
  const std::size_t q = states.cols();
  const std::size_t K = static_cast<std::size_t>(class_count);
  std::vector<Matrix> sums(K, Matrix(q, q, 0.0));
  std::vector<std::size_t> counts(K, 0);
  for (std::size_t i = 0; i < states.rows(); ++i) {
    const double* xi = states.row(i);
    const std::size_t k = static_cast<std::size_t>(labels[i] - 1);
    Matrix& s = sums[k];
    for (std::size_t a = 0; a < q; ++a) {
      const double xa = xi[a];
      if (xa == 0.0) continue;
      double* row = s.row(a);
      for (std::size_t b = 0; b < q; ++b) row[b] += xa * xi[b];
    }
    ++counts[k];
  }
  ClassEnsemble ens;
  ens.centroids.reserve(K);
  ens.priors.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (counts[k] == 0) throw degenerate_class("fit: empty class");
    sums[k] *= 1.0 / static_cast<double>(counts[k]);
    ens.centroids.emplace_back(SymMatrix(sums[k]));
    ens.priors[k] = static_cast<double>(counts[k]) / static_cast<double>(states.rows());
  }
  return ens;
}

// Deterministic orthonormal basis of the top-d' eigenvectors of the mean
// second-moment matrix of the rows.
Matrix fit_subspace_basis(const Matrix& states, std::size_t d_prime) {
  const std::size_t q = states.cols();
  if (d_prime < 1 || d_prime > q) throw invalid_input("fit: state_subspace outside [1, q]");
  Matrix moment = transpose_times(states, states);
  moment *= 1.0 / static_cast<double>(states.rows());
  EigDecomposition eig = sym_eig(SymMatrix(moment));
  Matrix basis(q, d_prime);
  for (std::size_t c = 0; c < d_prime; ++c) {
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      const double a = std::fabs(eig.eigenvectors(i, c));
      if (a > best + 1e-15) {
        best = a;
        arg = i;
      }
    }
    const double sign = eig.eigenvectors(arg, c) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < q; ++i) basis(i, c) = sign * eig.eigenvectors(i, c);
  }
  return basis;
}

}  // namespace

KernelPgmModel kpgm_fit(const Matrix& train_vectors, const std::vector<int>& labels,
                        std::size_t copies, double rel_threshold) {
  if (train_vectors.rows() != labels.size())
    throw invalid_input("kpgm_fit: vectors/labels length mismatch");
  if (copies < 1) throw invalid_input("kpgm_fit: copies must be >= 1");
  const std::size_t n = train_vectors.rows();

  Matrix gram(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = train_vectors.row(i);
    for (std::size_t j = 0; j <= i; ++j) {
      const double* xj = train_vectors.row(j);
      double g = 0.0;
      for (std::size_t f = 0; f < train_vectors.cols(); ++f) g += xi[f] * xj[f];
      const double gm = (copies == 1) ? g : std::pow(g, static_cast<double>(copies));
      gram(i, j) = gm;
      gram(j, i) = gm;
    }
  }

  KernelPgmModel model;
  model.train_vectors = train_vectors;
  model.labels = labels;
  model.copies = copies;
  model.rel_threshold = rel_threshold;
  int kmax = 0;
  for (int y : labels) kmax = std::max(kmax, y);
  model.class_count = kmax;
  model.g_inv_sqrt = pinv_pow(SymMatrix(gram), -0.5, rel_threshold);
  return model;
}

Vector kpgm_scores(const KernelPgmModel& model, const Vector& z) {
  const std::size_t n = model.train_vectors.rows();
  if (z.size() != model.train_vectors.cols())
    throw invalid_input("kpgm_scores: dimension mismatch");
  Vector w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = model.train_vectors.row(i);
    double g = 0.0;
    for (std::size_t f = 0; f < z.size(); ++f) g += xi[f] * z[f];
    w[i] = (model.copies == 1) ? g : std::pow(g, static_cast<double>(model.copies));
  }
  const Vector v = model.g_inv_sqrt.mat() * w;
  Vector out(static_cast<std::size_t>(model.class_count), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(model.labels[i] - 1)] += v[i] * v[i];
  return out;
}

int kpgm_infinite_predict(const Matrix& train_vectors, const std::vector<int>& labels,
                          const Vector& z) {
  if (train_vectors.rows() != labels.size())
    throw invalid_input("kpgm_infinite_predict: vectors/labels length mismatch");
  if (train_vectors.rows() == 0) throw invalid_input("kpgm_infinite_predict: no training data");
  std::size_t best_i = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < train_vectors.rows(); ++i) {
    const double* xi = train_vectors.row(i);
    double g = 0.0;
    for (std::size_t f = 0; f < z.size(); ++f) g += xi[f] * z[f];
    const double a = std::fabs(g);
    if (a > best) {  // strict: earlier index wins ties
      best = a;
      best_i = i;
    }
  }
  return labels[best_i];
}

ClassifierModel fit(ClassifierKind kind, const Dataset& train, const FitOptions& opt) {
  train.validate();
  if (train.class_count < 2) throw invalid_input("fit: need at least two classes");

  ClassifierModel model;
  model.kind = kind;
  model.copies = opt.copies;
  model.class_count = train.class_count;

  const bool quantum_kind = is_povm_kind(kind) || kind == ClassifierKind::QncC ||
                            kind == ClassifierKind::KPgmInfC;
  if (quantum_kind && opt.normalization == NormalizationKind::None)
    throw config_error("fit: state-based classifiers require a normalization stage");
  if (opt.state_subspace > 0 &&
      !(kind == ClassifierKind::SdpC || kind == ClassifierKind::SdpGammaC ||
        kind == ClassifierKind::PgmC || kind == ClassifierKind::QncC))
    throw config_error("fit: state_subspace only applies to the direct state classifiers");
  if (kind == ClassifierKind::KPgmInfC && opt.copies > 1)
    throw config_error("fit: copies are implicit in the infinite-copy classifier");

  Matrix x = fit_feature_stages(train, opt, model.pipeline);
  const std::size_t feature_stages = model.pipeline.stages().size();

  if (opt.normalization != NormalizationKind::None)
    model.pipeline.push(NormalizeStage{opt.normalization});

  const bool tensor_in_pipeline =
      opt.copies > 1 && !is_kernel_kind(kind) &&
      (is_povm_kind(kind) || kind == ClassifierKind::QncC);
  const bool poly_in_pipeline =
      opt.copies > 1 && (kind == ClassifierKind::LpC || kind == ClassifierKind::RidgeC);
  if (poly_in_pipeline && opt.copies != 2)
    throw config_error("fit: the linear baselines support copies = 2 only");
  if (tensor_in_pipeline)
    model.pipeline.push(TensorStage{opt.copies, opt.tensor_entry_cap});
  if (poly_in_pipeline) model.pipeline.push(PolyExpandStage{});

  // Transform training rows through the remaining stages.
  x = apply_per_row(model.pipeline, x, feature_stages);

  if (opt.state_subspace > 0) {
    Matrix basis = fit_subspace_basis(x, opt.state_subspace);
    model.pipeline.push(SubspaceStage{std::move(basis)});
    x = apply_per_row(model.pipeline, x, model.pipeline.stages().size() - 1);
  }

  switch (kind) {
    case ClassifierKind::PgmC: {
      const ClassEnsemble ens = ensemble_from_rows(x, train.labels, train.class_count);
      model.povm = pgm(ens, opt.rel_threshold);
      break;
    }
    case ClassifierKind::SdpC:
    case ClassifierKind::SdpGammaC: {
      PovmSdpProblem problem;
      problem.objective = (kind == ClassifierKind::SdpC) ? SdpObjective::MaxPsucc
                                                         : SdpObjective::MaxGap;
      problem.completeness = opt.sdp_inconclusive ? SdpCompleteness::Inequality
                                                  : SdpCompleteness::Equality;
      problem.ensemble = ensemble_from_rows(x, train.labels, train.class_count);
      auto [povm, report] = solve_povm_sdp(problem, opt.sdp_tol, opt.sdp_max_iters);
      model.povm = std::move(povm);
      model.fit_report = report;
      break;
    }
    case ClassifierKind::QncC: {
      model.centroids = ensemble_from_rows(x, train.labels, train.class_count);
      break;
    }
    case ClassifierKind::LpC: {
      const std::size_t K = static_cast<std::size_t>(train.class_count);
      std::vector<Vector> centroids(K, Vector(x.cols(), 0.0));
      std::vector<std::size_t> counts(K, 0);
      for (std::size_t i = 0; i < x.rows(); ++i) {
        const std::size_t k = static_cast<std::size_t>(train.labels[i] - 1);
        const double* xi = x.row(i);
        for (std::size_t f = 0; f < x.cols(); ++f) centroids[k][f] += xi[f];
        ++counts[k];
      }
      for (std::size_t k = 0; k < K; ++k) {
        if (counts[k] == 0) throw degenerate_class("fit: empty class");
        for (double& v : centroids[k]) v /= static_cast<double>(counts[k]);
      }
      BoxGapLpSolution sol = solve_box_gap_lp(centroids, opt.lp_bound);
      Matrix w(K, x.cols());
      for (std::size_t k = 0; k < K; ++k)
        std::copy(sol.weights[k].begin(), sol.weights[k].end(), w.row(k));
      model.linear_weights = std::move(w);
      model.fit_report = sol.report;
      break;
    }
    case ClassifierKind::RidgeC: {
      double lambda = opt.ridge_lambda;
      if (lambda < 0.0)
        lambda = ridge_cv_lambda(x, train.labels, opt.ridge_lambda_grid, opt.cv_folds);
      model.linear_weights = ridge_fit(x, train.labels, lambda);
      break;
    }
    case ClassifierKind::KPgmC: {
      model.kernel = kpgm_fit(x, train.labels, opt.copies, opt.rel_threshold);
      break;
    }
    case ClassifierKind::KPgmInfC: {
      model.stored_vectors = std::move(x);
      model.stored_labels = train.labels;
      break;
    }
  }
  return model;
}

Vector scores(const ClassifierModel& model, const Vector& raw) {
  const Vector x = model.pipeline.apply(raw);
  switch (model.kind) {
    case ClassifierKind::SdpC:
    case ClassifierKind::SdpGammaC:
    case ClassifierKind::PgmC:
      return born_scores(*model.povm, x);
    case ClassifierKind::QncC: {
      const DensityMatrix rho = to_density(x);
      Vector s(model.centroids->class_count());
      for (std::size_t k = 0; k < s.size(); ++k)
        s[k] = -trace_distance(model.centroids->centroids[k].sym(), rho.sym());
      return s;
    }
    case ClassifierKind::LpC: {
      return *model.linear_weights * x;
    }
    case ClassifierKind::RidgeC:
      return ridge_scores(*model.linear_weights, x);
    case ClassifierKind::KPgmC:
      return kpgm_scores(*model.kernel, x);
    case ClassifierKind::KPgmInfC: {
      Vector s(static_cast<std::size_t>(model.class_count), 0.0);
      for (std::size_t i = 0; i < model.stored_vectors->rows(); ++i) {
        const double* xi = model.stored_vectors->row(i);
        double g = 0.0;
        for (std::size_t f = 0; f < x.size(); ++f) g += xi[f] * x[f];
        const std::size_t k = static_cast<std::size_t>(model.stored_labels[i] - 1);
        s[k] = std::max(s[k], std::fabs(g));
      }
      return s;
    }
  }
  throw invalid_input("scores: unhandled classifier kind");
}

int argmax_label(const Vector& s) {
  if (s.empty()) throw invalid_input("argmax_label: empty scores");
  std::size_t arg = 0;
  for (std::size_t k = 1; k < s.size(); ++k)
    if (s[k] > s[arg]) arg = k;  // strict: smallest index wins ties
  return static_cast<int>(arg) + 1;
}

int predict(const ClassifierModel& model, const Vector& raw) {
  if (model.kind == ClassifierKind::KPgmInfC) {
    const Vector x = model.pipeline.apply(raw);
    return kpgm_infinite_predict(*model.stored_vectors, model.stored_labels, x);
  }
  return argmax_label(scores(model, raw));
}

}  // namespace qdc
