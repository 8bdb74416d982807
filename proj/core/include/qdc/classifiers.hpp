#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qdc/baselines.hpp"
#include "qdc/dataset.hpp"
#include "qdc/preprocess.hpp"
#include "qdc/quantum.hpp"
#include "qdc/solvers.hpp"

namespace qdc {

enum class ClassifierKind {
  SdpC,       // POVM maximizing the training success probability
  SdpGammaC,  // POVM maximizing the worst-pair score gap
  LpC,        // box-constrained linear gap classifier
  PgmC,       // square-root measurement of the class centroids
  KPgmC,      // same measurement evaluated through Gram matrices
  KPgmInfC,   // infinite-copy limit: nearest |inner product| neighbour
  QncC,       // nearest centroid by trace distance
  RidgeC,     // one-vs-all ridge regression
};

const char* to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);
bool is_povm_kind(ClassifierKind kind);    // scores are Born probabilities
bool is_kernel_kind(ClassifierKind kind);  // Gram-based, no q^m tensors

enum class NormalizationKind { None, L2, Stereographic };

// -- Replayable preprocessing -------------------------------------------

struct CenterStage {
  Vector mean;
};
struct StandardizeStage {
  Vector inv_std;
};
struct PcaStage {
  PcaModel model;
};
struct NormalizeStage {
  NormalizationKind kind = NormalizationKind::L2;
};
struct PolyExpandStage {};  // (u, u (x) u) distinct monomials
struct TensorStage {
  std::size_t copies = 1;
  std::size_t entry_cap = kDefaultTensorCap;
};
// Restriction to a fitted state subspace: x -> V^T x, renormalized.
struct SubspaceStage {
  Matrix basis;  // q x d', orthonormal columns
};

using PipelineStage = std::variant<CenterStage, StandardizeStage, PcaStage, NormalizeStage,
                                   PolyExpandStage, TensorStage, SubspaceStage>;

class Pipeline {
 public:
  void push(PipelineStage stage) { stages_.push_back(std::move(stage)); }
  const std::vector<PipelineStage>& stages() const { return stages_; }

  // Deterministic replay of every fitted stage on a raw sample.
  Vector apply(const Vector& raw) const { return apply_from(raw, 0); }
  // Replay of the stage suffix [from, end); used while fitting.
  Vector apply_from(const Vector& x, std::size_t from) const;
  // Feature dimension after the feature-space stages (before any
  // normalization/tensor stage); used for reporting.
  std::size_t reported_features(std::size_t raw_features) const;

 private:
  std::vector<PipelineStage> stages_;
};

// -- Models --------------------------------------------------------------

struct KernelPgmModel {
  Matrix train_vectors;  // N x q, unit rows (post-pipeline)
  SymMatrix g_inv_sqrt;  // (G^(m))^(-1/2), N x N
  std::vector<int> labels;
  int class_count = 0;
  std::size_t copies = 1;
  double rel_threshold = kDefaultPinvThreshold;
};

struct FitOptions {
  // pipeline
  bool center = false;
  bool standardize = false;
  std::size_t pca = 0;  // 0 = off
  NormalizationKind normalization = NormalizationKind::L2;
  std::size_t copies = 1;
  std::size_t state_subspace = 0;  // 0 = off
  std::size_t tensor_entry_cap = kDefaultTensorCap;
  // hyperparameters
  double rel_threshold = kDefaultPinvThreshold;  // pseudo-inverse cut
  double ridge_lambda = -1.0;                    // < 0 selects by CV
  Vector ridge_lambda_grid = kRidgeLambdaGrid;
  int cv_folds = 5;
  double lp_bound = 1.0;  // box half-width for LpC
  double sdp_tol = kDefaultSdpTol;
  int sdp_max_iters = kDefaultSdpMaxIters;
  bool sdp_inconclusive = false;  // allow sum E_k <= I
};

struct ClassifierModel {
  ClassifierKind kind = ClassifierKind::PgmC;
  Pipeline pipeline;
  std::size_t copies = 1;
  int class_count = 0;

  // Exactly one payload is populated, matching `kind`.
  std::optional<Povm> povm;                 // SdpC, SdpGammaC, PgmC
  std::optional<ClassEnsemble> centroids;   // QncC
  std::optional<Matrix> linear_weights;     // LpC (K x q), RidgeC (K x (q+1))
  std::optional<KernelPgmModel> kernel;     // KPgmC
  std::optional<Matrix> stored_vectors;     // KPgmInfC
  std::vector<int> stored_labels;           // KPgmInfC

  SolverReport fit_report;  // populated by the optimizing kinds
};

ClassifierModel fit(ClassifierKind kind, const Dataset& train, const FitOptions& options);

// Per-class scores for a raw sample (the fitted pipeline is applied
// internally). POVM kinds return Born probabilities; QncC returns negated
// trace distances so that argmax selects the nearest centroid; the linear
// kinds return inner products; KPgmInfC returns the per-class maximum of
// |x_i . z|.
Vector scores(const ClassifierModel& model, const Vector& raw);

// argmax with the smallest class index winning ties. KPgmInfC resolves
// exact ties by the smallest training index instead (see
// kpgm_infinite_predict).
int predict(const ClassifierModel& model, const Vector& raw);
int argmax_label(const Vector& s);

// -- Kernel-form square-root measurement ---------------------------------

// Builds (G^(m))^(-1/2) from the element-wise m-th power of the Gram
// matrix of the (unit) training rows. Cost scales with N, never with q^m.
KernelPgmModel kpgm_fit(const Matrix& train_vectors, const std::vector<int>& labels,
                        std::size_t copies, double rel_threshold = kDefaultPinvThreshold);

// Pr(k|z) = | restriction to class k of G^(-1/2) w |^2 with
// w_i = (x_i . z)^m. Subnormalized outside span{x_i}.
Vector kpgm_scores(const KernelPgmModel& model, const Vector& z);

// Infinite-copy limit: the class of the training vector with the largest
// |x_i . z|; ties go to the smallest training index.
int kpgm_infinite_predict(const Matrix& train_vectors, const std::vector<int>& labels,
                          const Vector& z);

}  // namespace qdc
