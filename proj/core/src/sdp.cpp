#include <algorithm>
#include <cmath>

#include "qdc/errors.hpp"
#include "qdc/linalg.hpp"
#include "qdc/solvers.hpp"

namespace qdc {

namespace {

// Full solver iterate: one q x q block per POVM element (plus one slack
// block in Inequality mode), and the scalar gap variables for MaxGap.
struct Iterate {
  std::vector<Matrix> blocks;
  double gamma = 0.0;
  Vector slacks;  // one per ordered class pair (j,k), j != k

  static Iterate zeros_like(std::size_t n_blocks, std::size_t q, std::size_t n_pairs) {
    Iterate it;
    it.blocks.assign(n_blocks, Matrix(q, q, 0.0));
    it.slacks.assign(n_pairs, 0.0);
    return it;
  }

  double norm() const {
    double s = gamma * gamma;
    for (const auto& b : blocks) {
      const double f = b.frobenius_norm();
      s += f * f;
    }
    for (double v : slacks) s += v * v;
    return std::sqrt(s);
  }
};

void scale(Iterate& v, double a) {
  for (auto& b : v.blocks) b *= a;
  v.gamma *= a;
  for (double& s : v.slacks) s *= a;
}

Iterate combine(double a, const Iterate& x, double b, const Iterate& y) {
  Iterate out = x;
  for (std::size_t i = 0; i < out.blocks.size(); ++i) {
    out.blocks[i] *= a;
    Matrix t = y.blocks[i];
    t *= b;
    out.blocks[i] += t;
  }
  out.gamma = a * x.gamma + b * y.gamma;
  for (std::size_t i = 0; i < out.slacks.size(); ++i)
    out.slacks[i] = a * x.slacks[i] + b * y.slacks[i];
  return out;
}

double distance(const Iterate& x, const Iterate& y) {
  double s = (x.gamma - y.gamma) * (x.gamma - y.gamma);
  for (std::size_t i = 0; i < x.blocks.size(); ++i) {
    const double f = (x.blocks[i] - y.blocks[i]).frobenius_norm();
    s += f * f;
  }
  for (std::size_t i = 0; i < x.slacks.size(); ++i)
    s += (x.slacks[i] - y.slacks[i]) * (x.slacks[i] - y.slacks[i]);
  return std::sqrt(s);
}

struct PairIndex {
  std::size_t j, k;  // constraint Tr(E_j rho_k) + gamma <= Tr(E_k rho_k)
};

class AffineProjector {
 public:
  AffineProjector(const ClassEnsemble& ensemble, std::size_t n_blocks, bool with_gap)
      : ensemble_(ensemble), n_blocks_(n_blocks), with_gap_(with_gap) {
    const std::size_t K = ensemble.class_count();
    if (with_gap_) {
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < K; ++j)
          if (j != k) pairs_.push_back({j, k});
      build_normal_matrix();
    }
  }

  const std::vector<PairIndex>& pairs() const { return pairs_; }

  // Orthogonal projection onto { sum_b E_b = I } intersected (for MaxGap)
  // with the trace-gap equalities. The two row groups are mutually
  // orthogonal, so the corrections are applied in sequence.
  void project(Iterate& v) const {
    const std::size_t q = v.blocks.front().rows();
    Matrix excess(q, q, 0.0);
    for (const auto& b : v.blocks) excess += b;
    excess -= Matrix::identity(q);
    excess *= 1.0 / static_cast<double>(n_blocks_);
    for (auto& b : v.blocks) b -= excess;

    if (!with_gap_) return;

    const std::size_t P = pairs_.size();
    Vector resid(P);
    for (std::size_t p = 0; p < P; ++p) {
      const auto& [j, k] = pairs_[p];
      const Matrix& rho_k = ensemble_.centroids[k].mat();
      resid[p] = frobenius_dot(rho_k, v.blocks[k]) - frobenius_dot(rho_k, v.blocks[j]) -
                 v.gamma - v.slacks[p];
    }
    Vector nu(P);
    chol_solve(resid, nu);
    for (std::size_t p = 0; p < P; ++p) {
      const auto& [j, k] = pairs_[p];
      Matrix corr = ensemble_.centroids[k].mat();
      corr *= nu[p];
      v.blocks[k] -= corr;
      v.blocks[j] += corr;
      v.gamma += nu[p];
      v.slacks[p] += nu[p];
    }
  }

 private:
  void build_normal_matrix() {
    const std::size_t K = ensemble_.class_count();
    Matrix gram(K, K);
    for (std::size_t a = 0; a < K; ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        const double h = frobenius_dot(ensemble_.centroids[a].mat(), ensemble_.centroids[b].mat());
        gram(a, b) = h;
        gram(b, a) = h;
      }
    const std::size_t P = pairs_.size();
    Matrix m(P, P);
    for (std::size_t p = 0; p < P; ++p) {
      const auto& [j, k] = pairs_[p];
      for (std::size_t r = 0; r < P; ++r) {
        const auto& [j2, k2] = pairs_[r];
        double coeff = 0.0;
        if (k == k2) coeff += 1.0;
        if (k == j2) coeff -= 1.0;
        if (j == k2) coeff -= 1.0;
        if (j == j2) coeff += 1.0;
        double val = coeff * gram(k, k2) + 1.0;  // +1 from the shared gamma column
        if (p == r) val += 1.0;                  // distinct slack column
        m(p, r) = val;
      }
    }
    chol_ = m;
    if (!cholesky_in_place(chol_))
      throw solver_failure("solve_povm_sdp: gap constraint system is singular");
  }

  static bool cholesky_in_place(Matrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
      double diag = a(j, j);
      for (std::size_t k = 0; k < j; ++k) diag -= a(j, k) * a(j, k);
      if (!(diag > 0.0)) return false;
      a(j, j) = std::sqrt(diag);
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = a(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
        a(i, j) = s / a(j, j);
      }
    }
    return true;
  }

  void chol_solve(const Vector& b, Vector& x) const {
    const std::size_t n = chol_.rows();
    x.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= chol_(i, k) * x[k];
      x[i] = s / chol_(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= chol_(k, ii) * x[k];
      x[ii] = s / chol_(ii, ii);
    }
  }

  const ClassEnsemble& ensemble_;
  std::size_t n_blocks_;
  bool with_gap_;
  std::vector<PairIndex> pairs_;
  Matrix chol_;
};

// Projection onto PSD^B x R (gamma free) x R+^P (slacks).
void cone_project(Iterate& v) {
  for (auto& b : v.blocks) b = psd_project(SymMatrix(b)).mat();
  for (double& s : v.slacks) s = std::max(0.0, s);
}

double min_eigenvalue(const Matrix& m) {
  EigDecomposition eig = sym_eig(SymMatrix(m));
  return eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.back();
}

// Make the blocks an exactly complete POVM: spread the completeness gap
// uniformly, then, if that pushed some block slightly indefinite, blend
// toward I/B until every block passes the PSD check again.
void restore_feasibility(std::vector<Matrix>& blocks) {
  const std::size_t B = blocks.size();
  const std::size_t q = blocks.front().rows();
  for (auto& b : blocks) b = psd_project(SymMatrix(b)).mat();

  Matrix gap = Matrix::identity(q);
  for (const auto& b : blocks) gap -= b;
  gap *= 1.0 / static_cast<double>(B);
  for (auto& b : blocks) b += gap;

  const double eig_floor = -1e-12;
  double worst = 0.0;
  for (const auto& b : blocks) worst = std::min(worst, min_eigenvalue(b));
  if (worst >= eig_floor) return;

  Matrix center = Matrix::identity(q);
  center *= 1.0 / static_cast<double>(B);
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double t = 0.5 * (lo + hi);
    double mn = 0.0;
    for (const auto& b : blocks) {
      Matrix blend = b;
      blend *= (1.0 - t);
      Matrix c = center;
      c *= t;
      blend += c;
      mn = std::min(mn, min_eigenvalue(blend));
    }
    if (mn >= eig_floor)
      hi = t;
    else
      lo = t;
  }
  for (auto& b : blocks) {
    b *= (1.0 - hi);
    Matrix c = center;
    c *= hi;
    b += c;
  }
}

double achieved_objective(const PovmSdpProblem& problem, const std::vector<Matrix>& real_blocks,
                          const std::vector<PairIndex>& pairs) {
  const ClassEnsemble& ens = problem.ensemble;
  if (problem.objective == SdpObjective::MaxPsucc) {
    double s = 0.0;
    for (std::size_t k = 0; k < ens.class_count(); ++k)
      s += ens.priors[k] * frobenius_dot(real_blocks[k], ens.centroids[k].mat());
    return s;
  }
  double gamma = 0.0;
  bool first = true;
  for (const auto& [j, k] : pairs) {
    const Matrix& rho_k = ens.centroids[k].mat();
    const double margin = frobenius_dot(rho_k, real_blocks[k]) - frobenius_dot(rho_k, real_blocks[j]);
    if (first || margin < gamma) gamma = margin;
    first = false;
  }
  return gamma;
}

}  // namespace

std::pair<Povm, SolverReport> solve_povm_sdp(const PovmSdpProblem& problem, double tol,
                                             int max_iters) {
  problem.ensemble.validate();
  if (tol < 1e-9) throw invalid_input("solve_povm_sdp: tol below 1e-9");
  if (max_iters < 1) throw invalid_input("solve_povm_sdp: max_iters < 1");

  const std::size_t K = problem.ensemble.class_count();
  const std::size_t q = problem.ensemble.dim();
  if (q > kSdpDimCap) throw resource_limit("solve_povm_sdp: block dimension above cap");

  const bool slack_block = problem.completeness == SdpCompleteness::Inequality;
  const std::size_t B = K + (slack_block ? 1 : 0);
  const bool with_gap = problem.objective == SdpObjective::MaxGap;

  AffineProjector affine(problem.ensemble, B, with_gap);
  const std::size_t P = affine.pairs().size();

  // Objective gradient, in maximization sense.
  Iterate objective = Iterate::zeros_like(B, q, P);
  if (problem.objective == SdpObjective::MaxPsucc) {
    for (std::size_t k = 0; k < K; ++k) {
      objective.blocks[k] = problem.ensemble.centroids[k].mat();
      objective.blocks[k] *= problem.ensemble.priors[k];
    }
  } else {
    objective.gamma = 1.0;
  }

  // Start from the maximally mixed measurement.
  Iterate z = Iterate::zeros_like(B, q, P);
  for (auto& b : z.blocks) b = Matrix::identity(q) * (1.0 / static_cast<double>(B));
  Iterate u = Iterate::zeros_like(B, q, P);

  const double relax = 1.6;
  double sigma = 1.0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  bool converged = false;
  int iter = 0;

  Iterate x = z;
  for (iter = 0; iter < max_iters; ++iter) {
    // x-step: affine projection of z - u + C/sigma.
    x = combine(1.0, z, -1.0, u);
    x = combine(1.0, x, 1.0 / sigma, objective);
    affine.project(x);

    // Over-relaxed cone step.
    Iterate x_hat = combine(relax, x, 1.0 - relax, z);
    Iterate z_new = combine(1.0, x_hat, 1.0, u);
    cone_project(z_new);

    // Dual update.
    u = combine(1.0, u, 1.0, x_hat);
    u = combine(1.0, u, -1.0, z_new);

    primal_res = distance(x, z_new);
    dual_res = sigma * distance(z_new, z);
    z = z_new;

    const double x_norm = x.norm();
    const double z_norm = z.norm();
    const double u_norm = sigma * u.norm();
    const double eps_pri = tol * std::max(1.0, std::max(x_norm, z_norm));
    const double eps_dual = tol * std::max(1.0, u_norm);
    if (primal_res <= eps_pri && dual_res <= eps_dual) {
      converged = true;
      ++iter;
      break;
    }

    // Residual balancing keeps the two residuals comparable; rescaling u
    // preserves the unscaled dual variable sigma * u.
    if ((iter + 1) % 64 == 0) {
      if (primal_res > 10.0 * dual_res && sigma < 1e6) {
        sigma *= 2.0;
        scale(u, 0.5);
      } else if (dual_res > 10.0 * primal_res && sigma > 1e-6) {
        sigma *= 0.5;
        scale(u, 2.0);
      }
    }
  }

  // The cone-side iterate is PSD by construction; restore completeness
  // exactly on top of it.
  std::vector<Matrix> blocks = z.blocks;
  restore_feasibility(blocks);

  Povm povm;
  povm.mode = slack_block ? CompletenessMode::Subnormalized : CompletenessMode::Exact;
  povm.elements.reserve(K);
  for (std::size_t k = 0; k < K; ++k) povm.elements.emplace_back(SymMatrix(blocks[k]));

  SolverReport report;
  report.iterations = iter;
  report.primal_residual = primal_res;
  report.converged = converged;
  report.objective_value =
      achieved_objective(problem, blocks, affine.pairs());

  double violation = std::max(0.0, -povm.min_element_eigenvalue());
  violation = std::max(violation, povm.completeness_residual());
  report.constraint_violation = violation;
  if (violation > tol)
    throw solver_failure("solve_povm_sdp: restored measurement still infeasible");
  return {std::move(povm), report};
}

}  // namespace qdc
