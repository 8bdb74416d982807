#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qdc/matrix.hpp"
#include "qdc/quantum.hpp"

namespace qdc {

enum class SdpObjective {
  MaxPsucc,  // maximize sum_k p_k Tr(E_k rho_k)
  MaxGap,    // maximize gamma subject to Tr(E_j rho_k) + gamma <= Tr(E_k rho_k)
};

enum class SdpCompleteness {
  Equality,    // sum E_k = I
  Inequality,  // sum E_k <= I (an extra, discarded outcome absorbs the rest)
};

struct PovmSdpProblem {
  SdpObjective objective = SdpObjective::MaxPsucc;
  SdpCompleteness completeness = SdpCompleteness::Equality;
  ClassEnsemble ensemble;
};

struct SolverReport {
  double objective_value = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double constraint_violation = 0.0;
  bool converged = false;
};

inline constexpr double kDefaultSdpTol = 1e-6;
inline constexpr int kDefaultSdpMaxIters = 50000;
// Per-block dimension cap; larger problems are refused up front instead of
// grinding for hours.
inline constexpr std::size_t kSdpDimCap = 256;

// First-order conic solver: alternating-direction splitting between the
// affine set (objective-shifted completeness + gap equalities) and the
// product of PSD cones, over-relaxation 1.6, stop when scaled primal and
// dual residuals fall below tol. The returned POVM is made exactly
// feasible by a final restoration step, and objective_value is evaluated
// on that restored measurement (so it never overshoots the true optimum).
std::pair<Povm, SolverReport> solve_povm_sdp(const PovmSdpProblem& problem,
                                             double tol = kDefaultSdpTol,
                                             int max_iters = kDefaultSdpMaxIters);

struct BoxGapLpSolution {
  std::vector<Vector> weights;  // beta_k, one per class
  double gamma = 0.0;
  SolverReport report;
};

// maximize gamma  s.t.  |beta_k|_inf <= bound,
//                       beta_j . c_k + gamma <= beta_k . c_k  (j != k).
// Dense revised simplex on the standard-form conversion, with Bland's
// anti-cycling pivot rule throughout.
BoxGapLpSolution solve_box_gap_lp(const std::vector<Vector>& class_centroids,
                                  double bound, double tol = 1e-9);

}  // namespace qdc
