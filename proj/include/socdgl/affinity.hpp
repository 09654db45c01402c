#pragma once

#include "socdgl/types.hpp"

#include <vector>

namespace socdgl {

struct AdmmConfig {
  double beta1 = 0.1;    // nuclear-norm weight
  double beta2 = 0.1;    // sparsity weight
  double lambda = 1.0;   // consensus weight
  double mu0 = 0.01;     // initial penalty
  double rho = 1.3;      // penalty growth factor, > 1
  double mu_max = 1e6;
  double epsilon = 1e-6;
  int max_iter = 100;

  void validate() const;
};

// Per-view stacks. lam1 holds the data-fit multipliers (v_i x n, feature
// space); the others are n x n like the auxiliary matrices.
struct AdmmState {
  std::vector<Matrix> A, C1, C2, C3;
  std::vector<Matrix> lam1, lam2, lam3, lam4;
  double mu = 0.0;
  int iter = 0;

  static AdmmState zeros(const std::vector<FeatureView>& views, const AdmmConfig& cfg);
};

struct AdmmErrors {
  double err1 = 0.0;  // max |A - C1|
  double err2 = 0.0;  // max |A - C2|
  double err3 = 0.0;  // max |A - C3|
  double err4 = 0.0;  // max |A - A_prev|

  double max() const;
  bool below(double eps) const { return max() < eps; }
};

// Elementwise shrink-toward-zero by tau.
Matrix soft_threshold(const Matrix& m, double tau);

// Singular value thresholding: U max(S - tau, 0) V^T.
Matrix svt(const Matrix& m, double tau);

// One full sweep over all views (A, C1, C2, C3, multipliers, in order),
// followed by the error computation and the mu update. Returns the errors of
// this sweep; converged means all four fell below cfg.epsilon.
struct SweepResult {
  bool converged = false;
  AdmmErrors errors;
};
SweepResult admm_iterate(AdmmState& state, const std::vector<FeatureView>& views,
                         const AdmmConfig& cfg);

struct MultiviewResult {
  AffinityMatrix affinity;
  int iterations = 0;
  bool converged = false;
  AdmmErrors final_errors;
};

// Full pairwise multi-view learning: zero-initialized ADMM iterated to
// convergence or cfg.max_iter, then the C2 average is symmetrized with
// |C_avg| + |C_avg^T| and min-max normalized.
MultiviewResult run_multiview(const std::vector<FeatureView>& views,
                              const AdmmConfig& cfg);

}  // namespace socdgl
