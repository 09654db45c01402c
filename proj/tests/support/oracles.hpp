#pragma once

#include "socdgl/types.hpp"

#include <vector>

namespace socdgl::test {

// Spectral SVT oracle: embeds M in the symmetric block matrix
// [[0, M], [M^T, 0]], eigendecomposes it, applies the odd shrink
// f(s) = sign(s) * max(|s| - tau, 0) to the eigenvalues and reads the
// shrunk M back out of the top-right block. Shares no code path with the
// SVD-based implementation.
Matrix svt_eigen_oracle(const Matrix& m, double tau);

// Dense matrix-power filter oracles: explicit sums of alpha (1-alpha)^k P^e
// with e = 2k (even) or e = 2k+1 (odd), using materialized powers.
Matrix even_filter_power_oracle(const Matrix& x, const Matrix& p, int k,
                                double alpha);
Matrix odd_filter_power_oracle(const Matrix& x, const Matrix& p, int k,
                               double alpha);

// Pair-counting AUROC: average over all positive-negative pairs of
// 1/0.5/0 for win/tie/loss.
double auroc_pair_oracle(const std::vector<double>& scores,
                         const std::vector<int>& labels);

// Average precision by explicit precision recount at every positive rank.
double aupr_recount_oracle(const std::vector<double>& scores,
                           const std::vector<int>& labels);

struct ConfusionOracle {
  long long tp = 0, fp = 0, tn = 0, fn = 0;
};
ConfusionOracle confusion_counts(const std::vector<double>& scores,
                                 const std::vector<int>& labels,
                                 double threshold);

// Central finite difference of f at x with step h.
template <typename F>
double central_diff(F&& f, double& x, double h) {
  const double saved = x;
  x = saved + h;
  const double up = f();
  x = saved - h;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * h);
}

}  // namespace socdgl::test
