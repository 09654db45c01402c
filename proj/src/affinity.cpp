#include "socdgl/affinity.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace socdgl {

void AdmmConfig::validate() const {
  if (beta1 <= 0 || beta2 <= 0 || lambda <= 0 || mu0 <= 0 || mu_max <= 0)
    throw io_error("admm weights must be positive");
  if (rho <= 1.0) throw io_error("admm rho must exceed 1");
  if (epsilon <= 0) throw io_error("admm epsilon must be positive");
  if (max_iter < 1) throw io_error("admm max_iter must be >= 1");
  if (mu0 > mu_max) throw io_error("admm mu0 exceeds mu_max");
}

AdmmState AdmmState::zeros(const std::vector<FeatureView>& views,
                           const AdmmConfig& cfg) {
  if (views.empty()) throw io_error("multi-view learning needs at least one view");
  const int n = views.front().entities();
  for (const auto& v : views)
    if (v.entities() != n)
      throw io_error("views disagree on entity count");
  AdmmState s;
  const auto zn = Matrix::Zero(n, n);
  for (const auto& v : views) {
    s.A.push_back(zn);
    s.C1.push_back(zn);
    s.C2.push_back(zn);
    s.C3.push_back(zn);
    s.lam1.push_back(Matrix::Zero(v.dim(), n));
    s.lam2.push_back(zn);
    s.lam3.push_back(zn);
    s.lam4.push_back(zn);
  }
  s.mu = cfg.mu0;
  s.iter = 0;
  return s;
}

double AdmmErrors::max() const {
  return std::max(std::max(err1, err2), std::max(err3, err4));
}

Matrix soft_threshold(const Matrix& m, double tau) {
  if (tau < 0) throw io_error("soft_threshold tau must be nonnegative");
  return m.unaryExpr([tau](double x) {
    return std::max(x - tau, 0.0) + std::min(x + tau, 0.0);
  });
}

Matrix svt(const Matrix& m, double tau) {
  if (tau < 0) throw io_error("svt tau must be nonnegative");
  if (!m.allFinite()) throw numerical_error("svt input has non-finite entries");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector s = svd.singularValues();
  for (int i = 0; i < s.size(); ++i) s(i) = std::max(s(i) - tau, 0.0);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

namespace {

// K_i = Y_i^T Y_i and the factorization of (K_i + 3I) are constant across
// sweeps; cached per run.
struct Workspace {
  std::vector<Matrix> K;
  std::vector<Eigen::LLT<Matrix>> solver;

  explicit Workspace(const std::vector<FeatureView>& views) {
    const int n = views.front().entities();
    const Matrix eye3 = 3.0 * Matrix::Identity(n, n);
    for (const auto& v : views) {
      K.push_back(v.values.transpose() * v.values);
      solver.emplace_back(K.back() + eye3);
      if (solver.back().info() != Eigen::Success)
        throw numerical_error("factorization of K + 3I failed");
    }
  }
};

SweepResult sweep(AdmmState& s, const std::vector<FeatureView>& views,
                  const AdmmConfig& cfg, const Workspace& ws) {
  const int v = static_cast<int>(views.size());
  const double mu = s.mu;
  const std::vector<Matrix> a_prev = s.A;

  for (int i = 0; i < v; ++i) {
    const Matrix& Y = views[i].values;

    // A update: the derivation-consistent solve of the augmented Lagrangian
    // stationarity condition, mu (K + 3I) A = mu (K + C1 + C2 + C3)
    // - (lam2 + lam3 + lam4) + Y^T lam1.
    Matrix rhs = mu * (ws.K[i] + s.C1[i] + s.C2[i] + s.C3[i]) -
                 (s.lam2[i] + s.lam3[i] + s.lam4[i]) + Y.transpose() * s.lam1[i];
    s.A[i] = ws.solver[i].solve(rhs / mu);

    // C1: nuclear-norm proximal step.
    s.C1[i] = svt(s.A[i] + s.lam3[i] / mu, cfg.beta1 / mu);

    // C2: sparsity proximal step.
    s.C2[i] = soft_threshold(s.A[i] + s.lam2[i] / mu, cfg.beta2 / mu);

    // C3: consensus with the other views' C2 (in-place, so earlier views in
    // this sweep already contribute their fresh values).
    Matrix c_sum = Matrix::Zero(s.A[i].rows(), s.A[i].cols());
    for (int j = 0; j < v; ++j)
      if (j != i) c_sum += s.C2[j];
    // Stationarity of the pairwise coupling: the c_sum weight is 2*lambda and
    // the denominator carries the (v - 1) pair count.
    const double pair_w = 2.0 * cfg.lambda;
    s.C3[i] = (pair_w * c_sum + mu * s.A[i] + s.lam4[i]) /
              (pair_w * (v - 1) + mu);

    // Multipliers.
    s.lam1[i] += mu * (Y - Y * s.A[i]);
    s.lam2[i] += mu * (s.A[i] - s.C2[i]);
    s.lam3[i] += mu * (s.A[i] - s.C1[i]);
    s.lam4[i] += mu * (s.A[i] - s.C3[i]);

    if (!s.A[i].allFinite() || !s.C1[i].allFinite() || !s.C2[i].allFinite() ||
        !s.C3[i].allFinite())
      throw numerical_error("divergence in multi-view sweep at view " +
                            std::to_string(i));
  }

  SweepResult r;
  for (int i = 0; i < v; ++i) {
    r.errors.err1 = std::max(r.errors.err1, (s.A[i] - s.C1[i]).cwiseAbs().maxCoeff());
    r.errors.err2 = std::max(r.errors.err2, (s.A[i] - s.C2[i]).cwiseAbs().maxCoeff());
    r.errors.err3 = std::max(r.errors.err3, (s.A[i] - s.C3[i]).cwiseAbs().maxCoeff());
    r.errors.err4 = std::max(r.errors.err4, (s.A[i] - a_prev[i]).cwiseAbs().maxCoeff());
  }
  r.converged = r.errors.below(cfg.epsilon);

  s.mu = std::min(cfg.rho * s.mu, cfg.mu_max);
  ++s.iter;
  return r;
}

}  // namespace

SweepResult admm_iterate(AdmmState& state, const std::vector<FeatureView>& views,
                         const AdmmConfig& cfg) {
  cfg.validate();
  Workspace ws(views);
  return sweep(state, views, cfg, ws);
}

MultiviewResult run_multiview(const std::vector<FeatureView>& views,
                              const AdmmConfig& cfg) {
  cfg.validate();
  for (const auto& view : views)
    if (!view.values.allFinite())
      throw io_error("feature view has non-finite entries");

  AdmmState state = AdmmState::zeros(views, cfg);
  Workspace ws(views);

  MultiviewResult out;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const SweepResult r = sweep(state, views, cfg, ws);
    out.final_errors = r.errors;
    out.iterations = state.iter;
    if (r.converged) {
      out.converged = true;
      break;
    }
  }

  const int v = static_cast<int>(views.size());
  const int n = views.front().entities();
  Matrix c_avg = Matrix::Zero(n, n);
  for (const auto& c2 : state.C2) c_avg += c2;
  c_avg /= static_cast<double>(v);

  Matrix raw = c_avg.cwiseAbs() + c_avg.transpose().cwiseAbs();

  AffinityMatrix aff;
  aff.kind = views.front().entity_kind;
  const double lo = raw.minCoeff();
  const double hi = raw.maxCoeff();
  if (hi - lo <= 0.0) {
    aff.values = Matrix::Zero(n, n);
    aff.degenerate = true;
  } else {
    aff.values = (raw.array() - lo) / (hi - lo);
  }
  out.affinity = std::move(aff);
  return out;
}

}  // namespace socdgl
