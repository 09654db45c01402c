#include "socdgl/affinity.hpp"

#include "socdgl/rng.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>
#include <vector>

using namespace socdgl;

namespace {

Matrix random_square(std::uint64_t seed, int n) {
  Rng rng(seed);
  return test::random_matrix(rng, n, n);
}

std::vector<FeatureView> zero_views(int v, int dim, int n) {
  std::vector<FeatureView> views;
  for (int i = 0; i < v; ++i)
    views.push_back(FeatureView{EntityKind::drug, Matrix::Zero(dim, n)});
  return views;
}

double nuclear_norm(const Matrix& m) {
  return Eigen::BDCSVD<Matrix>(m).singularValues().sum();
}

int numeric_rank(const Matrix& m, double tol) {
  const Vector s = Eigen::BDCSVD<Matrix>(m).singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++r;
  return r;
}

// Test config that pairs with the two-block synthetic data: stronger
// low-rank pull, lighter sparsity.
AdmmConfig block_config() {
  AdmmConfig cfg;
  cfg.beta1 = 1.0;
  cfg.beta2 = 0.01;
  return cfg;
}

}  // namespace

TEST_CASE("soft_threshold shrinks toward zero") {
  Matrix m(2, 2);
  m << 0.5, -0.5, 0.1, 0.0;
  const Matrix out = soft_threshold(m, 0.2);
  CHECK(out(0, 0) == doctest::Approx(0.3));
  CHECK(out(0, 1) == doctest::Approx(-0.3));
  CHECK(out(1, 0) == 0.0);  // dead zone
  CHECK(out(1, 1) == 0.0);
}

TEST_CASE("soft_threshold dead zone covers |x| <= tau") {
  Matrix m(1, 3);
  m << 0.2, -0.2, 0.1999;
  const Matrix out = soft_threshold(m, 0.2);
  CHECK(out.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("soft_threshold with tau zero is the identity") {
  const Matrix m = random_square(3, 5);
  CHECK((soft_threshold(m, 0.0) - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("soft_threshold is odd and contractive") {
  const Matrix m = random_square(4, 6);
  const Matrix pos = soft_threshold(m, 0.3);
  const Matrix neg = soft_threshold(-m, 0.3);
  CHECK((pos + neg).cwiseAbs().maxCoeff() == 0.0);
  CHECK(((m.cwiseAbs() - pos.cwiseAbs()).array() >= -1e-15).all());
}

TEST_CASE("svt on a diagonal matrix shrinks singular values") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 3.0;
  m(1, 1) = 1.0;
  const Matrix out = svt(m, 2.0);
  CHECK(out(0, 0) == doctest::Approx(1.0));
  CHECK(out(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(out(0, 1)) < 1e-12);
  CHECK(std::abs(out(1, 0)) < 1e-12);
}

TEST_CASE("svt with tau zero reconstructs the input") {
  const Matrix m = random_square(5, 6);
  CHECK((svt(m, 0.0) - m).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("svt matches the spectral oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix m = random_square(seed, 6);
    const Matrix got = svt(m, 0.5);
    const Matrix want = test::svt_eigen_oracle(m, 0.5);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("svt lowers the nuclear norm and the rank") {
  const Matrix m = random_square(8, 6);
  const Matrix out = svt(m, 0.8);
  CHECK(nuclear_norm(out) <= nuclear_norm(m) + 1e-12);
  CHECK(numeric_rank(out, 1e-10) <= numeric_rank(m, 1e-10));
  // A tau above the largest singular value annihilates everything.
  const double top = Eigen::BDCSVD<Matrix>(m).singularValues()(0);
  CHECK(svt(m, top + 1.0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("admm fixed point reports zero errors and converges") {
  // All-zero data keeps the zero state stationary: A = C1 = C2 = C3 = 0 and
  // A is unchanged between sweeps, so all four errors vanish.
  AdmmConfig cfg;
  for (int v : {1, 3}) {
    const auto views = zero_views(v, 4, 5);
    AdmmState state = AdmmState::zeros(views, cfg);
    const SweepResult r = admm_iterate(state, views, cfg);
    CHECK(r.converged);
    CHECK(r.errors.err1 == 0.0);
    CHECK(r.errors.err2 == 0.0);
    CHECK(r.errors.err3 == 0.0);
    CHECK(r.errors.err4 == 0.0);
    for (int i = 0; i < v; ++i) {
      CHECK(state.A[i].cwiseAbs().maxCoeff() == 0.0);
      CHECK(state.C3[i].cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("admm penalty grows by rho and caps at mu_max") {
  AdmmConfig cfg;
  cfg.mu0 = 1.0;
  cfg.rho = 1.1;
  cfg.mu_max = 1e6;
  const auto views = zero_views(1, 3, 4);
  AdmmState state = AdmmState::zeros(views, cfg);
  CHECK(state.mu == 1.0);
  admm_iterate(state, views, cfg);
  CHECK(state.mu == doctest::Approx(1.1));

  cfg.mu_max = 1.15;
  AdmmState capped = AdmmState::zeros(views, cfg);
  admm_iterate(capped, views, cfg);
  admm_iterate(capped, views, cfg);
  CHECK(capped.mu == doctest::Approx(1.15));
}

TEST_CASE("admm penalty is nondecreasing on real data") {
  const auto views = test::make_two_block_views(10, 2, 0.0, 3);
  const AdmmConfig cfg = block_config();
  AdmmState state = AdmmState::zeros(views, cfg);
  double prev = state.mu;
  for (int i = 0; i < 10; ++i) {
    admm_iterate(state, views, cfg);
    CHECK(state.mu >= prev);
    CHECK(state.mu <= cfg.mu_max);
    prev = state.mu;
  }
}

TEST_CASE("admm config validation rejects bad values") {
  AdmmConfig cfg;
  cfg.beta1 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), io_error);
  cfg = AdmmConfig{};
  cfg.rho = 1.0;
  CHECK_THROWS_AS(cfg.validate(), io_error);
  cfg = AdmmConfig{};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), io_error);
  CHECK_NOTHROW(AdmmConfig{}.validate());
}

TEST_CASE("run_multiview output is symmetric and in the unit interval") {
  const auto views = test::make_two_block_views(12, 3, 0.0, 42);
  const MultiviewResult r = run_multiview(views, block_config());
  const Matrix& a = r.affinity.values;
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(a.minCoeff() >= 0.0);
  CHECK(a.maxCoeff() <= 1.0);
}

TEST_CASE("run_multiview is deterministic") {
  const auto views = test::make_two_block_views(10, 2, 0.0, 9);
  const AdmmConfig cfg = block_config();
  const MultiviewResult a = run_multiview(views, cfg);
  const MultiviewResult b = run_multiview(views, cfg);
  CHECK(a.iterations == b.iterations);
  CHECK((a.affinity.values - b.affinity.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("run_multiview commutes with entity permutation") {
  const int n = 10;
  auto views = test::make_two_block_views(n, 2, 0.0, 17);
  const AdmmConfig cfg = block_config();
  const Matrix base = run_multiview(views, cfg).affinity.values;

  // Reverse the entity order in every view.
  std::vector<FeatureView> permuted = views;
  for (auto& view : permuted) {
    Matrix flipped = view.values;
    for (int e = 0; e < n; ++e) flipped.col(e) = view.values.col(n - 1 - e);
    view.values = flipped;
  }
  const Matrix perm = run_multiview(permuted, cfg).affinity.values;
  double diff = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      diff = std::max(diff, std::abs(perm(i, j) - base(n - 1 - i, n - 1 - j)));
  CHECK(diff < 1e-6);
}

TEST_CASE("identical entities get matching affinity profiles") {
  auto views = test::make_two_block_views(10, 2, 0.0, 23);
  for (auto& view : views) view.values.col(1) = view.values.col(0);
  const MultiviewResult r = run_multiview(views, block_config());
  REQUIRE_FALSE(r.affinity.degenerate);
  const Matrix& a = r.affinity.values;
  // Swapping the two identical columns is a no-op, so the affinity must be
  // invariant under the swap of indices 0 and 1.
  CHECK(std::abs(a(0, 0) - a(1, 1)) < 1e-6);
  for (int k = 2; k < 10; ++k) {
    CHECK(std::abs(a(0, k) - a(1, k)) < 1e-6);
    CHECK(std::abs(a(k, 0) - a(k, 1)) < 1e-6);
  }
}

TEST_CASE("two-block data converges and separates the blocks") {
  const int n = 20;
  const auto views = test::make_two_block_views(n, 3, 0.0, 42);
  const MultiviewResult r = run_multiview(views, block_config());
  REQUIRE(r.converged);
  CHECK(r.iterations <= 100);
  CHECK(r.final_errors.max() < 1e-6);

  const Matrix& a = r.affinity.values;
  const int half = n / 2;
  double within = 0.0, cross = 0.0;
  int nw = 0, nc = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool same = (i < half) == (j < half);
      (same ? within : cross) += a(i, j);
      (same ? nw : nc) += 1;
    }
  within /= nw;
  cross /= nc;
  CHECK(within - cross >= 0.1);
}

TEST_CASE("extreme sparsity weight collapses the affinity to zero") {
  const auto views = test::make_two_block_views(8, 2, 0.0, 5);
  AdmmConfig cfg;
  cfg.beta2 = 1e6;
  // Cap mu so beta2 / mu stays overwhelming for every sweep.
  cfg.mu_max = 100.0;
  const MultiviewResult r = run_multiview(views, cfg);
  CHECK(r.affinity.degenerate);
  CHECK(r.affinity.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("run_multiview rejects inconsistent views") {
  std::vector<FeatureView> views;
  views.push_back(FeatureView{EntityKind::drug, Matrix::Zero(3, 4)});
  views.push_back(FeatureView{EntityKind::drug, Matrix::Zero(3, 5)});
  CHECK_THROWS_AS(run_multiview(views, AdmmConfig{}), io_error);
  CHECK_THROWS_AS(run_multiview({}, AdmmConfig{}), io_error);
}
