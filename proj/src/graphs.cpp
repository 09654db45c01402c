#include "socdgl/graphs.hpp"

#include <cmath>

namespace socdgl {

Matrix binarize_affinity(const Matrix& a, double threshold) {
  if (threshold < 0.0 || threshold > 1.0)
    throw io_error("binarization threshold must lie in [0,1]");
  return (a.array() >= threshold).cast<double>();
}

Matrix sym_normalize(const Matrix& m) {
  if (m.rows() != m.cols()) throw io_error("sym_normalize expects a square matrix");
  if ((m.array() < 0.0).any())
    throw io_error("sym_normalize expects nonnegative entries");
  Vector d_inv_sqrt = m.rowwise().sum();
  for (int i = 0; i < d_inv_sqrt.size(); ++i)
    d_inv_sqrt(i) = d_inv_sqrt(i) > 0.0 ? 1.0 / std::sqrt(d_inv_sqrt(i)) : 0.0;
  return d_inv_sqrt.asDiagonal() * m * d_inv_sqrt.asDiagonal();
}

Matrix build_propagation(const Matrix& g_prime, int n_d, int n_t) {
  if (g_prime.rows() != n_d + n_t || g_prime.cols() != n_d + n_t)
    throw io_error("build_propagation dimension mismatch");
  Matrix a_prime = g_prime;
  a_prime.topLeftCorner(n_d, n_d).setZero();
  a_prime.bottomRightCorner(n_t, n_t).setZero();
  return sym_normalize(a_prime);
}

GlobalGraph assemble_global(const AffinityMatrix& a_dd, const AffinityMatrix& a_tt,
                            const Matrix& a_dt, double threshold) {
  const int n_d = a_dd.n();
  const int n_t = a_tt.n();
  if (a_dt.rows() != n_d || a_dt.cols() != n_t)
    throw io_error("assemble_global dimension mismatch: A_DT is " +
                   std::to_string(a_dt.rows()) + "x" + std::to_string(a_dt.cols()) +
                   ", expected " + std::to_string(n_d) + "x" + std::to_string(n_t));

  GlobalGraph g;
  g.n_d = n_d;
  g.n_t = n_t;
  const int n = n_d + n_t;

  g.H.resize(n, n);
  g.H.topLeftCorner(n_d, n_d) = a_dd.values;
  g.H.topRightCorner(n_d, n_t) = a_dt;
  g.H.bottomLeftCorner(n_t, n_d) = a_dt.transpose();
  g.H.bottomRightCorner(n_t, n_t) = a_tt.values;

  g.G = g.H;
  g.G.topLeftCorner(n_d, n_d) = binarize_affinity(a_dd.values, threshold);
  g.G.bottomRightCorner(n_t, n_t) = binarize_affinity(a_tt.values, threshold);

  g.G_norm = sym_normalize(g.G);
  g.P = build_propagation(g.G_norm, n_d, n_t);
  return g;
}

}  // namespace socdgl
