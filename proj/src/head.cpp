#include "socdgl/head.hpp"

#include <cmath>

namespace socdgl {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix fuse(const Matrix& h_prime, const Matrix& h_dprime, double omega) {
  if (omega < 0.0 || omega > 1.0) throw io_error("fusion omega must lie in [0,1]");
  if (h_prime.rows() != h_dprime.rows() || h_prime.cols() != h_dprime.cols())
    throw io_error("fuse shape mismatch");
  return omega * h_prime + (1.0 - omega) * h_dprime;
}

Matrix decode(const Matrix& h_hat_d, const Matrix& h_hat_t, const Matrix& wl) {
  if (h_hat_d.cols() != wl.rows() || wl.cols() != h_hat_t.cols())
    throw io_error("decode shape mismatch");
  Matrix logits = h_hat_d * wl * h_hat_t.transpose();
  return logits.unaryExpr([](double x) { return sigmoid(x); });
}

}  // namespace socdgl
