#pragma once

#include "socdgl/types.hpp"

namespace socdgl {

struct HeadParams {
  double omega = 0.5;  // fusion weight in [0,1]; not trained
  Matrix wl;           // decoder bilinear form, m x m
};

// Residual fusion omega * H' + (1 - omega) * H''.
Matrix fuse(const Matrix& h_prime, const Matrix& h_dprime, double omega);

// Tri-factorization decoder sigmoid(H_D * W^L * H_T^T); entries in (0,1).
Matrix decode(const Matrix& h_hat_d, const Matrix& h_hat_t, const Matrix& wl);

double sigmoid(double x);

}  // namespace socdgl
