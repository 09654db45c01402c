#pragma once

#include "socdgl/types.hpp"

namespace socdgl {

// Affinity-enhanced global drug-target network. H carries raw affinities in
// all four blocks; G binarizes the diagonal (similarity) blocks; G_norm is
// the symmetric normalization of G; P is the propagation matrix, a
// re-normalized bipartite matrix whose diagonal blocks are exactly zero.
struct GlobalGraph {
  Matrix H;
  Matrix G;
  Matrix G_norm;
  Matrix P;
  int n_d = 0;
  int n_t = 0;

  int n() const { return n_d + n_t; }
};

// Entry 1 where a >= threshold, else 0 (boundary included).
Matrix binarize_affinity(const Matrix& a, double threshold);

// D^{-1/2} M D^{-1/2} with D = diag(row sums). Rows with zero degree stay
// zero (their D^{-1/2} entry is defined as 0). Throws on negative entries.
Matrix sym_normalize(const Matrix& m);

// Zeroes both diagonal blocks of g_prime and re-normalizes with the degree
// matrix of the result: P = D'^{-1/2} A' D'^{-1/2}.
Matrix build_propagation(const Matrix& g_prime, int n_d, int n_t);

GlobalGraph assemble_global(const AffinityMatrix& a_dd, const AffinityMatrix& a_tt,
                            const Matrix& a_dt, double threshold);

}  // namespace socdgl
