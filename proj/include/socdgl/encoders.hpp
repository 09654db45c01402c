#pragma once

#include "socdgl/graphs.hpp"
#include "socdgl/types.hpp"

#include <vector>

namespace socdgl {

enum class Activation { relu, identity };

Activation activation_from_string(const std::string& name);
Matrix apply_activation(const Matrix& m, Activation act);

struct GcnParams {
  std::vector<Matrix> weights;           // layer l: d_in x d_out
  Activation hidden_act = Activation::relu;
  Activation final_act = Activation::identity;
};

// One graph convolution: activation(G_norm * Hl * W).
Matrix gcn_layer(const Matrix& hl, const Matrix& g_norm, const Matrix& w,
                 Activation act);

// Stacked convolution over the global graph, H^(0) = H. Rows 0..n_d-1 of the
// result are the drug embeddings, the rest the target embeddings.
Matrix adgl_forward(const GlobalGraph& graph, const GcnParams& params);

struct EdglParams {
  Matrix w0, w1;
  Vector b0, b1;
  Activation act = Activation::relu;
};

// Two affine+activation stages.
Matrix mlp2(const Matrix& x0, const EdglParams& params);

enum class FilterParity { even, odd };

FilterParity parity_from_string(const std::string& name);
const char* to_string(FilterParity p);

struct FilterConfig {
  int k = 200;           // total iteration bound
  double alpha = 0.20;   // restart weight in (0,1)
  FilterParity parity = FilterParity::even;

  void validate() const;
};

// Even-walk filter: sum_{k=0..floor(K/2)} alpha (1-alpha)^k P^{2k} X, built
// by repeated two-step propagation (powers of P are never materialized).
Matrix even_filter(const Matrix& x_hat, const Matrix& p, const FilterConfig& cfg);

// Odd-walk variant: exponents 1, 3, ..., sum_{k=0..floor(K/2)-1} alpha_k P^{2k+1} X.
Matrix odd_filter(const Matrix& x_hat, const Matrix& p, const FilterConfig& cfg);

struct AttentionParams {
  Matrix wq, wk, wv;  // d x d_k
};

// Row-wise softmax with max subtraction.
Matrix row_softmax(const Matrix& logits);

// Scaled dot-product self-attention over node embeddings.
Matrix self_attention(const Matrix& h_prime, const AttentionParams& params);

}  // namespace socdgl
