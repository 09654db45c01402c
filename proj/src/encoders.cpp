#include "socdgl/encoders.hpp"

#include <cmath>

namespace socdgl {

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "identity") return Activation::identity;
  throw io_error("unknown activation: " + name);
}

Matrix apply_activation(const Matrix& m, Activation act) {
  switch (act) {
    case Activation::relu:
      return m.cwiseMax(0.0);
    case Activation::identity:
      return m;
  }
  throw io_error("unhandled activation");
}

Matrix gcn_layer(const Matrix& hl, const Matrix& g_norm, const Matrix& w,
                 Activation act) {
  if (g_norm.cols() != hl.rows() || hl.cols() != w.rows())
    throw io_error("gcn_layer shape mismatch");
  Matrix out = apply_activation(g_norm * hl * w, act);
  if (!out.allFinite()) throw numerical_error("gcn_layer produced non-finite values");
  return out;
}

Matrix adgl_forward(const GlobalGraph& graph, const GcnParams& params) {
  if (params.weights.empty()) throw io_error("adgl_forward needs at least one layer");
  Matrix h = graph.H;
  const int layers = static_cast<int>(params.weights.size());
  for (int l = 0; l < layers; ++l) {
    const Activation act = (l + 1 == layers) ? params.final_act : params.hidden_act;
    h = gcn_layer(h, graph.G_norm, params.weights[l], act);
  }
  return h;
}

Matrix mlp2(const Matrix& x0, const EdglParams& params) {
  if (x0.cols() != params.w0.rows() || params.w0.cols() != params.b0.size() ||
      params.w0.cols() != params.w1.rows() || params.w1.cols() != params.b1.size())
    throw io_error("mlp2 shape mismatch");
  Matrix x1 = apply_activation((x0 * params.w0).rowwise() + params.b0.transpose(),
                               params.act);
  return apply_activation((x1 * params.w1).rowwise() + params.b1.transpose(),
                          params.act);
}

FilterParity parity_from_string(const std::string& name) {
  if (name == "even") return FilterParity::even;
  if (name == "odd") return FilterParity::odd;
  throw io_error("unknown filter parity: " + name);
}

const char* to_string(FilterParity p) {
  return p == FilterParity::even ? "even" : "odd";
}

void FilterConfig::validate() const {
  if (alpha <= 0.0 || alpha >= 1.0) throw io_error("filter alpha must be in (0,1)");
  if (k < 2) throw io_error("filter K must be >= 2");
}

namespace {

Matrix run_filter(const Matrix& x_hat, const Matrix& p, const FilterConfig& cfg,
                  bool odd) {
  cfg.validate();
  if (p.rows() != p.cols() || p.cols() != x_hat.rows())
    throw io_error("filter shape mismatch");
  const int half = cfg.k / 2;
  const int terms = odd ? half : half + 1;  // even: k=0..half, odd: k=0..half-1
  Matrix z = odd ? Matrix(p * x_hat) : x_hat;
  Matrix y = cfg.alpha * z;
  double coef = cfg.alpha;
  for (int k = 1; k < terms; ++k) {
    z = p * (p * z);
    coef *= 1.0 - cfg.alpha;
    y += coef * z;
  }
  if (!y.allFinite()) throw numerical_error("graph filter accumulation diverged");
  return y;
}

}  // namespace

Matrix even_filter(const Matrix& x_hat, const Matrix& p, const FilterConfig& cfg) {
  return run_filter(x_hat, p, cfg, false);
}

Matrix odd_filter(const Matrix& x_hat, const Matrix& p, const FilterConfig& cfg) {
  return run_filter(x_hat, p, cfg, true);
}

Matrix row_softmax(const Matrix& logits) {
  Matrix out = logits;
  for (int i = 0; i < out.rows(); ++i) {
    Eigen::RowVectorXd row = out.row(i);
    row.array() -= row.maxCoeff();
    row = row.array().exp();
    out.row(i) = row / row.sum();
  }
  return out;
}

Matrix self_attention(const Matrix& h_prime, const AttentionParams& params) {
  if (h_prime.cols() != params.wq.rows() || h_prime.cols() != params.wk.rows() ||
      h_prime.cols() != params.wv.rows() ||
      params.wq.cols() != params.wk.cols())
    throw io_error("self_attention shape mismatch");
  const Matrix q = h_prime * params.wq;
  const Matrix k = h_prime * params.wk;
  const Matrix v = h_prime * params.wv;
  const Matrix logits =
      q * k.transpose() / std::sqrt(static_cast<double>(params.wk.cols()));
  return row_softmax(logits) * v;
}

}  // namespace socdgl
