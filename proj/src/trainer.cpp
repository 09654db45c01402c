#include "socdgl/trainer.hpp"

#include "socdgl/rng.hpp"
#include "socdgl/tsv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <utility>

namespace socdgl {

namespace fs = std::filesystem;
using nlohmann::json;

Variant variant_from_string(const std::string& name) {
  if (name == "even") return Variant::even;
  if (name == "odd") return Variant::odd;
  if (name == "attention") return Variant::attention;
  if (name == "adgl_only") return Variant::adgl_only;
  if (name == "edgl_only") return Variant::edgl_only;
  if (name == "no_fusion") return Variant::no_fusion;
  throw io_error("unknown variant: " + name);
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::even: return "even";
    case Variant::odd: return "odd";
    case Variant::attention: return "attention";
    case Variant::adgl_only: return "adgl_only";
    case Variant::edgl_only: return "edgl_only";
    case Variant::no_fusion: return "no_fusion";
  }
  return "even";
}

void TrainConfig::validate() const {
  if (epochs < 0) throw io_error("train epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw io_error("learning rate must be positive");
  if (optimizer != "adam" && optimizer != "sgd")
    throw io_error("unknown optimizer: " + optimizer);
  loss.validate();
  if (fusion_omega < 0.0 || fusion_omega > 1.0)
    throw io_error("fusion omega must be in [0,1]");
  filter.validate();
  if (gcn_layers < 1) throw io_error("gcn layer count must be >= 1");
  if (gcn_hidden < 1 || embed_dim < 1 || edgl_hidden < 1)
    throw io_error("layer widths must be >= 1");
  if (early_stop_patience < 1) throw io_error("early stop patience must be >= 1");
  if (early_stop_min_delta < 0.0)
    throw io_error("early stop min delta must be >= 0");
}

namespace {

bool uses_gcn(Variant v) { return v != Variant::edgl_only; }
bool uses_mlp(Variant v) {
  return v != Variant::attention && v != Variant::adgl_only;
}

FilterParity effective_parity(const TrainConfig& cfg) {
  if (cfg.variant == Variant::even) return FilterParity::even;
  if (cfg.variant == Variant::odd) return FilterParity::odd;
  return cfg.filter.parity;
}

}  // namespace

ModelDims ModelDims::resolve(int n_nodes, const TrainConfig& cfg) {
  if (n_nodes < 1) throw io_error("graph has no nodes");
  ModelDims d;
  d.n_nodes = n_nodes;
  d.embed = cfg.embed_dim;
  d.variant = cfg.variant;
  if (uses_gcn(cfg.variant)) {
    d.gcn_widths.push_back(n_nodes);
    for (int l = 0; l + 1 < cfg.gcn_layers; ++l)
      d.gcn_widths.push_back(cfg.gcn_hidden);
    d.gcn_widths.push_back(cfg.embed_dim);
  }
  if (uses_mlp(cfg.variant)) {
    d.edgl_in = cfg.variant == Variant::edgl_only ? n_nodes : cfg.embed_dim;
    d.edgl_hidden = cfg.edgl_hidden;
  }
  if (cfg.variant == Variant::attention) d.attn_dim = cfg.embed_dim;
  return d;
}

ModelParams init_params(const ModelDims& dims, std::uint64_t seed) {
  Rng rng(seed);
  auto xavier = [&rng](int rows, int cols) {
    const double bound = std::sqrt(6.0 / (rows + cols));
    Matrix w(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) w(i, j) = rng.uniform(-bound, bound);
    return w;
  };
  ModelParams p;
  for (std::size_t l = 0; l + 1 < dims.gcn_widths.size(); ++l)
    p.gcn.weights.push_back(xavier(dims.gcn_widths[l], dims.gcn_widths[l + 1]));
  if (dims.edgl_in > 0) {
    p.edgl.w0 = xavier(dims.edgl_in, dims.edgl_hidden);
    p.edgl.b0 = Vector::Zero(dims.edgl_hidden);
    p.edgl.w1 = xavier(dims.edgl_hidden, dims.embed);
    p.edgl.b1 = Vector::Zero(dims.embed);
  }
  if (dims.attn_dim > 0) {
    p.attn.wq = xavier(dims.embed, dims.attn_dim);
    p.attn.wk = xavier(dims.embed, dims.attn_dim);
    p.attn.wv = xavier(dims.embed, dims.attn_dim);
  }
  p.head.wl = xavier(dims.embed, dims.embed);
  return p;
}

namespace {

struct ForwardCache {
  std::vector<Matrix> gcn_inputs;  // input to each conv layer
  std::vector<Matrix> gcn_pre;     // pre-activation of each conv layer
  Matrix h_prime;
  Matrix x0, pre1, x1, pre2, x_hat;
  Matrix q, k, v, attn_weights;
  Matrix h_second;
  Matrix h_fused;
};

Matrix act_backward(const Matrix& pre, const Matrix& upstream, Activation act) {
  if (act == Activation::identity) return upstream;
  // ReLU subgradient at 0 is taken as 0.
  return ((pre.array() > 0.0).cast<double>() * upstream.array()).matrix();
}

Matrix run_forward(const GlobalGraph& graph, const ModelParams& p,
                   const TrainConfig& cfg, ForwardCache* cache) {
  const Variant var = cfg.variant;
  Matrix h_prime;
  if (uses_gcn(var)) {
    if (p.gcn.weights.empty()) throw io_error("model has no convolution weights");
    if (p.gcn.weights.front().rows() != graph.n())
      throw io_error("convolution width does not match graph size");
    Matrix h = graph.H;
    const int layers = static_cast<int>(p.gcn.weights.size());
    for (int l = 0; l < layers; ++l) {
      const Activation act =
          l + 1 == layers ? p.gcn.final_act : p.gcn.hidden_act;
      Matrix pre = graph.G_norm * (h * p.gcn.weights[l]);
      if (cache) {
        cache->gcn_inputs.push_back(h);
        cache->gcn_pre.push_back(pre);
      }
      h = apply_activation(pre, act);
    }
    h_prime = std::move(h);
    if (!h_prime.allFinite())
      throw numerical_error("graph convolution produced non-finite values");
  }

  Matrix h_second;
  if (var == Variant::attention) {
    const double scale = std::sqrt(static_cast<double>(p.attn.wq.cols()));
    Matrix q = h_prime * p.attn.wq;
    Matrix k = h_prime * p.attn.wk;
    Matrix v = h_prime * p.attn.wv;
    Matrix weights = row_softmax(q * k.transpose() / scale);
    h_second = weights * v;
    if (cache) {
      cache->q = std::move(q);
      cache->k = std::move(k);
      cache->v = std::move(v);
      cache->attn_weights = std::move(weights);
    }
  } else if (uses_mlp(var)) {
    Matrix x0 = var == Variant::edgl_only ? graph.H : h_prime;
    if (x0.cols() != p.edgl.w0.rows())
      throw io_error("mlp input width does not match weights");
    Matrix pre1 = (x0 * p.edgl.w0).rowwise() + p.edgl.b0.transpose();
    Matrix x1 = apply_activation(pre1, p.edgl.act);
    Matrix pre2 = (x1 * p.edgl.w1).rowwise() + p.edgl.b1.transpose();
    Matrix x_hat = apply_activation(pre2, p.edgl.act);
    FilterConfig fc = cfg.filter;
    fc.parity = effective_parity(cfg);
    h_second = fc.parity == FilterParity::even ? even_filter(x_hat, graph.P, fc)
                                               : odd_filter(x_hat, graph.P, fc);
    if (cache) {
      cache->x0 = std::move(x0);
      cache->pre1 = std::move(pre1);
      cache->x1 = std::move(x1);
      cache->pre2 = std::move(pre2);
      cache->x_hat = std::move(x_hat);
    }
  }

  Matrix fused;
  switch (var) {
    case Variant::adgl_only:
      fused = h_prime;
      break;
    case Variant::edgl_only:
    case Variant::no_fusion:
      fused = h_second;
      break;
    default:
      fused = fuse(h_prime, h_second, cfg.fusion_omega);
      break;
  }
  if (cache) {
    cache->h_prime = std::move(h_prime);
    cache->h_second = std::move(h_second);
    cache->h_fused = fused;
  }
  const Matrix scores = decode(fused.topRows(graph.n_d),
                               fused.bottomRows(graph.n_t), p.head.wl);
  if (!scores.allFinite())
    throw numerical_error("decoder produced non-finite scores");
  return scores;
}

}  // namespace

Matrix forward(const GlobalGraph& graph, const ModelParams& params,
               const TrainConfig& cfg) {
  return run_forward(graph, params, cfg, nullptr);
}

Gradients gradients(const GlobalGraph& graph, const ModelParams& params,
                    const PairList& positives, const PairList& negatives,
                    const TrainConfig& cfg) {
  ForwardCache c;
  const Matrix scores = run_forward(graph, params, cfg, &c);
  Gradients g;
  g.loss = compute_loss(scores, positives, negatives, cfg.loss);
  const Matrix dh = loss_gradient(scores, positives, negatives, cfg.loss);
  const Matrix ds =
      (dh.array() * scores.array() * (1.0 - scores.array())).matrix();

  const int nd = graph.n_d;
  const int nt = graph.n_t;
  const Matrix hd = c.h_fused.topRows(nd);
  const Matrix ht = c.h_fused.bottomRows(nt);
  g.wrt.head.wl = hd.transpose() * ds * ht;
  Matrix dfused(nd + nt, c.h_fused.cols());
  dfused.topRows(nd) = ds * ht * params.head.wl.transpose();
  dfused.bottomRows(nt) = ds.transpose() * hd * params.head.wl;

  const Variant var = cfg.variant;
  Matrix dh_prime, dh_second;
  switch (var) {
    case Variant::adgl_only:
      dh_prime = std::move(dfused);
      break;
    case Variant::edgl_only:
      dh_second = std::move(dfused);
      break;
    case Variant::no_fusion:
      dh_prime = Matrix::Zero(c.h_prime.rows(), c.h_prime.cols());
      dh_second = std::move(dfused);
      break;
    default:
      dh_prime = cfg.fusion_omega * dfused;
      dh_second = (1.0 - cfg.fusion_omega) * dfused;
      break;
  }

  if (var == Variant::attention) {
    const double scale = std::sqrt(static_cast<double>(params.attn.wq.cols()));
    const Matrix da = dh_second * c.v.transpose();
    const Matrix dv = c.attn_weights.transpose() * dh_second;
    // Softmax rows: dL = S o (dA - rowsum(dA o S)).
    const Vector row_dot =
        (da.array() * c.attn_weights.array()).rowwise().sum().matrix();
    const Matrix dlogits =
        (c.attn_weights.array() * (da.colwise() - row_dot).array()).matrix();
    const Matrix dq = dlogits * c.k / scale;
    const Matrix dk = dlogits.transpose() * c.q / scale;
    g.wrt.attn.wq = c.h_prime.transpose() * dq;
    g.wrt.attn.wk = c.h_prime.transpose() * dk;
    g.wrt.attn.wv = c.h_prime.transpose() * dv;
    dh_prime += dq * params.attn.wq.transpose() +
                dk * params.attn.wk.transpose() +
                dv * params.attn.wv.transpose();
  } else if (uses_mlp(var)) {
    FilterConfig fc = cfg.filter;
    fc.parity = effective_parity(cfg);
    // The filter is a fixed linear map with symmetric P, so its adjoint is
    // the same accumulation applied to the upstream gradient.
    const Matrix dx_hat = fc.parity == FilterParity::even
                              ? even_filter(dh_second, graph.P, fc)
                              : odd_filter(dh_second, graph.P, fc);
    const Matrix dpre2 = act_backward(c.pre2, dx_hat, params.edgl.act);
    g.wrt.edgl.w1 = c.x1.transpose() * dpre2;
    g.wrt.edgl.b1 = dpre2.colwise().sum().transpose();
    const Matrix dx1 = dpre2 * params.edgl.w1.transpose();
    const Matrix dpre1 = act_backward(c.pre1, dx1, params.edgl.act);
    g.wrt.edgl.w0 = c.x0.transpose() * dpre1;
    g.wrt.edgl.b0 = dpre1.colwise().sum().transpose();
    if (var != Variant::edgl_only)
      dh_prime += dpre1 * params.edgl.w0.transpose();
  }

  if (uses_gcn(var)) {
    const int layers = static_cast<int>(params.gcn.weights.size());
    g.wrt.gcn.weights.resize(layers);
    Matrix up = std::move(dh_prime);
    for (int l = layers - 1; l >= 0; --l) {
      const Activation act =
          l + 1 == layers ? params.gcn.final_act : params.gcn.hidden_act;
      const Matrix dpre = act_backward(c.gcn_pre[l], up, act);
      g.wrt.gcn.weights[l] =
          (graph.G_norm * c.gcn_inputs[l]).transpose() * dpre;
      if (l > 0)
        up = graph.G_norm.transpose() *
             (dpre * params.gcn.weights[l].transpose());
    }
  }
  return g;
}

namespace {

// Every trainable array as a flat span; order must match between the
// parameter set and a gradient set built for the same variant.
std::vector<std::pair<double*, Eigen::Index>> param_slots(ModelParams& p) {
  std::vector<std::pair<double*, Eigen::Index>> slots;
  auto add = [&slots](auto& m) {
    if (m.size() > 0) slots.emplace_back(m.data(), m.size());
  };
  for (auto& w : p.gcn.weights) add(w);
  add(p.edgl.w0);
  add(p.edgl.b0);
  add(p.edgl.w1);
  add(p.edgl.b1);
  add(p.attn.wq);
  add(p.attn.wk);
  add(p.attn.wv);
  add(p.head.wl);
  return slots;
}

}  // namespace

FitResult fit(const GlobalGraph& graph, const PairList& train_positives,
              const PairList& train_negatives, const TrainConfig& cfg) {
  cfg.validate();
  const ModelDims dims = ModelDims::resolve(graph.n(), cfg);
  FitResult result;
  result.params = init_params(dims, cfg.seed);
  result.params.head.omega = cfg.fusion_omega;
  if (cfg.epochs == 0) return result;

  auto slots = param_slots(result.params);
  Eigen::Index total = 0;
  for (const auto& slot : slots) total += slot.second;
  Vector m1 = Vector::Zero(total);
  Vector m2 = Vector::Zero(total);
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  const bool adam = cfg.optimizer == "adam";

  double best = std::numeric_limits<double>::infinity();
  int stall = 0;
  int step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Gradients g =
        gradients(graph, result.params, train_positives, train_negatives, cfg);
    if (!std::isfinite(g.loss)) throw numerical_error("training loss diverged");
    result.loss_trace.push_back(g.loss);
    if (g.loss < best - cfg.early_stop_min_delta) {
      best = g.loss;
      stall = 0;
    } else if (++stall >= cfg.early_stop_patience) {
      break;
    }

    auto grad_slots = param_slots(g.wrt);
    if (grad_slots.size() != slots.size())
      throw numerical_error("gradient layout mismatch");
    ++step;
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const Eigen::Index size = slots[i].second;
      Eigen::Map<Vector> w(slots[i].first, size);
      Eigen::Map<const Vector> grad(grad_slots[i].first, size);
      if (adam) {
        auto ms = m1.segment(off, size);
        auto vs = m2.segment(off, size);
        ms = kBeta1 * ms + (1.0 - kBeta1) * grad;
        vs = kBeta2 * vs + (1.0 - kBeta2) * grad.cwiseProduct(grad);
        const double c1 = 1.0 - std::pow(kBeta1, step);
        const double c2 = 1.0 - std::pow(kBeta2, step);
        w.array() -= cfg.learning_rate * (ms.array() / c1) /
                     ((vs.array() / c2).sqrt() + kEps);
      } else {
        w -= cfg.learning_rate * grad;
      }
      off += size;
    }
  }
  result.epochs_run = static_cast<int>(result.loss_trace.size());
  return result;
}

Matrix mask_test_pairs(const Matrix& a_dt, const PairList& test_pairs) {
  Matrix out = a_dt;
  for (const auto& [d, t] : test_pairs) {
    if (d < 0 || d >= out.rows() || t < 0 || t >= out.cols())
      throw io_error("test pair index out of range");
    out(d, t) = 0.0;
  }
  return out;
}

namespace {

const char* kManifestName = "manifest.json";

void require_file(const fs::path& p) {
  if (!fs::exists(p)) throw io_error("checkpoint file missing: " + p.string());
}

}  // namespace

void save_checkpoint(const fs::path& dir, const ModelParams& params,
                     const TrainConfig& cfg, int n_nodes) {
  fs::create_directories(dir);
  json files = json::object();
  auto dump = [&dir, &files](const std::string& name, const Matrix& m) {
    const std::string file = name + ".tsv";
    write_matrix(dir / file, m);
    files[name] = file;
  };
  for (std::size_t l = 0; l < params.gcn.weights.size(); ++l)
    dump("gcn_w" + std::to_string(l), params.gcn.weights[l]);
  if (params.edgl.w0.size() > 0) {
    dump("edgl_w0", params.edgl.w0);
    dump("edgl_b0", params.edgl.b0.transpose());
    dump("edgl_w1", params.edgl.w1);
    dump("edgl_b1", params.edgl.b1.transpose());
  }
  if (params.attn.wq.size() > 0) {
    dump("attn_wq", params.attn.wq);
    dump("attn_wk", params.attn.wk);
    dump("attn_wv", params.attn.wv);
  }
  dump("head_wl", params.head.wl);

  json manifest = {
      {"format", "socdgl-checkpoint-v1"},
      {"variant", to_string(cfg.variant)},
      {"seed", cfg.seed},
      {"n_nodes", n_nodes},
      {"fusion_omega", cfg.fusion_omega},
      {"gcn_layers", cfg.gcn_layers},
      {"filter",
       {{"k", cfg.filter.k},
        {"alpha", cfg.filter.alpha},
        {"parity", to_string(effective_parity(cfg))}}},
      {"files", files},
  };
  atomic_write(dir / kManifestName, manifest.dump(2) + "\n");
}

Checkpoint load_checkpoint(const fs::path& dir) {
  const fs::path manifest_path = dir / kManifestName;
  require_file(manifest_path);
  json manifest;
  {
    std::ifstream in(manifest_path);
    try {
      manifest = json::parse(in);
    } catch (const json::exception& e) {
      throw io_error("invalid checkpoint manifest: " + std::string(e.what()));
    }
  }
  Checkpoint ck;
  try {
    if (manifest.at("format") != "socdgl-checkpoint-v1")
      throw io_error("unsupported checkpoint format");
    ck.variant = variant_from_string(manifest.at("variant").get<std::string>());
    ck.seed = manifest.at("seed").get<std::uint64_t>();
    ck.n_nodes = manifest.at("n_nodes").get<int>();
    ck.fusion_omega = manifest.at("fusion_omega").get<double>();
    ck.gcn_layers = manifest.at("gcn_layers").get<int>();
    const auto& f = manifest.at("filter");
    ck.filter.k = f.at("k").get<int>();
    ck.filter.alpha = f.at("alpha").get<double>();
    ck.filter.parity = parity_from_string(f.at("parity").get<std::string>());
    const auto& files = manifest.at("files");
    auto read_part = [&dir, &files](const std::string& name) {
      const fs::path p = dir / files.at(name).get<std::string>();
      require_file(p);
      return read_matrix(p);
    };
    for (int l = 0; files.contains("gcn_w" + std::to_string(l)); ++l)
      ck.params.gcn.weights.push_back(read_part("gcn_w" + std::to_string(l)));
    if (files.contains("edgl_w0")) {
      ck.params.edgl.w0 = read_part("edgl_w0");
      ck.params.edgl.b0 = read_part("edgl_b0").transpose();
      ck.params.edgl.w1 = read_part("edgl_w1");
      ck.params.edgl.b1 = read_part("edgl_b1").transpose();
    }
    if (files.contains("attn_wq")) {
      ck.params.attn.wq = read_part("attn_wq");
      ck.params.attn.wk = read_part("attn_wk");
      ck.params.attn.wv = read_part("attn_wv");
    }
    ck.params.head.wl = read_part("head_wl");
    ck.params.head.omega = ck.fusion_omega;
  } catch (const json::exception& e) {
    throw io_error("invalid checkpoint manifest: " + std::string(e.what()));
  }
  return ck;
}

}  // namespace socdgl
