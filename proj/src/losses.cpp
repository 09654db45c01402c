#include "socdgl/losses.hpp"

#include <algorithm>
#include <cmath>

namespace socdgl {

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "SLF" || name == "slf") return LossKind::SLF;
  if (name == "FLF" || name == "flf") return LossKind::FLF;
  if (name == "WLF" || name == "wlf") return LossKind::WLF;
  if (name == "RLF" || name == "rlf") return LossKind::RLF;
  throw io_error("unknown loss kind: " + name);
}

const char* to_string(LossKind k) {
  switch (k) {
    case LossKind::SLF: return "SLF";
    case LossKind::FLF: return "FLF";
    case LossKind::WLF: return "WLF";
    default: return "RLF";
  }
}

void LossConfig::validate() const {
  if (varpi <= 0.0) throw io_error("loss varpi must be positive");
  if (gamma < 0.0) throw io_error("loss gamma must be nonnegative");
  if (clamp_eps <= 0.0 || clamp_eps >= 0.5)
    throw io_error("loss clamp_eps must be in (0, 0.5)");
}

namespace {

void check_inputs(const Matrix& h_star, const PairList& positives,
                  const PairList& negatives, const LossConfig& cfg) {
  cfg.validate();
  if (!h_star.allFinite()) throw numerical_error("loss input has non-finite scores");
  if (positives.empty() && cfg.kind != LossKind::SLF)
    throw io_error("ratio-based loss needs at least one positive pair");
  auto in_range = [&](const Pair& p) {
    return p.first >= 0 && p.first < h_star.rows() && p.second >= 0 &&
           p.second < h_star.cols();
  };
  for (const auto& p : positives)
    if (!in_range(p)) throw io_error("positive pair index out of range");
  for (const auto& p : negatives)
    if (!in_range(p)) throw io_error("negative pair index out of range");
}

// Positive-sum weight shared by the four variants.
double positive_weight(const LossConfig& cfg, std::size_t n_pos, std::size_t n_neg) {
  const double ratio =
      n_pos > 0 ? static_cast<double>(n_neg) / static_cast<double>(n_pos) : 0.0;
  switch (cfg.kind) {
    case LossKind::SLF: return 1.0;
    case LossKind::WLF: return ratio;
    case LossKind::RLF: return cfg.varpi * ratio;
    case LossKind::FLF: return ratio;
  }
  return 1.0;
}

}  // namespace

double compute_loss(const Matrix& h_star, const PairList& positives,
                    const PairList& negatives, const LossConfig& cfg) {
  check_inputs(h_star, positives, negatives, cfg);
  const double lo = cfg.clamp_eps;
  const double hi = 1.0 - cfg.clamp_eps;
  const double w_pos = positive_weight(cfg, positives.size(), negatives.size());
  const bool focal = cfg.kind == LossKind::FLF;

  double pos_sum = 0.0;
  for (const auto& [i, j] : positives) {
    const double h = std::clamp(h_star(i, j), lo, hi);
    const double mod = focal ? std::pow(1.0 - h, cfg.gamma) : 1.0;
    pos_sum += mod * std::log(h);
  }
  double neg_sum = 0.0;
  for (const auto& [i, j] : negatives) {
    const double h = std::clamp(h_star(i, j), lo, hi);
    const double mod = focal ? std::pow(h, cfg.gamma) : 1.0;
    neg_sum += mod * std::log(1.0 - h);
  }
  const double n = static_cast<double>(h_star.rows()) *
                   static_cast<double>(h_star.cols());
  return -(w_pos * pos_sum + neg_sum) / n;
}

Matrix loss_gradient(const Matrix& h_star, const PairList& positives,
                     const PairList& negatives, const LossConfig& cfg) {
  check_inputs(h_star, positives, negatives, cfg);
  const double lo = cfg.clamp_eps;
  const double hi = 1.0 - cfg.clamp_eps;
  const double w_pos = positive_weight(cfg, positives.size(), negatives.size());
  const bool focal = cfg.kind == LossKind::FLF;
  const double n = static_cast<double>(h_star.rows()) *
                   static_cast<double>(h_star.cols());

  Matrix grad = Matrix::Zero(h_star.rows(), h_star.cols());
  for (const auto& [i, j] : positives) {
    const double h = h_star(i, j);
    if (h <= lo || h >= hi) continue;  // clamp plateau
    double d;
    if (focal) {
      // d/dh [(1-h)^g log h] = -g (1-h)^(g-1) log h + (1-h)^g / h
      const double om = 1.0 - h;
      const double tail = cfg.gamma > 0.0
                              ? -cfg.gamma * std::pow(om, cfg.gamma - 1.0) * std::log(h)
                              : 0.0;
      d = tail + std::pow(om, cfg.gamma) / h;
    } else {
      d = 1.0 / h;
    }
    grad(i, j) += -w_pos * d / n;
  }
  for (const auto& [i, j] : negatives) {
    const double h = h_star(i, j);
    if (h <= lo || h >= hi) continue;
    double d;
    if (focal) {
      // d/dh [h^g log(1-h)] = g h^(g-1) log(1-h) - h^g / (1-h)
      const double tail = cfg.gamma > 0.0
                              ? cfg.gamma * std::pow(h, cfg.gamma - 1.0) * std::log(1.0 - h)
                              : 0.0;
      d = tail - std::pow(h, cfg.gamma) / (1.0 - h);
    } else {
      d = -1.0 / (1.0 - h);
    }
    grad(i, j) += -d / n;
  }
  return grad;
}

}  // namespace socdgl
