#pragma once

#include "socdgl/types.hpp"

namespace socdgl {

enum class LossKind { SLF, FLF, WLF, RLF };

LossKind loss_kind_from_string(const std::string& name);
const char* to_string(LossKind k);

struct LossConfig {
  LossKind kind = LossKind::RLF;
  double varpi = 0.2;       // positive-term scale in RLF
  double gamma = 2.0;       // focusing exponent in FLF
  double clamp_eps = 1e-7;  // probability clamp before logs

  void validate() const;
};

// Loss over the labeled pairs only, normalized by n_d * n_t.
//   SLF: plain cross-entropy.
//   WLF: positive sum weighted by |y-|/|y+|.
//   RLF: positive sum weighted by varpi * |y-|/|y+|.
///   FLF: two-sided focal form; positive term weighted by the class ratio and
//        modulated by (1-h)^gamma, negative term modulated by h^gamma.
//        Degenerates to WLF at gamma = 0.
double compute_loss(const Matrix& h_star, const PairList& positives,
                    const PairList& negatives, const LossConfig& cfg);

// dLoss/dH* at every labeled pair (dense matrix, zero elsewhere). Entries
// landing outside the clamp window get zero gradient.
Matrix loss_gradient(const Matrix& h_star, const PairList& positives,
                     const PairList& negatives, const LossConfig& cfg);

}  // namespace socdgl
