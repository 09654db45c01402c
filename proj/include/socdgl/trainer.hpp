#pragma once

#include "socdgl/encoders.hpp"
#include "socdgl/graphs.hpp"
#include "socdgl/head.hpp"
#include "socdgl/losses.hpp"
#include "socdgl/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace socdgl {

// Model wiring variants. even is the full model; odd and attention swap the
// higher-order propagation; the last three are the ablations.
enum class Variant { even, odd, attention, adgl_only, edgl_only, no_fusion };

Variant variant_from_string(const std::string& name);
const char* to_string(Variant v);

struct ModelParams {
  GcnParams gcn;
  EdglParams edgl;
  AttentionParams attn;
  HeadParams head;
};

struct TrainConfig {
  int epochs = 500;
  double learning_rate = 1e-3;
  std::string optimizer = "adam";
  std::uint64_t seed = 1;
  LossConfig loss;
  double fusion_omega = 0.5;
  FilterConfig filter;
  int gcn_layers = 2;
  int gcn_hidden = 512;
  int embed_dim = 256;
  int edgl_hidden = 512;
  Variant variant = Variant::even;
  int early_stop_patience = 20;
  double early_stop_min_delta = 1e-6;

  void validate() const;
};

// Layer width bookkeeping resolved from a config and the node count.
struct ModelDims {
  int n_nodes = 0;
  std::vector<int> gcn_widths;  // full chain incl. input, empty if unused
  int edgl_in = 0, edgl_hidden = 0;  // zero if unused
  int attn_dim = 0;             // zero if unused
  int embed = 0;
  Variant variant = Variant::even;

  static ModelDims resolve(int n_nodes, const TrainConfig& cfg);
};

// Xavier-uniform weights, zero biases; deterministic per seed. Only the
// matrices the variant uses are materialized.
ModelParams init_params(const ModelDims& dims, std::uint64_t seed);

// End-to-end composition: ADGL, EDGL (or variant), fusion, decoder.
// Returns the n_d x n_t score matrix.
Matrix forward(const GlobalGraph& graph, const ModelParams& params,
               const TrainConfig& cfg);

struct Gradients {
  ModelParams wrt;  // same shapes as the trainable params; omega is not trained
  double loss = 0.0;
};

// Exact reverse-mode gradients of the configured loss over the given labeled
// pairs with respect to every trainable matrix.
Gradients gradients(const GlobalGraph& graph, const ModelParams& params,
                    const PairList& positives, const PairList& negatives,
                    const TrainConfig& cfg);

struct FitResult {
  ModelParams params;
  std::vector<double> loss_trace;
  int epochs_run = 0;
};

// Full-batch first-order training on the given labeled pairs. The graph must
// already have test edges masked out.
FitResult fit(const GlobalGraph& graph, const PairList& train_positives,
              const PairList& train_negatives, const TrainConfig& cfg);

// A_DT copy with the given pairs zeroed (test-edge masking).
Matrix mask_test_pairs(const Matrix& a_dt, const PairList& test_pairs);

// Checkpoint bundle: one TSV per parameter matrix plus a manifest carrying
// the structural config and seed.
void save_checkpoint(const std::filesystem::path& dir, const ModelParams& params,
                     const TrainConfig& cfg, int n_nodes);

struct Checkpoint {
  ModelParams params;
  Variant variant = Variant::even;
  double fusion_omega = 0.5;
  FilterConfig filter;
  int gcn_layers = 2;
  int n_nodes = 0;
  std::uint64_t seed = 0;
};
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace socdgl
