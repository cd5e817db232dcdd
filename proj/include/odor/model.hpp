#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "odor/batch.hpp"
#include "odor/tensor.hpp"

namespace odor {

struct ModelConfig {
  int heads = 4;          // attention heads in layers 1 and 2
  int head_dim = 64;      // per-head output width, layers 1 and 2
  int final_dim = 128;    // single-head layer 3 output width
  int global_hidden = 256;
  int global_out = 128;
  int fusion_hidden = 256;
  int labels = 154;
  double leaky_slope = 0.2;
  double dropout = 0.0;

  // Filled from the featurizer when the model is built.
  int node_dim = 0;
  int edge_dim = 0;
  int global_dim = 0;

  int hidden_dim() const { return heads * head_dim; }  // width after layers 1/2
  void validate() const;
};

struct GatLayerParams {
  std::vector<Tensor> weight;  // per head, (in_dim, out_dim)
  std::vector<Tensor> att;     // per head, (2*out_dim + edge_dim)
  Tensor bn_gamma, bn_beta;
  BatchNormState bn;
};

struct ModelParams {
  ModelConfig config;
  GatLayerParams layer1, layer2, layer3;
  Tensor readout_att;  // (final_dim, 1)
  Tensor global_w1, global_b1, global_w2, global_b2;
  Tensor fusion_w1, fusion_b1, fusion_w2, fusion_b2;

  /// Glorot-uniform weights, zero biases, unit/zero batch-norm, all drawn
  /// from the run seed.
  static ModelParams init(const ModelConfig& config, uint64_t seed);

  std::vector<Tensor> all_parameters();              // stable order
  std::vector<Tensor> weight_parameters();           // L2 scope: no biases, no batch-norm
  std::vector<std::pair<std::string, Tensor>> named_parameters();
};

/// Softmax weights produced during a forward pass, with the segment ids
/// they normalize over. Used by normalization checks.
struct AttentionTrace {
  std::vector<std::pair<std::vector<int>, Tensor>> neighborhood;  // per layer and head
  std::vector<std::pair<std::vector<int>, Tensor>> readout;       // per graph
};

/// One edge-aware multi-head GAT layer: per head, attention scores
/// leaky_relu(a . [W h_dst || W h_src || e]) softmax-normalized over each
/// target's in-neighborhood, attention-weighted sum of W h_src, heads
/// concatenated, then batch-norm and relu. Every node must appear as an
/// edge target; make_batch guarantees this via self-loops.
Tensor gat_layer(Tape& tape, const Tensor& h, const BatchGraph& batch, GatLayerParams& params,
                 const ModelConfig& config, bool training, AttentionTrace* trace = nullptr);

/// Attention readout: per-node scores h . w_att, softmax within each graph,
/// attention-weighted sum of node features per graph.
Tensor attention_readout(Tape& tape, const Tensor& h, const BatchGraph& batch, ModelParams& params,
                         AttentionTrace* trace = nullptr);

/// Full model: three GAT layers, then concat(attention readout, mean pool,
/// max pool, global-feature MLP) -> fusion MLP -> label logits.
Tensor model_forward(Tape& tape, const BatchGraph& batch, ModelParams& params, bool training,
                     const std::function<double()>& dropout_uniform = {},
                     AttentionTrace* trace = nullptr);

/// Inference probabilities (sigmoid of logits), row-major (graphs x labels).
std::vector<double> predict_probabilities(const BatchGraph& batch, ModelParams& params);

}  // namespace odor
