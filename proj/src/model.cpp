#include "odor/model.hpp"

#include <cmath>
#include <stdexcept>

#include "odor/rng.hpp"

namespace odor {

namespace {

Tensor glorot(Rng& rng, const std::string& name, int fan_in, int fan_out,
              std::vector<int> shape) {
  double bound = std::sqrt(6.0 / (fan_in + fan_out));
  int64_t n = 1;
  for (int d : shape) n *= d;
  std::vector<double> values(n);
  for (double& v : values) v = (rng.uniform() * 2.0 - 1.0) * bound;
  return Tensor::parameter(name, std::move(shape), std::move(values));
}

Tensor zeros_param(const std::string& name, std::vector<int> shape) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  return Tensor::parameter(name, std::move(shape), std::vector<double>(n, 0.0));
}

Tensor ones_param(const std::string& name, std::vector<int> shape) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  return Tensor::parameter(name, std::move(shape), std::vector<double>(n, 1.0));
}

GatLayerParams init_gat_layer(Rng& rng, const std::string& prefix, int in_dim, int out_dim,
                              int heads, int edge_dim) {
  GatLayerParams layer;
  for (int k = 0; k < heads; ++k) {
    std::string head = prefix + ".head" + std::to_string(k);
    layer.weight.push_back(glorot(rng, head + ".W", in_dim, out_dim, {in_dim, out_dim}));
    int att_len = 2 * out_dim + edge_dim;
    layer.att.push_back(glorot(rng, head + ".a", att_len, 1, {att_len, 1}));
  }
  layer.bn_gamma = ones_param(prefix + ".bn_gamma", {heads * out_dim});
  layer.bn_beta = zeros_param(prefix + ".bn_beta", {heads * out_dim});
  layer.bn.init(heads * out_dim);
  return layer;
}

}  // namespace

void ModelConfig::validate() const {
  if (heads < 1 || head_dim < 1 || final_dim < 1 || labels < 1)
    throw std::runtime_error("model config: widths must be positive");
  if (node_dim < 1 || edge_dim < 1 || global_dim < 1)
    throw std::runtime_error("model config: feature dimensions not set");
  if (dropout < 0.0 || dropout >= 1.0) throw std::runtime_error("model config: dropout out of [0,1)");
}

ModelParams ModelParams::init(const ModelConfig& config, uint64_t seed) {
  config.validate();
  Rng rng(seed);
  ModelParams p;
  p.config = config;
  int hidden = config.hidden_dim();
  p.layer1 = init_gat_layer(rng, "layer1", config.node_dim, config.head_dim, config.heads,
                            config.edge_dim);
  p.layer2 = init_gat_layer(rng, "layer2", hidden, config.head_dim, config.heads, config.edge_dim);
  p.layer3 = init_gat_layer(rng, "layer3", hidden, config.final_dim, 1, config.edge_dim);
  p.readout_att = glorot(rng, "readout.w_att", config.final_dim, 1, {config.final_dim, 1});
  p.global_w1 = glorot(rng, "global.w1", config.global_dim, config.global_hidden,
                       {config.global_dim, config.global_hidden});
  p.global_b1 = zeros_param("global.b1", {config.global_hidden});
  p.global_w2 = glorot(rng, "global.w2", config.global_hidden, config.global_out,
                       {config.global_hidden, config.global_out});
  p.global_b2 = zeros_param("global.b2", {config.global_out});
  int fusion_in = 3 * config.final_dim + config.global_out;
  p.fusion_w1 = glorot(rng, "fusion.w1", fusion_in, config.fusion_hidden,
                       {fusion_in, config.fusion_hidden});
  p.fusion_b1 = zeros_param("fusion.b1", {config.fusion_hidden});
  p.fusion_w2 = glorot(rng, "fusion.w2", config.fusion_hidden, config.labels,
                       {config.fusion_hidden, config.labels});
  p.fusion_b2 = zeros_param("fusion.b2", {config.labels});
  return p;
}

std::vector<Tensor> ModelParams::all_parameters() {
  std::vector<Tensor> out;
  for (GatLayerParams* layer : {&layer1, &layer2, &layer3}) {
    for (Tensor& w : layer->weight) out.push_back(w);
    for (Tensor& a : layer->att) out.push_back(a);
    out.push_back(layer->bn_gamma);
    out.push_back(layer->bn_beta);
  }
  out.push_back(readout_att);
  for (Tensor* t : {&global_w1, &global_b1, &global_w2, &global_b2, &fusion_w1, &fusion_b1,
                    &fusion_w2, &fusion_b2})
    out.push_back(*t);
  return out;
}

std::vector<Tensor> ModelParams::weight_parameters() {
  std::vector<Tensor> out;
  for (GatLayerParams* layer : {&layer1, &layer2, &layer3}) {
    for (Tensor& w : layer->weight) out.push_back(w);
    for (Tensor& a : layer->att) out.push_back(a);
  }
  out.push_back(readout_att);
  for (Tensor* t : {&global_w1, &global_w2, &fusion_w1, &fusion_w2}) out.push_back(*t);
  return out;
}

std::vector<std::pair<std::string, Tensor>> ModelParams::named_parameters() {
  std::vector<std::pair<std::string, Tensor>> out;
  for (Tensor& t : all_parameters()) out.emplace_back(t.name(), t);
  return out;
}

Tensor gat_layer(Tape& tape, const Tensor& h, const BatchGraph& batch, GatLayerParams& params,
                 const ModelConfig& config, bool training, AttentionTrace* trace) {
  int edges = batch.num_edges();
  Tensor edge_feat = Tensor::from({edges, batch.edge_dim}, batch.edge_features);
  std::vector<Tensor> head_outputs;
  for (size_t k = 0; k < params.weight.size(); ++k) {
    Tensor hw = matmul(tape, h, params.weight[k]);                  // (N, D)
    Tensor src = gather_rows(tape, hw, batch.edge_src);             // (E, D)
    Tensor dst = gather_rows(tape, hw, batch.edge_dst);             // (E, D)
    Tensor cat = concat(tape, {dst, src, edge_feat}, 1);            // (E, 2D+De)
    Tensor scores = reshape(tape, matmul(tape, cat, params.att[k]), {edges});
    scores = leaky_relu(tape, scores, config.leaky_slope);
    Tensor alpha = segment_softmax(tape, scores, batch.edge_dst, batch.num_nodes);
    if (trace) trace->neighborhood.emplace_back(batch.edge_dst, alpha);
    Tensor messages = scale_rows(tape, src, alpha);                 // (E, D)
    head_outputs.push_back(segment_sum(tape, messages, batch.edge_dst, batch.num_nodes));
  }
  Tensor out = head_outputs.size() == 1 ? head_outputs[0] : concat(tape, head_outputs, 1);
  out = batch_norm(tape, out, params.bn_gamma, params.bn_beta, params.bn, training);
  return relu(tape, out);
}

Tensor attention_readout(Tape& tape, const Tensor& h, const BatchGraph& batch, ModelParams& params,
                         AttentionTrace* trace) {
  Tensor scores = reshape(tape, matmul(tape, h, params.readout_att), {batch.num_nodes});
  Tensor alpha = segment_softmax(tape, scores, batch.graph_ids, batch.num_graphs);
  if (trace) trace->readout.emplace_back(batch.graph_ids, alpha);
  Tensor weighted = scale_rows(tape, h, alpha);
  return segment_sum(tape, weighted, batch.graph_ids, batch.num_graphs);
}

Tensor model_forward(Tape& tape, const BatchGraph& batch, ModelParams& params, bool training,
                     const std::function<double()>& dropout_uniform, AttentionTrace* trace) {
  const ModelConfig& cfg = params.config;
  if (batch.node_dim != cfg.node_dim || batch.edge_dim != cfg.edge_dim ||
      batch.global_dim != cfg.global_dim)
    throw std::runtime_error(
        "model_forward: featurizer dims (" + std::to_string(batch.node_dim) + "," +
        std::to_string(batch.edge_dim) + "," + std::to_string(batch.global_dim) +
        ") do not match model config (" + std::to_string(cfg.node_dim) + "," +
        std::to_string(cfg.edge_dim) + "," + std::to_string(cfg.global_dim) + ")");

  Tensor h = Tensor::from({batch.num_nodes, batch.node_dim}, batch.node_features);
  bool use_dropout = training && cfg.dropout > 0.0;
  if (use_dropout && !dropout_uniform)
    throw std::runtime_error("model_forward: dropout enabled but no random source supplied");
  for (GatLayerParams* layer : {&params.layer1, &params.layer2, &params.layer3}) {
    h = gat_layer(tape, h, batch, *layer, cfg, training, trace);
    if (use_dropout) h = dropout(tape, h, cfg.dropout, dropout_uniform);
  }

  Tensor att = attention_readout(tape, h, batch, params, trace);
  Tensor mean_pool = segment_mean(tape, h, batch.graph_ids, batch.num_graphs);
  Tensor max_pool = segment_max(tape, h, batch.graph_ids, batch.num_graphs);

  Tensor global = Tensor::from({batch.num_graphs, batch.global_dim}, batch.global_features);
  Tensor g1 = relu(tape, add_rowvec(tape, matmul(tape, global, params.global_w1), params.global_b1));
  Tensor g2 = relu(tape, add_rowvec(tape, matmul(tape, g1, params.global_w2), params.global_b2));

  Tensor fused = concat(tape, {att, mean_pool, max_pool, g2}, 1);
  Tensor f1 = relu(tape, add_rowvec(tape, matmul(tape, fused, params.fusion_w1), params.fusion_b1));
  return add_rowvec(tape, matmul(tape, f1, params.fusion_w2), params.fusion_b2);
}

std::vector<double> predict_probabilities(const BatchGraph& batch, ModelParams& params) {
  Tape tape;
  Tensor logits = model_forward(tape, batch, params, /*training=*/false);
  Tensor probs = sigmoid(tape, logits);
  return probs.values();
}

}  // namespace odor
