#include "odor/train.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "odor/rng.hpp"
#include "odor/smiles.hpp"

namespace odor {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed)
      if (it.key() == key) ok = true;
    if (!ok) throw std::runtime_error("unknown config key '" + it.key() + "' in " + where);
  }
}

FeatureSet featurize_record(const DatasetRecord& record, const FeatureConfig& features,
                            const LabelVocabulary& vocabulary, const ElementTable& elements) {
  MolecularGraph graph = parse_smiles(record.smiles, elements);
  FeatureSet fs = featurize_molecule(graph, features);
  fs.label_vector = vocabulary.encode(record.labels);
  return fs;
}

std::vector<double> infer_probabilities(ModelParams& params, const std::vector<FeatureSet>& sets,
                                        int batch_size) {
  std::vector<double> probs;
  for (size_t start = 0; start < sets.size(); start += batch_size) {
    size_t n = std::min<size_t>(batch_size, sets.size() - start);
    BatchGraph batch = make_batch({sets.data() + start, n});
    auto batch_probs = predict_probabilities(batch, params);
    probs.insert(probs.end(), batch_probs.begin(), batch_probs.end());
  }
  return probs;
}

std::string format_double(double v) {
  // Shortest round-trip representation, deterministic across runs.
  return json(v).dump();
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 0) throw std::runtime_error("train config: epochs must be >= 0");
  if (batch_size < 1) throw std::runtime_error("train config: batch_size must be >= 1");
  if (learning_rate <= 0) throw std::runtime_error("train config: learning_rate must be > 0");
  if (split_fraction <= 0.0 || split_fraction >= 1.0)
    throw std::runtime_error("train config: split_fraction must be in (0,1)");
  if (eval_every < 0) throw std::runtime_error("train config: eval_every must be >= 0");
  loss.validate();
  features.validate();
}

TrainConfig train_config_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  TrainConfig c;
  reject_unknown_keys(j,
                      {"epochs", "batch_size", "seed", "learning_rate", "split_fraction",
                       "eval_every", "save_optimizer", "adam", "loss", "features", "model"},
                      "config root");
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.split_fraction = j.value("split_fraction", c.split_fraction);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.save_optimizer = j.value("save_optimizer", c.save_optimizer);
  if (j.contains("adam")) {
    const json& a = j["adam"];
    reject_unknown_keys(a, {"beta1", "beta2", "eps"}, "adam");
    c.adam_beta1 = a.value("beta1", c.adam_beta1);
    c.adam_beta2 = a.value("beta2", c.adam_beta2);
    c.adam_eps = a.value("eps", c.adam_eps);
  }
  if (j.contains("loss")) {
    const json& l = j["loss"];
    reject_unknown_keys(l, {"alpha", "gamma", "lambda", "alpha1_start", "alpha1_end",
                            "alpha1_ramp_epochs"},
                        "loss");
    c.loss.alpha = l.value("alpha", c.loss.alpha);
    c.loss.gamma = l.value("gamma", c.loss.gamma);
    c.loss.lambda = l.value("lambda", c.loss.lambda);
    c.loss.alpha1_start = l.value("alpha1_start", c.loss.alpha1_start);
    c.loss.alpha1_end = l.value("alpha1_end", c.loss.alpha1_end);
    c.loss.alpha1_ramp_epochs = l.value("alpha1_ramp_epochs", -1);
  } else {
    c.loss.alpha1_ramp_epochs = -1;
  }
  if (c.loss.alpha1_ramp_epochs < 0) c.loss.alpha1_ramp_epochs = c.epochs;
  if (j.contains("features")) {
    const json& f = j["features"];
    reject_unknown_keys(f,
                        {"morgan_radius", "morgan_bits", "maccs_bits", "topo_bits", "atomic",
                         "edge", "fingerprint", "groups_per_atom", "bounds", "patterns_file",
                         "maccs_file"},
                        "features");
    c.features.morgan_radius = f.value("morgan_radius", c.features.morgan_radius);
    c.features.morgan_bits = f.value("morgan_bits", c.features.morgan_bits);
    c.features.maccs_bits = f.value("maccs_bits", c.features.maccs_bits);
    c.features.topo_bits = f.value("topo_bits", c.features.topo_bits);
    c.features.atomic_enabled = f.value("atomic", c.features.atomic_enabled);
    c.features.edge_enabled = f.value("edge", c.features.edge_enabled);
    c.features.fingerprint_enabled = f.value("fingerprint", c.features.fingerprint_enabled);
    c.features.groups_per_atom = f.value("groups_per_atom", c.features.groups_per_atom);
    if (f.contains("bounds")) {
      for (auto it = f["bounds"].begin(); it != f["bounds"].end(); ++it)
        c.features.normalization_bounds[it.key()] = {it.value()[0], it.value()[1]};
    }
    if (f.contains("patterns_file"))
      c.features.pattern_set = load_pattern_file(f["patterns_file"]);
    if (f.contains("maccs_file")) c.features.maccs_keys = load_maccs_file(f["maccs_file"]);
  }
  if (j.contains("model")) {
    const json& m = j["model"];
    reject_unknown_keys(m,
                        {"heads", "head_dim", "final_dim", "global_hidden", "global_out",
                         "fusion_hidden", "leaky_slope", "dropout"},
                        "model");
    c.model.heads = m.value("heads", c.model.heads);
    c.model.head_dim = m.value("head_dim", c.model.head_dim);
    c.model.final_dim = m.value("final_dim", c.model.final_dim);
    c.model.global_hidden = m.value("global_hidden", c.model.global_hidden);
    c.model.global_out = m.value("global_out", c.model.global_out);
    c.model.fusion_hidden = m.value("fusion_hidden", c.model.fusion_hidden);
    c.model.leaky_slope = m.value("leaky_slope", c.model.leaky_slope);
    c.model.dropout = m.value("dropout", c.model.dropout);
  }
  c.validate();
  return c;
}

std::string train_config_to_json(const TrainConfig& c) {
  json j;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["learning_rate"] = c.learning_rate;
  j["split_fraction"] = c.split_fraction;
  j["eval_every"] = c.eval_every;
  j["save_optimizer"] = c.save_optimizer;
  j["adam"] = {{"beta1", c.adam_beta1}, {"beta2", c.adam_beta2}, {"eps", c.adam_eps}};
  j["loss"] = {{"alpha", c.loss.alpha},
               {"gamma", c.loss.gamma},
               {"lambda", c.loss.lambda},
               {"alpha1_start", c.loss.alpha1_start},
               {"alpha1_end", c.loss.alpha1_end},
               {"alpha1_ramp_epochs", c.loss.alpha1_ramp_epochs}};
  j["features"] = {{"morgan_radius", c.features.morgan_radius},
                   {"morgan_bits", c.features.morgan_bits},
                   {"maccs_bits", c.features.maccs_bits},
                   {"topo_bits", c.features.topo_bits},
                   {"atomic", c.features.atomic_enabled},
                   {"edge", c.features.edge_enabled},
                   {"fingerprint", c.features.fingerprint_enabled},
                   {"groups_per_atom", c.features.groups_per_atom}};
  j["model"] = {{"heads", c.model.heads},
                {"head_dim", c.model.head_dim},
                {"final_dim", c.model.final_dim},
                {"global_hidden", c.model.global_hidden},
                {"global_out", c.model.global_out},
                {"fusion_hidden", c.model.fusion_hidden},
                {"leaky_slope", c.model.leaky_slope},
                {"dropout", c.model.dropout}};
  return j.dump(2);
}

ModelParams clone_params(ModelParams& params) {
  ModelParams copy = params;  // copies config and tensor handles
  auto deep = [](Tensor& t) { t = Tensor::parameter(t.name(), t.shape(), t.values()); };
  for (GatLayerParams* layer : {&copy.layer1, &copy.layer2, &copy.layer3}) {
    for (Tensor& w : layer->weight) deep(w);
    for (Tensor& a : layer->att) deep(a);
    deep(layer->bn_gamma);
    deep(layer->bn_beta);
    // BatchNormState holds plain vectors, already copied by value.
  }
  deep(copy.readout_att);
  for (Tensor* t : {&copy.global_w1, &copy.global_b1, &copy.global_w2, &copy.global_b2,
                    &copy.fusion_w1, &copy.fusion_b1, &copy.fusion_w2, &copy.fusion_b2})
    deep(*t);
  return copy;
}

TrainOutput train_model(const TrainConfig& config, const std::vector<DatasetRecord>& records,
                        const ElementTable& elements) {
  config.validate();
  if (records.size() < 2) throw std::runtime_error("train: need at least 2 records");

  TrainOutput out;
  out.vocabulary = LabelVocabulary::from_records(records);
  if (out.vocabulary.size() == 0) throw std::runtime_error("train: dataset has no labels");

  std::vector<FeatureSet> sets;
  sets.reserve(records.size());
  for (const auto& rec : records)
    sets.push_back(featurize_record(rec, config.features, out.vocabulary, elements));

  auto [train_idx, test_idx] = split_indices(records.size(), config.split_fraction, config.seed);
  std::vector<FeatureSet> test_sets;
  std::vector<double> test_labels;
  for (size_t i : test_idx) {
    test_sets.push_back(sets[i]);
    test_labels.insert(test_labels.end(), sets[i].label_vector.begin(),
                       sets[i].label_vector.end());
  }

  ModelConfig model_config = config.model;
  model_config.node_dim = config.features.atom_dim();
  model_config.edge_dim = config.features.bond_dim();
  model_config.global_dim = config.features.global_dim();
  model_config.labels = out.vocabulary.size();

  Rng seed_stream(config.seed);
  uint64_t init_seed = seed_stream.fork(1).next();
  Rng shuffle_rng = seed_stream.fork(2);
  Rng dropout_rng = seed_stream.fork(3);

  out.params = ModelParams::init(model_config, init_seed);
  out.best_params = clone_params(out.params);
  std::vector<Tensor> trainable = out.params.all_parameters();
  AdamState adam;
  adam.lr = config.learning_rate;
  adam.beta1 = config.adam_beta1;
  adam.beta2 = config.adam_beta2;
  adam.eps = config.adam_eps;
  adam.init(trainable);

  auto evaluate_test = [&]() -> std::optional<MetricReport> {
    if (test_sets.empty()) return std::nullopt;
    auto probs = infer_probabilities(out.params, test_sets, config.batch_size);
    return compute_metrics(probs, test_labels, static_cast<int>(test_sets.size()),
                           out.vocabulary.size());
  };

  auto dropout_uniform = [&dropout_rng]() { return dropout_rng.uniform(); };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<size_t> order = train_idx;
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    size_t graphs_seen = 0;
    int batch_no = 0;
    for (size_t start = 0; start < order.size(); start += config.batch_size, ++batch_no) {
      size_t n = std::min<size_t>(config.batch_size, order.size() - start);
      std::vector<FeatureSet> batch_sets;
      batch_sets.reserve(n);
      for (size_t k = 0; k < n; ++k) batch_sets.push_back(sets[order[start + k]]);
      BatchGraph batch = make_batch(batch_sets);

      Tape tape;
      Tensor logits = model_forward(tape, batch, out.params, /*training=*/true, dropout_uniform);
      Tensor targets = Tensor::from({batch.num_graphs, batch.label_dim}, batch.labels);
      Tensor loss = total_loss(tape, logits, targets, epoch, config.loss, out.params);
      double loss_value = loss.item();
      if (!std::isfinite(loss_value))
        throw NumericError("non-finite loss in epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_no));
      for (Tensor& p : trainable) p.zero_grad();
      tape.backward(loss);
      adam_step(trainable, adam);

      loss_sum += loss_value * static_cast<double>(n);
      graphs_seen += n;
    }
    double epoch_loss = graphs_seen ? loss_sum / static_cast<double>(graphs_seen) : 0.0;

    std::ostringstream line;
    line << "{\"epoch\":" << epoch << ",\"alpha1\":" << format_double(config.loss.alpha1_at(epoch))
         << ",\"train_loss\":" << format_double(epoch_loss);
    bool eval_now = config.eval_every > 0 && ((epoch + 1) % config.eval_every == 0 ||
                                              epoch + 1 == config.epochs);
    if (eval_now) {
      if (auto report = evaluate_test()) {
        line << ",\"test_mean_auroc\":" << format_double(report->mean_auroc)
             << ",\"test_macro_f1\":" << format_double(report->macro_f1);
        if (report->mean_auroc > out.best_mean_auroc) {
          out.best_mean_auroc = report->mean_auroc;
          out.best_epoch = epoch;
          out.best_params = clone_params(out.params);
        }
        out.final_test_metrics = std::move(report);
      }
    }
    line << "}";
    out.log_lines.push_back(line.str());
  }

  if (out.best_epoch < 0) out.best_params = clone_params(out.params);
  return out;
}

MetricReport evaluate_model(ModelParams& params, const FeatureConfig& features,
                            const LabelVocabulary& vocabulary,
                            const std::vector<DatasetRecord>& records,
                            const ElementTable& elements, int batch_size) {
  if (records.empty()) throw std::runtime_error("evaluate: empty dataset");
  std::vector<std::string> unknown;
  std::vector<FeatureSet> sets;
  std::vector<double> labels;
  for (const auto& rec : records) {
    MolecularGraph graph = parse_smiles(rec.smiles, elements);
    FeatureSet fs = featurize_molecule(graph, features);
    fs.label_vector = vocabulary.encode(rec.labels, &unknown);
    labels.insert(labels.end(), fs.label_vector.begin(), fs.label_vector.end());
    sets.push_back(std::move(fs));
  }
  if (!unknown.empty()) {
    std::sort(unknown.begin(), unknown.end());
    unknown.erase(std::unique(unknown.begin(), unknown.end()), unknown.end());
    std::string joined;
    for (const auto& u : unknown) joined += (joined.empty() ? "" : ", ") + u;
    throw std::runtime_error("labels absent from checkpoint vocabulary: " + joined);
  }
  auto probs = infer_probabilities(params, sets, batch_size);
  return compute_metrics(probs, labels, static_cast<int>(sets.size()), vocabulary.size());
}

std::vector<Prediction> predict_smiles(ModelParams& params, const FeatureConfig& features,
                                       const LabelVocabulary& vocabulary,
                                       const std::vector<std::string>& smiles,
                                       const ElementTable& elements, int top_k, int batch_size) {
  std::vector<Prediction> out(smiles.size());
  std::vector<FeatureSet> sets;
  std::vector<size_t> ok_rows;
  for (size_t i = 0; i < smiles.size(); ++i) {
    out[i].smiles = smiles[i];
    try {
      MolecularGraph graph = parse_smiles(smiles[i], elements);
      sets.push_back(featurize_molecule(graph, features));
      ok_rows.push_back(i);
      out[i].ok = true;
    } catch (const SmilesError& e) {
      out[i].error = e.what();
    }
  }
  if (sets.empty()) return out;
  auto probs = infer_probabilities(params, sets, batch_size);
  int labels = vocabulary.size();
  for (size_t row = 0; row < ok_rows.size(); ++row) {
    auto& pred = out[ok_rows[row]];
    pred.descriptor_probs.reserve(labels);
    for (int l = 0; l < labels; ++l)
      pred.descriptor_probs.emplace_back(vocabulary.name(l),
                                         probs[row * static_cast<size_t>(labels) + l]);
    std::stable_sort(pred.descriptor_probs.begin(), pred.descriptor_probs.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (top_k > 0 && static_cast<int>(pred.descriptor_probs.size()) > top_k)
      pred.descriptor_probs.resize(top_k);
  }
  return out;
}

}  // namespace odor
