#pragma once

#include <optional>
#include <string>
#include <vector>

#include "odor/checkpoint.hpp"
#include "odor/dataset.hpp"
#include "odor/loss.hpp"
#include "odor/metrics.hpp"

namespace odor {

/// Raised when training hits a non-finite loss; carries the batch identity.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& message) : std::runtime_error(message) {}
};

struct TrainConfig {
  int epochs = 100;
  int batch_size = 32;
  uint64_t seed = 1;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double split_fraction = 0.8;
  int eval_every = 10;  // test metrics cadence, 0 disables
  bool save_optimizer = false;
  LossConfig loss;      // alpha1_ramp_epochs < 0 means "span all epochs"
  FeatureConfig features;
  ModelConfig model;

  void validate() const;
};

/// Strict JSON parse mirroring the config structs; unknown keys are errors.
TrainConfig train_config_from_json(const std::string& json_text);
std::string train_config_to_json(const TrainConfig& config);

struct TrainOutput {
  ModelParams params;            // final parameters
  ModelParams best_params;       // best test mean-AUROC (== final when never evaluated)
  LabelVocabulary vocabulary;
  std::vector<std::string> log_lines;  // one JSON object per epoch
  int best_epoch = -1;
  double best_mean_auroc = -1.0;
  std::optional<MetricReport> final_test_metrics;
};

/// Seeded end-to-end training: vocabulary over the full dataset, seeded
/// 80/20 split, minibatch loop with the epoch-scheduled loss, Adam updates,
/// periodic test evaluation. Deterministic per config + seed.
TrainOutput train_model(const TrainConfig& config, const std::vector<DatasetRecord>& records,
                        const ElementTable& elements = ElementTable::builtin());

/// Inference-mode metric evaluation of a checkpoint over a dataset.
/// Throws on labels absent from the checkpoint vocabulary (listing them)
/// or an empty dataset.
MetricReport evaluate_model(ModelParams& params, const FeatureConfig& features,
                            const LabelVocabulary& vocabulary,
                            const std::vector<DatasetRecord>& records,
                            const ElementTable& elements, int batch_size = 32);

struct Prediction {
  std::string smiles;
  bool ok = false;
  std::string error;
  std::vector<std::pair<std::string, double>> descriptor_probs;  // sorted descending
};

/// Per-line prediction; parse failures are reported per input and the rest
/// still run. top_k <= 0 keeps all descriptors.
std::vector<Prediction> predict_smiles(ModelParams& params, const FeatureConfig& features,
                                       const LabelVocabulary& vocabulary,
                                       const std::vector<std::string>& smiles,
                                       const ElementTable& elements, int top_k = 0,
                                       int batch_size = 32);

/// Deep copy (parameters, batch-norm state, config).
ModelParams clone_params(ModelParams& params);

}  // namespace odor
