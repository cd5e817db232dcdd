#pragma once

#include "odor/model.hpp"
#include "odor/tensor.hpp"

namespace odor {

struct LossConfig {
  double alpha = 0.5;       // focal weighting
  double gamma = 2.0;       // focal exponent
  double lambda = 0.00001;  // L2 coefficient
  // alpha1 ramps linearly from start to end over ramp_epochs, then holds.
  double alpha1_start = 0.1;
  double alpha1_end = 0.9;
  int alpha1_ramp_epochs = 100;

  void validate() const;
  double alpha1_at(int epoch) const;
};

/// Per-element stable binary cross-entropy from logits.
Tensor bce(Tape& t, const Tensor& logits, const Tensor& targets);

/// Per-element focal loss: alpha * (1 - p_t)^gamma * bce, with
/// p_t = sigmoid(x)^y * (1 - sigmoid(x))^(1-y).
Tensor focal(Tape& t, const Tensor& logits, const Tensor& targets, double alpha, double gamma);

/// Mean over elements of the epoch-scheduled blend
/// alpha1 * focal + (1 - alpha1) * bce.
Tensor adaptive_loss(Tape& t, const Tensor& logits, const Tensor& targets, int epoch,
                     const LossConfig& config);

/// lambda * sum of squared entries over weight matrices and attention
/// vectors; biases and batch-norm scale/shift are excluded.
Tensor l2_penalty(Tape& t, ModelParams& params, double lambda);

/// adaptive_loss + l2_penalty.
Tensor total_loss(Tape& t, const Tensor& logits, const Tensor& targets, int epoch,
                  const LossConfig& config, ModelParams& params);

}  // namespace odor
