#include "odor/loss.hpp"

#include <algorithm>
#include <stdexcept>

namespace odor {

void LossConfig::validate() const {
  if (alpha <= 0.0 || alpha > 1.0) throw std::runtime_error("loss config: alpha must be in (0,1]");
  if (gamma < 0.0) throw std::runtime_error("loss config: gamma must be >= 0");
  if (lambda < 0.0) throw std::runtime_error("loss config: lambda must be >= 0");
  if (alpha1_end < alpha1_start)
    throw std::runtime_error("loss config: alpha1 schedule must be nondecreasing");
  if (alpha1_ramp_epochs < 0) throw std::runtime_error("loss config: ramp epochs must be >= 0");
}

double LossConfig::alpha1_at(int epoch) const {
  if (alpha1_ramp_epochs == 0) return alpha1_end;
  double frac = std::clamp(static_cast<double>(epoch) / alpha1_ramp_epochs, 0.0, 1.0);
  return alpha1_start + (alpha1_end - alpha1_start) * frac;
}

Tensor bce(Tape& t, const Tensor& logits, const Tensor& targets) {
  return bce_with_logits(t, logits, targets);
}

Tensor focal(Tape& t, const Tensor& logits, const Tensor& targets, double alpha, double gamma) {
  Tensor base = bce_with_logits(t, logits, targets);
  if (gamma == 0.0) return affine(t, base, alpha, 0.0);
  Tensor s = sigmoid(t, logits);
  // p_t = y*s + (1-y)*(1-s); targets are 0/1 constants.
  Tensor pt = add(t, mul(t, targets, s), mul(t, affine(t, targets, -1.0, 1.0), affine(t, s, -1.0, 1.0)));
  Tensor modulator = pow_const(t, affine(t, pt, -1.0, 1.0), gamma);
  return affine(t, mul(t, modulator, base), alpha, 0.0);
}

Tensor adaptive_loss(Tape& t, const Tensor& logits, const Tensor& targets, int epoch,
                     const LossConfig& config) {
  config.validate();
  double a1 = config.alpha1_at(epoch);
  Tensor focal_mean = mean(t, focal(t, logits, targets, config.alpha, config.gamma));
  Tensor bce_mean = mean(t, bce(t, logits, targets));
  return add(t, affine(t, focal_mean, a1, 0.0), affine(t, bce_mean, 1.0 - a1, 0.0));
}

Tensor l2_penalty(Tape& t, ModelParams& params, double lambda) {
  Tensor total = Tensor::scalar(0.0);
  for (Tensor& w : params.weight_parameters()) total = add(t, total, sum(t, mul(t, w, w)));
  return affine(t, total, lambda, 0.0);
}

Tensor total_loss(Tape& t, const Tensor& logits, const Tensor& targets, int epoch,
                  const LossConfig& config, ModelParams& params) {
  return add(t, adaptive_loss(t, logits, targets, epoch, config),
             l2_penalty(t, params, config.lambda));
}

}  // namespace odor
