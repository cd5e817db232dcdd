#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "odor/tensor.hpp"

namespace odor {

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t step = 0;
  std::vector<std::vector<double>> m;  // first moments, aligned with params
  std::vector<std::vector<double>> v;  // second moments

  void init(const std::vector<Tensor>& params);
};

/// One Adam update with bias correction, reading each parameter's grad.
/// Throws TensorError naming the parameter on a non-finite gradient.
void adam_step(std::vector<Tensor>& params, AdamState& state);

/// Central-difference gradient check. Builds the loss through `build_loss`
/// on a fresh tape, runs backward once for analytic gradients, then
/// perturbs each checked coordinate by +-h. Returns the max over
/// coordinates of |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
/// `max_coords_per_param` < 0 checks every coordinate; otherwise that many
/// are sampled deterministically from `seed`.
double grad_check(std::vector<Tensor>& params, const std::function<Tensor(Tape&)>& build_loss,
                  double h, int max_coords_per_param = -1, uint64_t seed = 0);

}  // namespace odor
