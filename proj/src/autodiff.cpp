#include "odor/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "odor/rng.hpp"

namespace odor {

void AdamState::init(const std::vector<Tensor>& params) {
  step = 0;
  m.clear();
  v.clear();
  for (const Tensor& p : params) {
    m.emplace_back(p.size(), 0.0);
    v.emplace_back(p.size(), 0.0);
  }
}

void adam_step(std::vector<Tensor>& params, AdamState& state) {
  if (state.m.size() != params.size()) state.init(params);
  ++state.step;
  double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& p = params[pi];
    auto& grad = p.grad();
    auto& values = p.values();
    auto& m = state.m[pi];
    auto& v = state.v[pi];
    for (size_t i = 0; i < values.size(); ++i) {
      double g = grad[i];
      if (!std::isfinite(g))
        throw TensorError("adam_step: non-finite gradient in parameter '" +
                          (p.name().empty() ? std::to_string(pi) : p.name()) + "'");
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      values[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

double grad_check(std::vector<Tensor>& params, const std::function<Tensor(Tape&)>& build_loss,
                  double h, int max_coords_per_param, uint64_t seed) {
  for (Tensor& p : params) p.zero_grad();
  std::vector<std::vector<double>> analytic;
  {
    Tape tape;
    Tensor loss = build_loss(tape);
    tape.backward(loss);
    for (Tensor& p : params) analytic.push_back(p.grad());
  }
  auto eval = [&]() {
    Tape tape;
    return build_loss(tape).item();
  };

  double max_rel = 0.0;
  Rng rng(seed);
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& p = params[pi];
    std::vector<size_t> coords;
    size_t count = p.values().size();
    if (max_coords_per_param < 0 || count <= static_cast<size_t>(max_coords_per_param)) {
      coords.resize(count);
      for (size_t i = 0; i < count; ++i) coords[i] = i;
    } else {
      for (int i = 0; i < max_coords_per_param; ++i) coords.push_back(rng.below(count));
    }
    for (size_t c : coords) {
      double saved = p.values()[c];
      p.values()[c] = saved + h;
      double fp = eval();
      p.values()[c] = saved - h;
      double fm = eval();
      p.values()[c] = saved;
      double numeric = (fp - fm) / (2.0 * h);
      double a = analytic[pi][c];
      double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace odor
