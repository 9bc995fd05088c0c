#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "airscript/tensor.hpp"

namespace airscript::nn {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double decay = 1e-6;
  std::size_t epochs = 150;
  std::size_t batch_size = 16;

  void validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("AdamConfig: learning_rate must be > 0");
    if (!(beta1 > 0.0 && beta1 < 1.0)) throw std::invalid_argument("AdamConfig: beta1 out of (0,1)");
    if (!(beta2 > 0.0 && beta2 < 1.0)) throw std::invalid_argument("AdamConfig: beta2 out of (0,1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("AdamConfig: epsilon must be > 0");
    if (decay < 0.0) throw std::invalid_argument("AdamConfig: decay must be >= 0");
    if (batch_size == 0) throw std::invalid_argument("AdamConfig: batch_size must be > 0");
  }
};

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  long long step = 0;

  static AdamState for_params(const std::vector<Tensor*>& params) {
    AdamState state;
    for (const Tensor* p : params) {
      state.m.emplace_back(p->shape());
      state.v.emplace_back(p->shape());
    }
    return state;
  }
};

// Standard Adam with bias correction; the step size additionally shrinks by
// 1 / (1 + decay * step), matching a per-iteration learning-rate decay.
inline void adam_step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
                      AdamState& state, const AdamConfig& config) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam_step: parameter/gradient arity mismatch");
  config.validate();
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double lr = config.learning_rate / (1.0 + config.decay * t);
  const double bc1 = 1.0 - std::pow(config.beta1, t);
  const double bc2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = *grads[i];
    if (!p.same_shape(g)) throw std::invalid_argument("adam_step: shape mismatch");
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    double* pd = p.data();
    const double* gd = g.data();
    double* md = m.data();
    double* vd = v.data();
    const std::size_t n = p.size();
    for (std::size_t j = 0; j < n; ++j) {
      md[j] = config.beta1 * md[j] + (1.0 - config.beta1) * gd[j];
      vd[j] = config.beta2 * vd[j] + (1.0 - config.beta2) * gd[j] * gd[j];
      const double m_hat = md[j] / bc1;
      const double v_hat = vd[j] / bc2;
      pd[j] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

}  // namespace airscript::nn
