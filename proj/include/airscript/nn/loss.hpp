#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "airscript/fastmath.hpp"

namespace airscript::nn {

constexpr std::size_t kNumClasses = 10;

inline std::array<double, kNumClasses> softmax(const double* logits) {
  std::array<double, kNumClasses> probs{};
  double max_logit = logits[0];
  for (std::size_t i = 1; i < kNumClasses; ++i) max_logit = std::max(max_logit, logits[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    probs[i] = exp_fast(logits[i] - max_logit);
    sum += probs[i];
  }
  for (auto& p : probs) p /= sum;
  return probs;
}

// -log p[label], probability clamped to >= 1e-12.
inline double cross_entropy(const std::array<double, kNumClasses>& probs, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= kNumClasses)
    throw std::invalid_argument("cross_entropy: label out of range");
  const double p = std::max(probs[static_cast<std::size_t>(label)], 1e-12);
  return -std::log(p);
}

}  // namespace airscript::nn
