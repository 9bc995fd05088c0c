#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <stdexcept>

namespace airscript {

// Full ranking over M classes: `labels` best-first, `scores[c]` the score of
// class c (softmax probabilities for classifier outputs, normalized Borda
// points for fused outputs).
template <std::size_t M>
struct BasicRanked {
  std::array<int, M> labels{};
  std::array<double, M> scores{};

  int top() const { return labels[0]; }
};

using RankedPrediction = BasicRanked<10>;

// Ranking from per-class scores: descending score, ties by ascending label.
template <std::size_t M>
BasicRanked<M> make_ranked(const std::array<double, M>& scores) {
  BasicRanked<M> out;
  out.scores = scores;
  std::iota(out.labels.begin(), out.labels.end(), 0);
  std::stable_sort(out.labels.begin(), out.labels.end(), [&scores](int a, int b) {
    if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)])
      return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    return a < b;
  });
  return out;
}

template <std::size_t M>
bool is_permutation_of_classes(const BasicRanked<M>& p) {
  std::array<bool, M> seen{};
  for (int label : p.labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= M) return false;
    if (seen[static_cast<std::size_t>(label)]) return false;
    seen[static_cast<std::size_t>(label)] = true;
  }
  return true;
}

}  // namespace airscript
