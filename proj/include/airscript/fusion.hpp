#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "airscript/ranked.hpp"

namespace airscript {

// Borda point totals plus the summed classifier scores used as the
// tie-break channel.
template <std::size_t M>
struct BasicBordaTally {
  std::array<long long, M> points{};
  std::array<double, M> score_sum{};
};

using BordaTally = BasicBordaTally<10>;

template <std::size_t M>
BasicBordaTally<M> borda_tally(const std::vector<BasicRanked<M>>& predictions) {
  if (predictions.empty()) throw std::invalid_argument("borda_tally: no predictions");
  BasicBordaTally<M> tally;
  std::array<std::vector<double>, M> per_class_scores;
  for (const auto& pred : predictions) {
    if (!is_permutation_of_classes(pred))
      throw std::invalid_argument("borda_tally: ranking is not a permutation of the classes");
    for (std::size_t pos = 0; pos < M; ++pos) {
      const auto cls = static_cast<std::size_t>(pred.labels[pos]);
      tally.points[cls] += static_cast<long long>(M - 1 - pos);
      per_class_scores[cls].push_back(pred.scores[cls]);
    }
  }
  // Summing in sorted order keeps the tie-break channel independent of the
  // order the voters arrive in.
  for (std::size_t c = 0; c < M; ++c) {
    auto& scores = per_class_scores[c];
    std::sort(scores.begin(), scores.end());
    for (double s : scores) tally.score_sum[c] += s;
  }
  return tally;
}

// Classic Borda count: the class at 0-based rank p earns M-1-p points per
// voter. Final order is by descending points, then descending summed score,
// then ascending label. Fused scores are the normalized point totals.
template <std::size_t M>
BasicRanked<M> borda_fuse(const std::vector<BasicRanked<M>>& predictions) {
  const auto tally = borda_tally(predictions);
  BasicRanked<M> fused;
  std::iota(fused.labels.begin(), fused.labels.end(), 0);
  std::stable_sort(fused.labels.begin(), fused.labels.end(), [&tally](int a, int b) {
    const auto ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
    if (tally.points[ia] != tally.points[ib]) return tally.points[ia] > tally.points[ib];
    if (tally.score_sum[ia] != tally.score_sum[ib]) return tally.score_sum[ia] > tally.score_sum[ib];
    return a < b;
  });
  const double total = static_cast<double>(predictions.size()) *
                       static_cast<double>(M * (M - 1) / 2);
  for (std::size_t c = 0; c < M; ++c) {
    fused.scores[c] = static_cast<double>(tally.points[c]) / total;
  }
  return fused;
}

}  // namespace airscript
