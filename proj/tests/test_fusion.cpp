#include <doctest.h>

#include <algorithm>
#include <array>
#include <vector>

#include "airscript/fusion.hpp"
#include "airscript/rng.hpp"
#include "oracles.hpp"

using namespace airscript;

namespace {

// scores consistent with a ranking: deterministic, strictly decreasing by rank
template <std::size_t M>
BasicRanked<M> ranked_from_order(const std::array<int, M>& order) {
  BasicRanked<M> p;
  p.labels = order;
  const double total = static_cast<double>(M * (M + 1) / 2);
  for (std::size_t pos = 0; pos < M; ++pos) {
    p.scores[static_cast<std::size_t>(order[pos])] = static_cast<double>(M - pos) / total;
  }
  return p;
}

RankedPrediction random_ranking(Rng& rng) {
  std::array<int, 10> order;
  std::vector<int> pool{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  rng.shuffle(pool);
  std::copy(pool.begin(), pool.end(), order.begin());
  return ranked_from_order<10>(order);
}

}  // namespace

TEST_SUITE("fusion") {

TEST_CASE("a single voter is returned unchanged") {
  Rng rng(501);
  for (int i = 0; i < 50; ++i) {
    const RankedPrediction voter = random_ranking(rng);
    const RankedPrediction fused = borda_fuse<10>({voter});
    CHECK(fused.labels == voter.labels);
  }
}

TEST_CASE("two agreeing top votes out of three win") {
  // voters rank 7 / 1 / 7 first and share the identical tail
  std::array<int, 10> tail_a{7, 1, 0, 2, 3, 4, 5, 6, 8, 9};
  std::array<int, 10> tail_b{1, 7, 0, 2, 3, 4, 5, 6, 8, 9};
  const std::vector<RankedPrediction> voters{ranked_from_order<10>(tail_a),
                                             ranked_from_order<10>(tail_b),
                                             ranked_from_order<10>(tail_a)};
  const RankedPrediction fused = borda_fuse(voters);
  CHECK(fused.top() == 7);

  // brute-force agreement on the same case
  std::vector<std::array<int, 10>> rankings{tail_a, tail_b, tail_a};
  std::vector<std::array<double, 10>> scores;
  for (const auto& v : voters) scores.push_back(v.scores);
  CHECK(fused.labels == oracles::brute_force_borda<10>(rankings, scores));
}

TEST_CASE("exhaustive 3-voter 4-class agreement with brute force") {
  std::vector<std::array<int, 4>> perms;
  std::array<int, 4> base{0, 1, 2, 3};
  do {
    perms.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  REQUIRE(perms.size() == 24);

  std::size_t cases = 0;
  for (const auto& a : perms) {
    for (const auto& b : perms) {
      for (const auto& c : perms) {
        const std::vector<BasicRanked<4>> voters{
            ranked_from_order<4>(a), ranked_from_order<4>(b), ranked_from_order<4>(c)};
        const auto fused = borda_fuse(voters);
        std::vector<std::array<int, 4>> rankings{a, b, c};
        std::vector<std::array<double, 4>> scores;
        for (const auto& v : voters) scores.push_back(v.scores);
        const auto expected = oracles::brute_force_borda<4>(rankings, scores);
        REQUIRE(fused.labels == expected);
        ++cases;
      }
    }
  }
  CHECK(cases == 13824);
}

TEST_CASE("voter order never changes the outcome") {
  Rng rng(502);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<RankedPrediction> voters;
    const std::size_t n = 2 + rng.index(4);
    for (std::size_t i = 0; i < n; ++i) voters.push_back(random_ranking(rng));
    const auto fused = borda_fuse(voters);
    std::vector<RankedPrediction> shuffled = voters;
    rng.shuffle(shuffled);
    const auto fused2 = borda_fuse(shuffled);
    CHECK(fused.labels == fused2.labels);
    CHECK(fused.scores == fused2.scores);
  }
}

TEST_CASE("unanimity") {
  Rng rng(503);
  for (int trial = 0; trial < 50; ++trial) {
    const RankedPrediction voter = random_ranking(rng);
    const std::vector<RankedPrediction> voters{voter, voter, voter};
    CHECK(borda_fuse(voters).labels == voter.labels);
  }
}

TEST_CASE("point conservation") {
  Rng rng(504);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RankedPrediction> voters;
    const std::size_t n = 1 + rng.index(5);
    for (std::size_t i = 0; i < n; ++i) voters.push_back(random_ranking(rng));
    const auto tally = borda_tally(voters);
    long long total = 0;
    for (long long p : tally.points) total += p;
    CHECK(total == static_cast<long long>(n) * 45);
  }
}

TEST_CASE("promoting a class never lowers its point total") {
  Rng rng(505);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<RankedPrediction> voters;
    for (int i = 0; i < 3; ++i) voters.push_back(random_ranking(rng));
    const std::size_t v = rng.index(3);
    const std::size_t pos = 1 + rng.index(9);
    const int promoted = voters[v].labels[pos];

    const auto before = borda_tally(voters);
    std::swap(voters[v].labels[pos], voters[v].labels[pos - 1]);
    const auto after = borda_tally(voters);
    CHECK(after.points[static_cast<std::size_t>(promoted)] >=
          before.points[static_cast<std::size_t>(promoted)]);
  }
}

TEST_CASE("non-permutation input is rejected") {
  RankedPrediction bad = ranked_from_order<10>({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  bad.labels[3] = 2;  // duplicate
  CHECK_THROWS_AS(borda_fuse<10>({bad}), std::invalid_argument);
  CHECK_THROWS_AS(borda_fuse(std::vector<RankedPrediction>{}), std::invalid_argument);
}

TEST_CASE("fused scores are normalized point totals") {
  Rng rng(506);
  std::vector<RankedPrediction> voters{random_ranking(rng), random_ranking(rng),
                                       random_ranking(rng)};
  const auto tally = borda_tally(voters);
  const auto fused = borda_fuse(voters);
  double sum = 0.0;
  for (std::size_t c = 0; c < 10; ++c) {
    CHECK(fused.scores[c] ==
          doctest::Approx(static_cast<double>(tally.points[c]) / 135.0).epsilon(1e-12));
    sum += fused.scores[c];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

}  // TEST_SUITE
