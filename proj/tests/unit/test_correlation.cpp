// Copyright 2026 The structprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "reference_tables.hpp"
#include "structprobe/correlation.hpp"
#include "structprobe/error.hpp"
#include "structprobe/random.hpp"

namespace sp = structprobe;

namespace {

std::vector<double> to_vec(const reference::Column& c) { return {c.begin(), c.end()}; }

std::vector<double> random_distinct(int n, sp::Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-5, 5);
  return v;
}

}  // namespace

TEST(Ranks, DirectionalAndTies) {
  EXPECT_EQ(sp::rank_scores(to_vec(reference::kAnalogyScore), sp::Direction::ascending),
            to_vec(reference::kAnalogyRank));
  EXPECT_EQ(sp::rank_scores(to_vec(reference::kSyntScore), sp::Direction::descending), to_vec(reference::kSyntRank));
  EXPECT_EQ(sp::rank_scores(to_vec(reference::kSemScore), sp::Direction::descending), to_vec(reference::kSemRank));
  EXPECT_EQ(sp::rank_scores(std::vector<double>{5, 5, 1}, sp::Direction::ascending),
            (std::vector<double>{2.5, 2.5, 1}));
}

TEST(RanksOracle, MatchesSortingReimplementation) {
  sp::Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + rng.below(20));
    for (auto& x : v) x = static_cast<double>(rng.below(6));  // plenty of ties
    EXPECT_EQ(sp::average_ranks(v), oracle::ranks_by_sorting(v));
  }
}

TEST(Spearman, ReferencePairs) {
  const auto ra = to_vec(reference::kAnalogyRank);
  const auto synt = sp::spearman(ra, to_vec(reference::kSyntRank));
  EXPECT_NEAR(synt.coefficient, 20.0 / 21.0, 1e-12);  // Σd² = 4
  EXPECT_NEAR(synt.p_value, 0.00026040, 1e-7);
  EXPECT_EQ(synt.method, sp::CorrelationMethod::spearman_t);
  EXPECT_EQ(synt.n, 8u);

  const auto sem = sp::spearman(ra, to_vec(reference::kSemRank));
  EXPECT_NEAR(sem.coefficient, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(sem.p_value, 0.41975, 1e-5);
}

TEST(Spearman, PerfectAndTied) {
  const std::vector<double> x{1, 2, 3, 4};
  const auto r = sp::spearman(x, x);
  EXPECT_EQ(r.coefficient, 1.0);
  EXPECT_EQ(r.p_value, 0.0);
  const std::vector<double> a{1, 2, 2, 3, 4}, b{2, 1, 3, 3, 5};
  const auto t = sp::spearman(a, b);
  EXPECT_NEAR(t.coefficient, 0.763158, 1e-6);
  EXPECT_NEAR(t.p_value, 0.133339120, 1e-8);
}

TEST(Spearman, RejectsShortOrUnequal) {
  EXPECT_THROW(sp::spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}), sp::Error);
  EXPECT_THROW(sp::spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}), sp::Error);
}

TEST(SpearmanOracle, MatchesPearsonOnSortedRanks) {
  sp::Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(15));
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<double>(rng.below(5));
      b[i] = rng.uniform();
    }
    const double expected = oracle::spearman(a, b);
    if (std::isnan(expected)) continue;
    EXPECT_NEAR(sp::spearman(a, b).coefficient, expected, 1e-12);
  }
}

TEST(Kendall, ReferencePairs) {
  const auto ra = to_vec(reference::kAnalogyRank);
  const auto synt = sp::kendall(ra, to_vec(reference::kSyntRank));
  EXPECT_NEAR(synt.coefficient, 24.0 / 28.0, 1e-12);  // 2 discordant of 28
  EXPECT_NEAR(synt.p_value, 70.0 / 40320.0, 1e-12);
  EXPECT_EQ(synt.method, sp::CorrelationMethod::kendall_exact);

  const auto sem = sp::kendall(ra, to_vec(reference::kSemRank));
  EXPECT_NEAR(sem.coefficient, 8.0 / 28.0, 1e-12);
  EXPECT_NEAR(sem.p_value, 0.39876, 1e-5);
}

TEST(Kendall, ReversedAndTied) {
  const std::vector<double> x{1, 2, 3, 4, 5}, rev{5, 4, 3, 2, 1};
  EXPECT_EQ(sp::kendall(x, rev).coefficient, -1.0);
  const std::vector<double> a{1, 2, 2, 3, 4}, b{2, 1, 3, 3, 5};
  const auto t = sp::kendall(a, b);
  EXPECT_NEAR(t.coefficient, 0.666667, 1e-6);
  EXPECT_NEAR(t.p_value, 0.118432929, 1e-8);
  EXPECT_EQ(t.method, sp::CorrelationMethod::kendall_normal);
}

TEST(Kendall, LargeTieFreeUsesNormal) {
  std::vector<double> a(12), b(12);
  std::iota(a.begin(), a.end(), 0.0);
  std::iota(b.begin(), b.end(), 0.0);
  std::swap(b[0], b[5]);
  EXPECT_EQ(sp::kendall(a, b).method, sp::CorrelationMethod::kendall_normal);
}

TEST(KendallNull, SmallCountsAndNormalization) {
  EXPECT_EQ(sp::exact_kendall_null(3), (std::vector<std::uint64_t>{1, 2, 2, 1}));
  std::uint64_t factorial = 1;
  for (int n = 1; n <= 12; ++n) {
    factorial *= n;
    const auto counts = sp::exact_kendall_null(n);
    EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}), factorial);
    for (std::size_t k = 0; k < counts.size(); ++k) EXPECT_EQ(counts[k], counts[counts.size() - 1 - k]);
  }
}

TEST(KendallNullOracle, FullEnumerationOfEightElements) {
  std::vector<int> perm(8);
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<std::uint64_t> counts(29, 0);
  do {
    ++counts[oracle::inversions(perm)];
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(sp::exact_kendall_null(8), counts);
  EXPECT_EQ(counts[0] + counts[1] + counts[2], 35u);
  EXPECT_NEAR(sp::kendall_exact_p(8, 2), 0.0017, 5e-5);
}

TEST(KendallOracle, ExactPMatchesPermutationPForSmallN) {
  sp::Rng rng(3);
  for (int n = 3; n <= 6; ++n) {
    for (int trial = 0; trial < 40; ++trial) {
      const auto x = random_distinct(n, rng);
      const auto y = random_distinct(n, rng);
      EXPECT_NEAR(sp::kendall(x, y).p_value, oracle::kendall_permutation_p(x, y), 1e-12);
    }
  }
}

TEST(CorrelationProperty, MonotoneNegationAndSelf) {
  sp::Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(12));
    const auto x = random_distinct(n, rng);
    const auto y = random_distinct(n, rng);
    std::vector<double> fx, neg;
    for (double v : x) {
      fx.push_back(std::exp(v) * 3 - 1);
      neg.push_back(-v);
    }
    EXPECT_EQ(sp::spearman(x, x).coefficient, 1.0);
    EXPECT_EQ(sp::kendall(x, x).coefficient, 1.0);
    EXPECT_NEAR(sp::spearman(fx, y).coefficient, sp::spearman(x, y).coefficient, 1e-12);
    EXPECT_NEAR(sp::kendall(fx, y).coefficient, sp::kendall(x, y).coefficient, 1e-12);
    EXPECT_NEAR(sp::spearman(neg, y).coefficient, -sp::spearman(x, y).coefficient, 1e-12);
    EXPECT_NEAR(sp::kendall(neg, y).coefficient, -sp::kendall(x, y).coefficient, 1e-12);
    const auto p = sp::spearman(x, y).p_value;
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(CorrelationReport, Json) {
  const sp::CorrelationReport r{"A~B", sp::kendall(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}),
                                {1, 2, 3}, {1, 3, 2}};
  const auto j = sp::to_json(r);
  EXPECT_EQ(j.at("pair"), "A~B");
  EXPECT_EQ(j.at("method"), "Kendall-exact");
  EXPECT_EQ(j.at("n"), 3);
  EXPECT_EQ(j.at("ranks_b").size(), 3u);
  EXPECT_TRUE(j.contains("coefficient"));
  EXPECT_TRUE(j.contains("p_value"));
}
