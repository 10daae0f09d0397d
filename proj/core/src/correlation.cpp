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

#include "structprobe/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "structprobe/error.hpp"

namespace structprobe {
namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::dimension_mismatch, "correlation inputs differ in length");
  if (a.size() < 3) throw Error(ErrorKind::invalid_argument, "correlation requires n >= 3");
}

bool has_ties(std::span<const double> v) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

struct TieSums {
  double pairs = 0;   // Σ t(t−1)/2
  double cubic = 0;   // Σ t(t−1)(t−2)
  double var = 0;     // Σ t(t−1)(2t+5)
};

TieSums tie_sums(std::span<const double> v) {
  std::map<double, std::size_t> counts;
  for (const double x : v) ++counts[x];
  TieSums s;
  for (const auto& [value, c] : counts) {
    const double t = static_cast<double>(c);
    s.pairs += t * (t - 1) / 2;
    s.cubic += t * (t - 1) * (t - 2);
    s.var += t * (t - 1) * (2 * t + 5);
  }
  return s;
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::vector<double> rank_scores(std::span<const double> scores, Direction direction) {
  if (direction == Direction::ascending) return average_ranks(scores);
  std::vector<double> negated(scores.begin(), scores.end());
  for (auto& x : negated) x = -x;
  return average_ranks(negated);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::string_view to_string(CorrelationMethod method) noexcept {
  switch (method) {
    case CorrelationMethod::spearman_t: return "Spearman-t";
    case CorrelationMethod::kendall_exact: return "Kendall-exact";
    case CorrelationMethod::kendall_normal: return "Kendall-normal";
  }
  return "unknown";
}

CorrelationResult spearman(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  const std::size_t n = a.size();
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);

  CorrelationResult r;
  r.method = CorrelationMethod::spearman_t;
  r.n = n;
  if (!has_ties(a) && !has_ties(b)) {
    double d2 = 0;
    for (std::size_t i = 0; i < n; ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    const double nn = static_cast<double>(n);
    r.coefficient = 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
  } else {
    r.coefficient = pearson(ra, rb);
    if (std::isnan(r.coefficient)) throw Error(ErrorKind::degenerate, "constant input to Spearman correlation");
  }
  if (std::abs(r.coefficient) >= 1.0) {
    r.p_value = 0.0;
    return r;
  }
  const double df = static_cast<double>(n - 2);
  const double t = r.coefficient * std::sqrt(df / (1.0 - r.coefficient * r.coefficient));
  const boost::math::students_t_distribution<double> dist(df);
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
  return r;
}

std::vector<std::uint64_t> exact_kendall_null(int n) {
  if (n < 1 || n > 20) throw Error(ErrorKind::invalid_argument, "exact Kendall null supports 1 <= n <= 20");
  // Inserting element k into a permutation of k−1 elements adds 0..k−1 inversions.
  std::vector<std::uint64_t> counts{1};
  for (int k = 2; k <= n; ++k) {
    std::vector<std::uint64_t> next(counts.size() + static_cast<std::size_t>(k - 1), 0);
    for (std::size_t inv = 0; inv < counts.size(); ++inv) {
      for (int add = 0; add < k; ++add) next[inv + static_cast<std::size_t>(add)] += counts[inv];
    }
    counts = std::move(next);
  }
  return counts;
}

double kendall_exact_p(int n, std::int64_t discordant) {
  const auto counts = exact_kendall_null(n);
  const std::int64_t total_pairs = static_cast<std::int64_t>(n) * (n - 1) / 2;
  const std::int64_t tail = std::min(discordant, total_pairs - discordant);
  long double cdf = 0;
  long double all = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    all += static_cast<long double>(counts[k]);
    if (static_cast<std::int64_t>(k) <= tail) cdf += static_cast<long double>(counts[k]);
  }
  return std::min(1.0, static_cast<double>(2.0L * cdf / all));
}

CorrelationResult kendall(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  const std::size_t n = a.size();
  std::int64_t concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (a[i] - a[j]) * (b[i] - b[j]);
      if (s > 0) ++concordant;
      if (s < 0) ++discordant;
    }
  }
  const double nn = static_cast<double>(n);
  const double total = nn * (nn - 1) / 2;
  const auto ta = tie_sums(a);
  const auto tb = tie_sums(b);
  const double denom = std::sqrt((total - ta.pairs) * (total - tb.pairs));
  if (denom == 0.0) throw Error(ErrorKind::degenerate, "constant input to Kendall correlation");

  CorrelationResult r;
  r.n = n;
  r.coefficient = std::clamp(static_cast<double>(concordant - discordant) / denom, -1.0, 1.0);
  const bool tie_free = ta.pairs == 0 && tb.pairs == 0;
  if (tie_free && n <= kKendallExactMax) {
    r.method = CorrelationMethod::kendall_exact;
    r.p_value = kendall_exact_p(static_cast<int>(n), discordant);
    return r;
  }
  r.method = CorrelationMethod::kendall_normal;
  const double m = nn * (nn - 1);
  const double var = (m * (2 * nn + 5) - ta.var - tb.var) / 18.0 + (2.0 * ta.pairs * tb.pairs) / m +
                     ta.cubic * tb.cubic / (9.0 * m * (nn - 2));
  const double z = static_cast<double>(concordant - discordant) / std::sqrt(var);
  const boost::math::normal_distribution<double> normal;
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(normal, std::abs(z))));
  return r;
}

nlohmann::json to_json(const CorrelationReport& report) {
  return {{"pair", report.pair},
          {"coefficient", report.result.coefficient},
          {"p_value", report.result.p_value},
          {"method", to_string(report.result.method)},
          {"n", report.result.n},
          {"ranks_a", report.ranks_a},
          {"ranks_b", report.ranks_b}};
}

}  // namespace structprobe
