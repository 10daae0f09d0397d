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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace structprobe {

/// ascending: lower score is better (AnalogyScore); descending: higher is better.
enum class Direction { ascending, descending };

/// 1-based ranks in increasing value order; tied values share their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Rank 1 = best under `direction`; ties get average ranks.
std::vector<double> rank_scores(std::span<const double> scores, Direction direction);

/// Sample Pearson correlation. Returns NaN when either side has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

enum class CorrelationMethod { spearman_t, kendall_exact, kendall_normal };

std::string_view to_string(CorrelationMethod method) noexcept;

struct CorrelationResult {
  double coefficient = 0.0;
  double p_value = 1.0;
  CorrelationMethod method = CorrelationMethod::spearman_t;
  std::size_t n = 0;
};

/// Spearman rho with a two-sided Student-t p-value (n − 2 degrees of freedom).
CorrelationResult spearman(std::span<const double> a, std::span<const double> b);

/// Kendall tau-b. Two-sided p is exact for tie-free inputs with n <= kKendallExactMax,
/// otherwise from the tie-corrected normal approximation.
CorrelationResult kendall(std::span<const double> a, std::span<const double> b);

inline constexpr std::size_t kKendallExactMax = 10;

/// counts[k] = number of permutations of n elements with k inversions.
std::vector<std::uint64_t> exact_kendall_null(int n);

/// Two-sided exact p for `discordant` discordant pairs among n tie-free items.
double kendall_exact_p(int n, std::int64_t discordant);

struct CorrelationReport {
  std::string pair;
  CorrelationResult result;
  std::vector<double> ranks_a;
  std::vector<double> ranks_b;
};

nlohmann::json to_json(const CorrelationReport& report);

}  // namespace structprobe
