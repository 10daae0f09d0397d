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
#include <optional>
#include <set>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "structprobe/probe.hpp"

namespace structprobe {

/// Minimum spanning tree over the tokens not in `excluded`, weighted by predicted
/// squared distance. Ties are broken by lexicographic (i, j). Edges are 1-based.
/// Returns nullopt (metric skip) when fewer than two tokens remain.
std::optional<std::vector<Edge>> mst_edges(const Eigen::MatrixXd& sq_dist, const std::vector<bool>& excluded);

struct UuasTally {
  std::size_t correct = 0;
  std::size_t total = 0;  ///< gold edges with both endpoints non-punctuation
};

UuasTally uuas_tally(const std::vector<Edge>& predicted, const std::set<Edge>& gold,
                     const std::vector<bool>& punctuation);

/// Fraction of non-punctuation gold edges present in `predicted`; nullopt when there are none.
std::optional<double> uuas(const std::vector<Edge>& predicted, const std::set<Edge>& gold,
                           const std::vector<bool>& punctuation);

/// Mean over tokens of the Spearman correlation between the token's gold and
/// predicted distance rows, restricted to reachable entries. Rows with fewer than
/// two entries or constant values are dropped; nullopt when no row survives.
std::optional<double> sentence_dspr(const DistMatrix& gold, const Eigen::MatrixXd& predicted);

/// Whether the non-punctuation token with the smallest predicted depth (lowest
/// index on ties) is a gold root. nullopt when there is no root or no candidate.
std::optional<bool> root_correct(const Eigen::VectorXd& predicted_depths, const std::set<int>& roots,
                                 const std::vector<bool>& punctuation);

struct EvalOptions {
  int dspr_min_length = 5;
  int dspr_max_length = 50;
};

struct MetricResult {
  std::optional<double> value;
  std::size_t sentences = 0;
};

MetricResult dspr(const ProbeParams& params, const ProbeCorpus& corpus, const EvalOptions& options = {});
MetricResult root_acc(const ProbeParams& params, const ProbeCorpus& corpus);

struct MetricsReport {
  std::optional<double> uuas;
  std::optional<double> dspr;
  std::optional<double> root_acc;

  std::size_t sentences = 0;
  std::size_t uuas_sentences = 0;
  std::size_t dspr_sentences = 0;
  std::size_t root_sentences = 0;
  std::size_t uuas_correct = 0;
  std::size_t uuas_gold_edges = 0;

  std::size_t skip_uuas_too_few_tokens = 0;
  std::size_t skip_uuas_no_gold_edges = 0;
  std::size_t skip_dspr_length_window = 0;
  std::size_t skip_dspr_no_rows = 0;
  std::size_t skip_root_no_root = 0;
  std::size_t skip_root_no_candidate = 0;
};

/// UUAS is pooled over the corpus (correct edges / gold edges); DSpr and RootAcc
/// average per sentence.
MetricsReport evaluate(const ProbeParams& distance_probe, const ProbeParams& depth_probe,
                       const ProbeCorpus& corpus, const EvalOptions& options = {});

nlohmann::json to_json(const MetricsReport& report);

}  // namespace structprobe
