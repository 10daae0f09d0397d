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

#include "structprobe/probe_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "structprobe/correlation.hpp"
#include "structprobe/error.hpp"

namespace structprobe {
namespace {

struct DisjointSet {
  explicit DisjointSet(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }

  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }

  std::vector<int> parent;
};

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::optional<std::vector<Edge>> mst_edges(const Eigen::MatrixXd& sq_dist, const std::vector<bool>& excluded) {
  const int n = static_cast<int>(sq_dist.rows());
  if (sq_dist.cols() != n || excluded.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::dimension_mismatch, "mst_edges: matrix and mask sizes differ");
  }
  std::vector<int> vertices;
  for (int i = 0; i < n; ++i) {
    if (!excluded[i]) vertices.push_back(i);
  }
  if (vertices.size() < 2) return std::nullopt;

  std::vector<std::tuple<double, int, int>> candidates;
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    for (std::size_t b = a + 1; b < vertices.size(); ++b) {
      const int i = vertices[a], j = vertices[b];
      candidates.emplace_back(sq_dist(i, j), i, j);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  DisjointSet sets(n);
  std::vector<Edge> tree;
  tree.reserve(vertices.size() - 1);
  for (const auto& [w, i, j] : candidates) {
    if (sets.unite(i, j)) {
      tree.emplace_back(i + 1, j + 1);
      if (tree.size() + 1 == vertices.size()) break;
    }
  }
  return tree;
}

UuasTally uuas_tally(const std::vector<Edge>& predicted, const std::set<Edge>& gold,
                     const std::vector<bool>& punctuation) {
  auto content = [&](int token) { return !punctuation[static_cast<std::size_t>(token - 1)]; };
  UuasTally tally;
  for (const auto& e : gold) {
    if (content(e.first) && content(e.second)) ++tally.total;
  }
  for (const auto& raw : predicted) {
    const auto e = make_edge(raw.first, raw.second);
    if (content(e.first) && content(e.second) && gold.contains(e)) ++tally.correct;
  }
  return tally;
}

std::optional<double> uuas(const std::vector<Edge>& predicted, const std::set<Edge>& gold,
                           const std::vector<bool>& punctuation) {
  const auto tally = uuas_tally(predicted, gold, punctuation);
  if (tally.total == 0) return std::nullopt;
  return static_cast<double>(tally.correct) / static_cast<double>(tally.total);
}

std::optional<double> sentence_dspr(const DistMatrix& gold, const Eigen::MatrixXd& predicted) {
  const int n = gold.n;
  double sum = 0.0;
  int rows = 0;
  std::vector<double> g, p;
  for (int i = 0; i < n; ++i) {
    g.clear();
    p.clear();
    for (int j = 0; j < n; ++j) {
      if (!gold.reachable(i, j)) continue;
      g.push_back(gold.d(i, j));
      p.push_back(predicted(i, j));
    }
    if (g.size() < 2) continue;
    const double rho = pearson(average_ranks(g), average_ranks(p));
    if (std::isnan(rho)) continue;
    sum += rho;
    ++rows;
  }
  if (rows == 0) return std::nullopt;
  return sum / rows;
}

std::optional<bool> root_correct(const Eigen::VectorXd& predicted_depths, const std::set<int>& roots,
                                 const std::vector<bool>& punctuation) {
  if (roots.empty()) return std::nullopt;
  int best = -1;
  for (int i = 0; i < predicted_depths.size(); ++i) {
    if (punctuation[static_cast<std::size_t>(i)]) continue;
    if (best < 0 || predicted_depths(i) < predicted_depths(best)) best = i;
  }
  if (best < 0) return std::nullopt;
  return roots.contains(best + 1);
}

MetricResult dspr(const ProbeParams& params, const ProbeCorpus& corpus, const EvalOptions& options) {
  MetricResult out;
  double sum = 0.0;
  for (const auto& ex : corpus.examples) {
    if (ex.size() < options.dspr_min_length || ex.size() > options.dspr_max_length) continue;
    const auto value = sentence_dspr(ex.distances, predict_sq_distances(params, ex.embeddings));
    if (!value) continue;
    sum += *value;
    ++out.sentences;
  }
  if (out.sentences > 0) out.value = sum / static_cast<double>(out.sentences);
  return out;
}

MetricResult root_acc(const ProbeParams& params, const ProbeCorpus& corpus) {
  MetricResult out;
  std::size_t correct = 0;
  for (const auto& ex : corpus.examples) {
    const auto hit = root_correct(predict_sq_depths(params, ex.embeddings), ex.roots, ex.punctuation);
    if (!hit) continue;
    correct += *hit ? 1 : 0;
    ++out.sentences;
  }
  if (out.sentences > 0) out.value = static_cast<double>(correct) / static_cast<double>(out.sentences);
  return out;
}

MetricsReport evaluate(const ProbeParams& distance_probe, const ProbeParams& depth_probe,
                       const ProbeCorpus& corpus, const EvalOptions& options) {
  MetricsReport r;
  r.sentences = corpus.examples.size();
  double dspr_sum = 0.0;
  std::size_t root_hits = 0;

  for (const auto& ex : corpus.examples) {
    const auto sq = predict_sq_distances(distance_probe, ex.embeddings);

    if (const auto tree = mst_edges(sq, ex.punctuation)) {
      const auto tally = uuas_tally(*tree, ex.gold_edges, ex.punctuation);
      if (tally.total == 0) {
        ++r.skip_uuas_no_gold_edges;
      } else {
        r.uuas_correct += tally.correct;
        r.uuas_gold_edges += tally.total;
        ++r.uuas_sentences;
      }
    } else {
      ++r.skip_uuas_too_few_tokens;
    }

    if (ex.size() < options.dspr_min_length || ex.size() > options.dspr_max_length) {
      ++r.skip_dspr_length_window;
    } else if (const auto value = sentence_dspr(ex.distances, sq)) {
      dspr_sum += *value;
      ++r.dspr_sentences;
    } else {
      ++r.skip_dspr_no_rows;
    }

    if (ex.roots.empty()) {
      ++r.skip_root_no_root;
    } else if (const auto hit = root_correct(predict_sq_depths(depth_probe, ex.embeddings), ex.roots,
                                             ex.punctuation)) {
      root_hits += *hit ? 1 : 0;
      ++r.root_sentences;
    } else {
      ++r.skip_root_no_candidate;
    }
  }

  if (r.uuas_gold_edges > 0) r.uuas = static_cast<double>(r.uuas_correct) / static_cast<double>(r.uuas_gold_edges);
  if (r.dspr_sentences > 0) r.dspr = dspr_sum / static_cast<double>(r.dspr_sentences);
  if (r.root_sentences > 0) r.root_acc = static_cast<double>(root_hits) / static_cast<double>(r.root_sentences);
  return r;
}

nlohmann::json to_json(const MetricsReport& r) {
  return {{"uuas", optional_json(r.uuas)},
          {"dspr", optional_json(r.dspr)},
          {"root_acc", optional_json(r.root_acc)},
          {"counts",
           {{"sentences", r.sentences},
            {"uuas_sentences", r.uuas_sentences},
            {"uuas_correct_edges", r.uuas_correct},
            {"uuas_gold_edges", r.uuas_gold_edges},
            {"dspr_sentences", r.dspr_sentences},
            {"root_acc_sentences", r.root_sentences},
            {"skipped",
             {{"uuas_too_few_tokens", r.skip_uuas_too_few_tokens},
              {"uuas_no_gold_edges", r.skip_uuas_no_gold_edges},
              {"dspr_length_window", r.skip_dspr_length_window},
              {"dspr_no_rows", r.skip_dspr_no_rows},
              {"root_acc_no_root", r.skip_root_no_root},
              {"root_acc_no_candidate", r.skip_root_no_candidate}}}}}};
}

}  // namespace structprobe
