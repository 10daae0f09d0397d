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

// Brute-force reference implementations used only by tests. None of these call
// into structprobe::core, so they stay independent of the code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace oracle {

using Edge = std::pair<int, int>;  // 1-based, first < second

/// All-pairs shortest hop counts; -1 marks unreachable pairs.
inline std::vector<std::vector<int>> floyd_warshall(int n, const std::set<Edge>& edges) {
  const int inf = std::numeric_limits<int>::max() / 4;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (int i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& [a, b] : edges) d[a - 1][b - 1] = d[b - 1][a - 1] = 1;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  for (auto& row : d) {
    for (auto& x : row) x = x >= inf ? -1 : x;
  }
  return d;
}

/// Depth of every node by walking parent pointers (parent[root] = 0, 1-based).
inline std::vector<int> walk_depths(const std::vector<int>& parent) {
  const int n = static_cast<int>(parent.size()) - 1;
  std::vector<int> depth(n, 0);
  for (int i = 1; i <= n; ++i) {
    for (int v = i; parent[v] != 0; v = parent[v]) ++depth[i - 1];
  }
  return depth;
}

/// Lowest common ancestor by comparing ancestor chains.
inline int lca(const std::vector<int>& parent, int a, int b) {
  std::vector<int> chain;
  for (int v = a; v != 0; v = parent[v]) chain.push_back(v);
  for (int v = b; v != 0; v = parent[v]) {
    if (std::find(chain.begin(), chain.end(), v) != chain.end()) return v;
  }
  return 0;
}

/// Straightforward O(n^2) Prüfer decoding over labels 1..n.
inline std::set<Edge> prufer_tree(const std::vector<int>& seq, int n) {
  std::vector<int> degree(n + 1, 1);
  for (int v : seq) ++degree[v];
  std::set<Edge> edges;
  for (int v : seq) {
    for (int leaf = 1; leaf <= n; ++leaf) {
      if (degree[leaf] == 1) {
        edges.insert({std::min(leaf, v), std::max(leaf, v)});
        --degree[leaf];
        --degree[v];
        break;
      }
    }
  }
  int u = 0, w = 0;
  for (int i = 1; i <= n; ++i) {
    if (degree[i] == 1) (u == 0 ? u : w) = i;
  }
  edges.insert({u, w});
  return edges;
}

/// Minimum-cost spanning tree over `vertices` (0-based) by enumerating all
/// Cayley-labeled trees through their Prüfer sequences. Returns 1-based edges.
inline std::set<Edge> brute_force_mst(const Eigen::MatrixXd& w, const std::vector<int>& vertices) {
  const int n = static_cast<int>(vertices.size());
  if (n == 2) return {{vertices[0] + 1, vertices[1] + 1}};
  std::vector<int> seq(n - 2, 1);
  double best = std::numeric_limits<double>::infinity();
  std::set<Edge> best_tree;
  while (true) {
    const auto tree = prufer_tree(seq, n);
    double cost = 0;
    for (const auto& [a, b] : tree) cost += w(vertices[a - 1], vertices[b - 1]);
    if (cost < best) {
      best = cost;
      best_tree.clear();
      for (const auto& [a, b] : tree) {
        const int x = vertices[a - 1] + 1, y = vertices[b - 1] + 1;
        best_tree.insert({std::min(x, y), std::max(x, y)});
      }
    }
    int pos = 0;
    while (pos < n - 2 && seq[pos] == n) seq[pos++] = 1;
    if (pos == n - 2) break;
    ++seq[pos];
  }
  return best_tree;
}

/// Average-tie ranks computed by sorting values together with their positions.
inline std::vector<double> ranks_by_sorting(const std::vector<double>& v) {
  std::vector<std::pair<double, int>> tagged;
  for (int i = 0; i < static_cast<int>(v.size()); ++i) tagged.push_back({v[i], i});
  std::sort(tagged.begin(), tagged.end());
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < tagged.size()) {
    std::size_t j = i;
    while (j < tagged.size() && tagged[j].first == tagged[i].first) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) r[tagged[k].second] = avg;
    i = j;
  }
  return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
    sab += a[i] * b[i];
  }
  const double cov = sab - sa * sb / n;
  const double va = saa - sa * sa / n, vb = sbb - sb * sb / n;
  if (va <= 1e-15 || vb <= 1e-15) return std::numeric_limits<double>::quiet_NaN();
  return cov / std::sqrt(va * vb);
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson(ranks_by_sorting(a), ranks_by_sorting(b));
}

inline int inversions(const std::vector<int>& perm) {
  int count = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = i + 1; j < perm.size(); ++j) count += perm[i] > perm[j] ? 1 : 0;
  }
  return count;
}

/// Kendall tau of a permutation against the identity.
inline double tau_of(const std::vector<int>& perm) {
  const double n = static_cast<double>(perm.size());
  return 1.0 - 4.0 * inversions(perm) / (n * (n - 1.0));
}

/// Two-sided permutation p-value of Kendall tau for tie-free y against x.
inline double kendall_permutation_p(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  // Re-express y in the order of increasing x, as a permutation of ranks.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return x[a] < x[b]; });
  const auto ry = ranks_by_sorting(y);
  std::vector<int> observed;
  for (int i : order) observed.push_back(static_cast<int>(ry[i]));
  const double tau_obs = std::abs(tau_of(observed));

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 1);
  std::uint64_t extreme = 0, total = 0;
  do {
    ++total;
    if (std::abs(tau_of(perm)) >= tau_obs - 1e-12) ++extreme;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

/// (h_i − h_j)ᵀ BᵀB (h_i − h_j) evaluated as an explicit quadratic form.
inline double quadratic_form(const Eigen::MatrixXd& B, const Eigen::VectorXd& v) {
  const Eigen::MatrixXd A = B.transpose() * B;
  double s = 0;
  for (int a = 0; a < v.size(); ++a) {
    for (int b = 0; b < v.size(); ++b) s += v(a) * A(a, b) * v(b);
  }
  return s;
}

}  // namespace oracle
