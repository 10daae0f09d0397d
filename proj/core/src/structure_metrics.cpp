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

#include "structprobe/structure_metrics.hpp"

#include <deque>
#include <vector>

#include "structprobe/error.hpp"

namespace structprobe {
namespace {

std::vector<std::vector<int>> adjacency(const DepStructure& s) {
  std::vector<std::vector<int>> adj(s.size());
  for (const auto& [a, b] : s.edges) {
    adj[a - 1].push_back(b - 1);
    adj[b - 1].push_back(a - 1);
  }
  return adj;
}

/// BFS hop counts from `sources`; -1 marks unreached nodes.
std::vector<int> bfs(const std::vector<std::vector<int>>& adj, const std::vector<int>& sources) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> queue;
  for (const int s : sources) {
    dist[s] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const int v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

}  // namespace

int DistMatrix::reachable_pairs() const {
  int count = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) count += reachable(i, j) ? 1 : 0;
  }
  return count;
}

int DepthVector::reachable_count() const {
  int count = 0;
  for (const bool r : reachable) count += r ? 1 : 0;
  return count;
}

DistMatrix gold_distances(const DepStructure& structure) {
  const int n = static_cast<int>(structure.size());
  DistMatrix out;
  out.n = n;
  out.d = Eigen::MatrixXd::Constant(n, n, n);
  out.reachable = BoolMatrix::Constant(n, n, false);
  const auto adj = adjacency(structure);
  for (int i = 0; i < n; ++i) {
    const auto dist = bfs(adj, {i});
    for (int j = 0; j < n; ++j) {
      if (dist[j] >= 0) {
        out.d(i, j) = dist[j];
        out.reachable(i, j) = true;
      }
    }
  }
  return out;
}

DepthVector gold_depths(const DepStructure& structure) {
  if (structure.roots.empty()) {
    throw Error(ErrorKind::empty_root, "sentence " + structure.sentence_id + " has no root");
  }
  const int n = static_cast<int>(structure.size());
  std::vector<int> sources;
  for (const int r : structure.roots) sources.push_back(r - 1);
  const auto dist = bfs(adjacency(structure), sources);

  DepthVector out;
  out.n = n;
  out.root_set = structure.roots;
  out.depth.resize(n);
  out.reachable.resize(n);
  for (int i = 0; i < n; ++i) {
    out.reachable[i] = dist[i] >= 0;
    out.depth(i) = dist[i] >= 0 ? dist[i] : n;
  }
  return out;
}

nlohmann::json to_json(const DistMatrix& m) {
  auto rows = nlohmann::json::array();
  for (int i = 0; i < m.n; ++i) {
    auto row = nlohmann::json::array();
    for (int j = 0; j < m.n; ++j) row.push_back(static_cast<int>(m.d(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace structprobe
