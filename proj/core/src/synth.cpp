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

#include "structprobe/synth.hpp"

#include <deque>
#include <queue>

#include <Eigen/QR>

#include "structprobe/error.hpp"

namespace structprobe {
namespace {

Eigen::MatrixXd random_orthogonal(int m, Rng& rng) {
  Eigen::MatrixXd g(m, m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) g(r, c) = rng.normal();
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < m; ++c) {
    if (r(c, c) < 0) q.col(c) *= -1.0;
  }
  return q;
}

}  // namespace

std::string_view to_string(Mixing mixing) noexcept { return mixing == Mixing::none ? "none" : "random"; }

Mixing mixing_from_string(std::string_view text) {
  if (text == "none") return Mixing::none;
  if (text == "random") return Mixing::random;
  throw Error(ErrorKind::invalid_argument, "unknown mixing '" + std::string(text) + "'");
}

void FixtureSpec::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::invalid_argument, std::string("invalid fixture spec: ") + what);
  };
  require(sentences >= 1, "sentence count must be positive");
  require(min_tokens >= 1 && max_tokens >= min_tokens, "token range must satisfy 1 <= min <= max");
  require(noise >= 0.0, "noise must be non-negative");
  require(effective_dim() >= std::max(1, max_tokens - 1), "dim must be at least max_tokens - 1");
}

std::set<Edge> prufer_decode(std::span<const int> sequence, int n) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "Prüfer decode needs n >= 1");
  if (n == 1) {
    if (!sequence.empty()) throw Error(ErrorKind::invalid_argument, "Prüfer sequence must be empty for n = 1");
    return {};
  }
  if (sequence.size() != static_cast<std::size_t>(n - 2)) {
    throw Error(ErrorKind::invalid_argument, "Prüfer sequence must have length n - 2");
  }
  std::vector<int> degree(static_cast<std::size_t>(n) + 1, 1);
  for (const int v : sequence) {
    if (v < 1 || v > n) throw Error(ErrorKind::invalid_argument, "Prüfer label out of range");
    ++degree[v];
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> leaves;
  for (int v = 1; v <= n; ++v) {
    if (degree[v] == 1) leaves.push(v);
  }
  std::set<Edge> edges;
  for (const int v : sequence) {
    const int leaf = leaves.top();
    leaves.pop();
    edges.insert(make_edge(leaf, v));
    if (--degree[v] == 1) leaves.push(v);
  }
  const int a = leaves.top();
  leaves.pop();
  edges.insert(make_edge(a, leaves.top()));
  return edges;
}

std::set<Edge> random_tree(int n, Rng& rng) {
  std::vector<int> seq(static_cast<std::size_t>(std::max(0, n - 2)));
  for (auto& v : seq) v = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  return prufer_decode(seq, n);
}

DepStructure tree_structure(const std::set<Edge>& edges, int n, int root, std::string key, std::size_t ordinal) {
  if (root < 1 || root > n) throw Error(ErrorKind::invalid_argument, "root out of range");
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n) + 1);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> head(static_cast<std::size_t>(n) + 1, -1);
  head[root] = 0;
  std::deque<int> queue{root};
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const int v : adj[u]) {
      if (head[v] < 0) {
        head[v] = u;
        queue.push_back(v);
      }
    }
  }
  std::vector<Token> tokens;
  tokens.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    Token t;
    t.index = i;
    t.form = "w" + std::to_string(i);
    t.lemma = t.form;
    t.upos = "X";
    t.head = head[i];  // -1 for disconnected input; rejected by assemble_structure
    t.deprel = head[i] == 0 ? "root" : "dep";
    tokens.push_back(std::move(t));
  }
  return assemble_structure(std::move(tokens), ParseMode::syntactic, std::move(key), ordinal);
}

Eigen::MatrixXd pythagorean_embed(const DepStructure& tree) {
  if (!tree.is_tree || tree.roots.size() != 1) {
    throw Error(ErrorKind::structure, "sentence " + tree.sentence_id + " is not a rooted tree");
  }
  const int n = static_cast<int>(tree.size());
  std::vector<int> parent(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> direction(static_cast<std::size_t>(n) + 1, -1);
  int next = 0;
  for (const auto& t : tree.tokens) {
    parent[t.index] = *t.head;
    if (*t.head != 0) direction[t.index] = next++;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, std::max(0, n - 1));
  for (int i = 1; i <= n; ++i) {
    for (int v = i; parent[v] != 0; v = parent[v]) out(i - 1, direction[v]) = 1.0;
  }
  return out;
}

Eigen::MatrixXd random_invertible(int m, Rng& rng) {
  const Eigen::MatrixXd q1 = random_orthogonal(m, rng);
  const Eigen::MatrixXd q2 = random_orthogonal(m, rng);
  Eigen::VectorXd s(m);
  for (int i = 0; i < m; ++i) s(i) = rng.uniform(0.5, 2.0);
  return q1 * s.asDiagonal() * q2.transpose();
}

Fixture make_fixture(const FixtureSpec& spec) {
  spec.validate();
  const int m = spec.effective_dim();
  Fixture fx;
  fx.embeddings = EmbeddingSet(spec.model_name, 0, m);
  if (spec.mixing == Mixing::random) {
    Rng rng(substream_seed(spec.seed, "synth/mixing"));
    fx.mixing = random_invertible(m, rng);
  } else {
    fx.mixing = Eigen::MatrixXd::Identity(m, m);
  }

  const auto span = static_cast<std::uint64_t>(spec.max_tokens - spec.min_tokens + 1);
  for (int s = 0; s < spec.sentences; ++s) {
    Rng rng(substream_seed(spec.seed, "synth/tree", static_cast<std::uint64_t>(s)));
    const int n = spec.min_tokens + static_cast<int>(rng.below(span));
    const auto edges = random_tree(n, rng);
    const int root = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    char key[32];
    std::snprintf(key, sizeof key, "synth-%06d", s);
    auto tree = tree_structure(edges, n, root, key, static_cast<std::size_t>(s));

    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(n, m);
    padded.leftCols(n - 1) = pythagorean_embed(tree);
    Eigen::MatrixXd h = padded * fx.mixing;
    if (spec.noise > 0.0) {
      Rng noise(substream_seed(spec.seed, "synth/noise", static_cast<std::uint64_t>(s)));
      for (Eigen::Index r = 0; r < h.rows(); ++r) {
        for (Eigen::Index c = 0; c < h.cols(); ++c) h(r, c) += spec.noise * noise.normal();
      }
    }
    fx.embeddings.add(tree.sentence_id, h.cast<float>());
    fx.structures.push_back(std::move(tree));
  }
  fx.conllu = write_conllu(fx.structures);
  return fx;
}

}  // namespace structprobe
