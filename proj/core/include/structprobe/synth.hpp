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

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "structprobe/conllu.hpp"
#include "structprobe/embedding_store.hpp"
#include "structprobe/random.hpp"

namespace structprobe {

enum class Mixing { none, random };

std::string_view to_string(Mixing mixing) noexcept;
Mixing mixing_from_string(std::string_view text);

struct FixtureSpec {
  int sentences = 100;
  int min_tokens = 5;
  int max_tokens = 20;
  std::uint64_t seed = 0;
  int dim = 0;  ///< 0 = max_tokens − 1
  Mixing mixing = Mixing::none;
  double noise = 0.0;
  std::string model_name = "synthetic";

  int effective_dim() const noexcept { return dim > 0 ? dim : max_tokens - 1; }
  void validate() const;
};

/// Decodes a Prüfer sequence (labels 1..n, length n − 2) into the edges of a labeled tree.
std::set<Edge> prufer_decode(std::span<const int> sequence, int n);

/// Uniformly random labeled tree on n nodes.
std::set<Edge> random_tree(int n, Rng& rng);

/// Syntactic structure with HEAD pointers oriented away from `root`.
DepStructure tree_structure(const std::set<Edge>& edges, int n, int root, std::string key,
                            std::size_t ordinal = 0);

/// n x (n − 1) embedding where the edge into each non-root token (taken in token
/// order) owns one basis direction and each token is the sum along its root path.
/// Squared distances equal tree distances and squared norms equal depths.
Eigen::MatrixXd pythagorean_embed(const DepStructure& tree);

/// Q1 · diag(s) · Q2ᵀ with Haar-like orthogonal factors and s in [0.5, 2].
Eigen::MatrixXd random_invertible(int m, Rng& rng);

struct Fixture {
  std::vector<DepStructure> structures;
  std::string conllu;
  EmbeddingSet embeddings;
  Eigen::MatrixXd mixing;  ///< right-multiplied onto padded embeddings (identity for none)
};

Fixture make_fixture(const FixtureSpec& spec);

}  // namespace structprobe
