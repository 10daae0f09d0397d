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

#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "structprobe/conllu.hpp"

namespace structprobe {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Gold pairwise hop counts on the undirected edge set. Unreachable pairs hold n.
struct DistMatrix {
  int n = 0;
  Eigen::MatrixXd d;
  BoolMatrix reachable;

  /// Number of unordered reachable pairs i < j.
  int reachable_pairs() const;
};

/// Gold hop count from the nearest root. Tokens unreachable from every root hold n.
struct DepthVector {
  int n = 0;
  Eigen::VectorXi depth;
  std::set<int> root_set;  ///< 1-based token indices
  std::vector<bool> reachable;

  int reachable_count() const;
};

DistMatrix gold_distances(const DepStructure& structure);

/// Throws Error{empty_root} when the structure has no root.
DepthVector gold_depths(const DepStructure& structure);

/// Debug dump: array of rows, unreachable entries included as the sentinel value.
nlohmann::json to_json(const DistMatrix& m);

}  // namespace structprobe
