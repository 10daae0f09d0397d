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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "structprobe/conllu.hpp"

namespace structprobe {

/// Token-by-dimension matrix as stored on disk: rows are tokens in sentence order.
using EmbeddingMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct EmbeddingRecord {
  std::string key;
  EmbeddingMatrix matrix;

  bool operator==(const EmbeddingRecord& other) const {
    return key == other.key && matrix.rows() == other.matrix.rows() &&
           matrix.cols() == other.matrix.cols() && matrix == other.matrix;
  }
};

/// Per-sentence embeddings of one (model, layer). Records keep insertion order,
/// which is also the on-disk order.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  EmbeddingSet(std::string model_name, int layer, int dim);

  /// Throws on duplicate key, wrong column count or non-finite entries.
  void add(std::string key, EmbeddingMatrix matrix);

  const EmbeddingMatrix* find(std::string_view key) const;
  const EmbeddingMatrix& at(std::string_view key) const;

  const std::string& model_name() const noexcept { return model_name_; }
  int layer() const noexcept { return layer_; }
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return records_.size(); }
  std::span<const EmbeddingRecord> records() const noexcept { return records_; }

  bool operator==(const EmbeddingSet& other) const {
    return model_name_ == other.model_name_ && layer_ == other.layer_ && dim_ == other.dim_ &&
           records_ == other.records_;
  }

 private:
  std::string model_name_;
  int layer_ = 0;
  int dim_ = 1;
  std::vector<EmbeddingRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::uint32_t kSpebVersion = 1;

/// Writes the SPEB container. Returns the number of bytes written.
std::size_t write_store(const EmbeddingSet& set, std::ostream& sink);
EmbeddingSet read_store(std::istream& source);

std::size_t write_store_file(const EmbeddingSet& set, const std::filesystem::path& path);
EmbeddingSet read_store_file(const std::filesystem::path& path);

struct LengthMismatch {
  std::string key;
  std::size_t tokens = 0;
  std::size_t rows = 0;
};

struct AlignmentReport {
  std::vector<std::string> matched;
  std::vector<std::string> missing;
  std::vector<LengthMismatch> mismatches;

  bool clean() const noexcept { return missing.empty() && mismatches.empty(); }
};

AlignmentReport validate_alignment(const EmbeddingSet& set, std::span<const DepStructure> structures);

nlohmann::json to_json(const AlignmentReport& report);

}  // namespace structprobe
