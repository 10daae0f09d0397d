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
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "structprobe/conllu.hpp"
#include "structprobe/embedding_store.hpp"
#include "structprobe/structure_metrics.hpp"

namespace structprobe {

enum class ProbeKind { distance, depth };

std::string_view to_string(ProbeKind kind) noexcept;
ProbeKind probe_kind_from_string(std::string_view text);

/// Linear map B (rank x dim). Predictions depend on B only through BᵀB.
struct ProbeParams {
  Eigen::MatrixXd B;
  ProbeKind kind = ProbeKind::distance;
  ParseMode trained_on = ParseMode::syntactic;
  std::uint64_t seed = 0;

  int rank() const noexcept { return static_cast<int>(B.rows()); }
  int dim() const noexcept { return static_cast<int>(B.cols()); }
};

struct TrainConfig {
  int rank = 64;
  double learning_rate = 1e-3;
  int max_epochs = 40;
  int batch_size = 20;
  int patience = 3;
  std::uint64_t seed = 0;
  int max_train_length = 50;

  /// Throws Error{invalid_argument} unless every field is positive (epochs may be 0).
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

/// One aligned sentence with its regression targets.
struct ProbeExample {
  std::string key;
  Eigen::MatrixXd embeddings;          ///< n x m, promoted from the 32-bit store
  DistMatrix distances;
  std::optional<DepthVector> depths;   ///< absent when the structure has no root
  std::set<Edge> gold_edges;
  std::set<int> roots;
  std::vector<bool> punctuation;

  int size() const noexcept { return static_cast<int>(embeddings.rows()); }
};

struct ProbeCorpus {
  std::vector<ProbeExample> examples;
  int dim = 0;
  ParseMode mode = ParseMode::syntactic;
  std::size_t skipped_missing = 0;
  std::size_t skipped_length_mismatch = 0;
};

/// Joins parses with embeddings. `keys`, when given, restricts the corpus to
/// those sentences (file order is kept). Misaligned sentences are skipped and counted.
ProbeCorpus build_corpus(std::span<const DepStructure> structures, const EmbeddingSet& embeddings,
                         const std::vector<std::string>* keys = nullptr);

/// (i, j) = ‖B(h_i − h_j)‖².
Eigen::MatrixXd predict_sq_distances(const ProbeParams& params, const Eigen::MatrixXd& H);
/// i = ‖B h_i‖².
Eigen::VectorXd predict_sq_depths(const ProbeParams& params, const Eigen::MatrixXd& H);

/// Mean over reachable pairs i < j of |d(i,j) − ‖B(h_i − h_j)‖²|.
double distance_loss(const ProbeParams& params, const Eigen::MatrixXd& H, const DistMatrix& gold);
/// Mean over reachable tokens of |depth(i) − ‖B h_i‖²|.
double depth_loss(const ProbeParams& params, const Eigen::MatrixXd& H, const DepthVector& gold);

/// True when the example contributes a defined loss for `kind`.
bool has_targets(const ProbeExample& example, ProbeKind kind);

using ProbeBatch = std::span<const ProbeExample* const>;

/// Mean per-sentence loss over the batch members that have targets.
/// Throws Error{undefined_loss} when none do.
double batch_loss(const ProbeParams& params, ProbeBatch batch);

/// Subgradient of batch_loss with respect to B (sign(0) = 0).
Eigen::MatrixXd loss_gradient(const ProbeParams& params, ProbeBatch batch);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double best_dev_loss = 0.0;
  bool improved = false;
};

struct TrainResult {
  ProbeParams params;
  std::vector<EpochRecord> trace;
  double best_dev_loss = 0.0;
  int best_epoch = 0;                 ///< 0 = initialization
  std::size_t train_sentences = 0;
  std::size_t dev_sentences = 0;
  std::size_t skipped_train = 0;      ///< too long or without targets
  std::size_t skipped_dev = 0;
  bool dev_fallback_to_train = false; ///< dev split had no usable sentences
};

/// Seeded uniform init in [−1/√m, 1/√m], Adam over shuffled sentence batches,
/// best-dev checkpointing with patience. Bitwise deterministic for fixed inputs.
TrainResult train_probe(const ProbeCorpus& train, const ProbeCorpus& dev, const TrainConfig& cfg,
                        ProbeKind kind);

ProbeParams initial_params(int rank, int dim, std::uint64_t seed, ProbeKind kind);

nlohmann::json to_json(const TrainResult& result);

/// Writes `<stem>.speb` (single "PROBE" record) and `<stem>.json` sidecar.
void save_probe(const ProbeParams& params, const nlohmann::json& sidecar, const std::filesystem::path& stem);
/// Loads a probe from its `.speb` path; the sidecar must sit next to it.
ProbeParams load_probe(const std::filesystem::path& speb_path);

}  // namespace structprobe
