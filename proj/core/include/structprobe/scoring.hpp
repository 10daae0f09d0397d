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

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "structprobe/correlation.hpp"

namespace structprobe {

/// (v − mean) / population standard deviation. Throws Error{degenerate} for a
/// constant column and Error{invalid_argument} for fewer than two values.
std::vector<double> zscore_column(std::span<const double> values);

/// Arithmetic mean of the three z-scored probe metrics of one parse mode.
double combine_score(double z_dspr, double z_uuas, double z_root_acc);

inline constexpr double kDefaultRidge = 1e-3;

/// Gaussian fit used for Mahalanobis distances: sample mean, unbiased covariance S
/// and a ridge λ = ε · mean(diag S) so that S + λI is positive definite.
class MahalanobisModel {
 public:
  static MahalanobisModel fit(std::span<const Eigen::VectorXd> samples, double ridge = kDefaultRidge);

  /// sqrt((x − y)ᵀ (S + λI)⁻¹ (x − y)).
  double distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  double lambda() const noexcept { return lambda_; }
  int dim() const noexcept { return static_cast<int>(mean_.size()); }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  double lambda_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

double mahalanobis_distance(const MahalanobisModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Sentence embedding as the mean of its token rows.
Eigen::VectorXd mean_pool(const Eigen::MatrixXd& tokens);

/// Token matrices of analogous sentence pairs drawn from one dataset.
struct AnalogyDataset {
  std::string name;
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> pairs;
};

/// Mean Mahalanobis distance per dataset (fitted on that dataset's sentences),
/// averaged across datasets. Lower is better.
double analogy_score(std::span<const AnalogyDataset> datasets, double ridge = kDefaultRidge);

struct ProbeTriple {
  double dspr = 0.0;
  double uuas = 0.0;
  double root_acc = 0.0;
};

struct ModelInput {
  std::string name;
  ProbeTriple syntactic;
  ProbeTriple semantic;
  double analogy_score = 0.0;
};

struct ModelScores {
  std::string name;
  ProbeTriple syntactic;   ///< original probe metrics
  ProbeTriple semantic;
  ProbeTriple syntactic_z;
  ProbeTriple semantic_z;
  double synt_score = 0.0;
  double sem_score = 0.0;
  double analogy_score = 0.0;
};

/// Z-normalizes each metric column across models and combines per parse mode.
std::vector<ModelScores> compose_scores(std::span<const ModelInput> models);

/// Minimal per-model row needed for correlation runs.
struct ScoreRow {
  std::string name;
  double analogy_score = 0.0;
  double synt_score = 0.0;
  double sem_score = 0.0;
};

std::vector<ScoreRow> score_rows(std::span<const ModelScores> scores);

nlohmann::json to_json(std::span<const ModelScores> scores);

/// Accepts either a composed score table or an external table with at least
/// {name, analogy_score, synt_score, sem_score} per model under "models".
std::vector<ScoreRow> score_rows_from_json(const nlohmann::json& table);

/// SRC and KRC of AnalogyScore (ascending) against SyntScore and SemScore
/// (descending), computed on directional rank vectors.
std::vector<CorrelationReport> correlate_scores(std::span<const ScoreRow> rows);

}  // namespace structprobe
