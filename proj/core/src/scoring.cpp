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

#include "structprobe/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "structprobe/error.hpp"

namespace structprobe {

std::vector<double> zscore_column(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorKind::invalid_argument, "z-score needs at least two values");
  const auto n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi || !(sd > 0.0)) throw Error(ErrorKind::degenerate, "z-score column has zero variance");
  std::vector<double> out;
  out.reserve(values.size());
  for (const double v : values) out.push_back((v - mean) / sd);
  return out;
}

double combine_score(double z_dspr, double z_uuas, double z_root_acc) {
  return (z_dspr + z_uuas + z_root_acc) / 3.0;
}

MahalanobisModel MahalanobisModel::fit(std::span<const Eigen::VectorXd> samples, double ridge) {
  if (samples.size() < 2) throw Error(ErrorKind::invalid_argument, "Mahalanobis fit needs at least two vectors");
  const auto m = samples.front().size();
  if (m == 0) throw Error(ErrorKind::invalid_argument, "Mahalanobis fit needs a positive dimension");
  if (ridge < 0.0) throw Error(ErrorKind::invalid_argument, "ridge must be non-negative");

  MahalanobisModel model;
  model.mean_ = Eigen::VectorXd::Zero(m);
  for (const auto& x : samples) {
    if (x.size() != m) throw Error(ErrorKind::dimension_mismatch, "Mahalanobis samples differ in dimension");
    model.mean_ += x;
  }
  model.mean_ /= static_cast<double>(samples.size());
  model.covariance_ = Eigen::MatrixXd::Zero(m, m);
  for (const auto& x : samples) {
    const Eigen::VectorXd c = x - model.mean_;
    model.covariance_.noalias() += c * c.transpose();
  }
  model.covariance_ /= static_cast<double>(samples.size() - 1);

  const double scale = model.covariance_.diagonal().mean();
  // A constant sample set has no spread to scale against; fall back to an absolute ridge.
  model.lambda_ = ridge * (scale > 0.0 ? scale : 1.0);
  Eigen::MatrixXd regularized = model.covariance_;
  regularized.diagonal().array() += model.lambda_;
  model.factor_.compute(regularized);
  if (model.factor_.info() != Eigen::Success) {
    throw Error(ErrorKind::degenerate, "covariance is not positive definite; increase the ridge");
  }
  return model;
}

double MahalanobisModel::distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  if (x.size() != mean_.size() || y.size() != mean_.size()) {
    throw Error(ErrorKind::dimension_mismatch, "Mahalanobis input dimension mismatch");
  }
  const Eigen::VectorXd diff = x - y;
  // With S + λI = L Lᵀ: diffᵀ (L Lᵀ)⁻¹ diff = ‖L⁻¹ diff‖².
  const Eigen::VectorXd w = factor_.matrixL().solve(diff);
  return std::sqrt(w.squaredNorm());
}

double mahalanobis_distance(const MahalanobisModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return model.distance(x, y);
}

Eigen::VectorXd mean_pool(const Eigen::MatrixXd& tokens) {
  if (tokens.rows() == 0) throw Error(ErrorKind::invalid_argument, "cannot pool an empty sentence");
  return tokens.colwise().mean().transpose();
}

double analogy_score(std::span<const AnalogyDataset> datasets, double ridge) {
  if (datasets.empty()) throw Error(ErrorKind::invalid_argument, "analogy score needs at least one dataset");
  double total = 0.0;
  for (const auto& ds : datasets) {
    if (ds.pairs.empty()) throw Error(ErrorKind::invalid_argument, "analogy dataset '" + ds.name + "' is empty");
    std::vector<Eigen::VectorXd> pooled;
    pooled.reserve(ds.pairs.size() * 2);
    for (const auto& [a, b] : ds.pairs) {
      pooled.push_back(mean_pool(a));
      pooled.push_back(mean_pool(b));
    }
    const auto model = MahalanobisModel::fit(pooled, ridge);
    double sum = 0.0;
    for (std::size_t i = 0; i < pooled.size(); i += 2) sum += model.distance(pooled[i], pooled[i + 1]);
    total += sum / static_cast<double>(ds.pairs.size());
  }
  return total / static_cast<double>(datasets.size());
}

std::vector<ModelScores> compose_scores(std::span<const ModelInput> models) {
  const std::size_t n = models.size();
  auto column = [&](auto getter) {
    std::vector<double> values;
    values.reserve(n);
    for (const auto& m : models) values.push_back(getter(m));
    return zscore_column(values);
  };
  const auto syn_dspr = column([](const ModelInput& m) { return m.syntactic.dspr; });
  const auto syn_uuas = column([](const ModelInput& m) { return m.syntactic.uuas; });
  const auto syn_root = column([](const ModelInput& m) { return m.syntactic.root_acc; });
  const auto sem_dspr = column([](const ModelInput& m) { return m.semantic.dspr; });
  const auto sem_uuas = column([](const ModelInput& m) { return m.semantic.uuas; });
  const auto sem_root = column([](const ModelInput& m) { return m.semantic.root_acc; });

  std::vector<ModelScores> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ModelScores s;
    s.name = models[i].name;
    s.syntactic = models[i].syntactic;
    s.semantic = models[i].semantic;
    s.syntactic_z = {syn_dspr[i], syn_uuas[i], syn_root[i]};
    s.semantic_z = {sem_dspr[i], sem_uuas[i], sem_root[i]};
    s.synt_score = combine_score(syn_dspr[i], syn_uuas[i], syn_root[i]);
    s.sem_score = combine_score(sem_dspr[i], sem_uuas[i], sem_root[i]);
    s.analogy_score = models[i].analogy_score;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ScoreRow> score_rows(std::span<const ModelScores> scores) {
  std::vector<ScoreRow> rows;
  rows.reserve(scores.size());
  for (const auto& s : scores) rows.push_back({s.name, s.analogy_score, s.synt_score, s.sem_score});
  return rows;
}

nlohmann::json to_json(std::span<const ModelScores> scores) {
  auto triple = [](const ProbeTriple& t) {
    return nlohmann::json{{"dspr", t.dspr}, {"uuas", t.uuas}, {"root_acc", t.root_acc}};
  };
  auto models = nlohmann::json::array();
  for (const auto& s : scores) {
    models.push_back({{"name", s.name},
                      {"analogy_score", s.analogy_score},
                      {"synt_score", s.synt_score},
                      {"sem_score", s.sem_score},
                      {"syntactic", triple(s.syntactic)},
                      {"semantic", triple(s.semantic)},
                      {"syntactic_z", triple(s.syntactic_z)},
                      {"semantic_z", triple(s.semantic_z)}});
  }
  return {{"models", models}};
}

std::vector<ScoreRow> score_rows_from_json(const nlohmann::json& table) {
  std::vector<ScoreRow> rows;
  try {
    for (const auto& m : table.at("models")) {
      rows.push_back({m.at("name").get<std::string>(), m.at("analogy_score").get<double>(),
                      m.at("synt_score").get<double>(), m.at("sem_score").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("malformed score table: ") + e.what());
  }
  return rows;
}

std::vector<CorrelationReport> correlate_scores(std::span<const ScoreRow> rows) {
  std::vector<double> analogy, synt, sem;
  for (const auto& r : rows) {
    analogy.push_back(r.analogy_score);
    synt.push_back(r.synt_score);
    sem.push_back(r.sem_score);
  }
  const auto ra = rank_scores(analogy, Direction::ascending);
  const auto rs = rank_scores(synt, Direction::descending);
  const auto rm = rank_scores(sem, Direction::descending);
  return {
      {"AnalogyScore~SyntScore", spearman(ra, rs), ra, rs},
      {"AnalogyScore~SyntScore", kendall(ra, rs), ra, rs},
      {"AnalogyScore~SemScore", spearman(ra, rm), ra, rm},
      {"AnalogyScore~SemScore", kendall(ra, rm), ra, rm},
  };
}

}  // namespace structprobe
