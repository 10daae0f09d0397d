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

#include "structprobe/probe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "structprobe/error.hpp"
#include "structprobe/random.hpp"

namespace structprobe {
namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEpsilon = 1e-8;

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void check_dims(const ProbeParams& params, const Eigen::MatrixXd& H) {
  if (H.cols() != params.B.cols()) {
    throw Error(ErrorKind::dimension_mismatch, "embedding dim " + std::to_string(H.cols()) +
                                                   " does not match probe dim " + std::to_string(params.B.cols()));
  }
}

/// Adds `scale` x d(loss)/dB into `grad` (when non-null) and returns the sentence loss.
double distance_terms(const Eigen::MatrixXd& B, const Eigen::MatrixXd& H, const DistMatrix& gold,
                      Eigen::MatrixXd* grad, double scale) {
  const int n = static_cast<int>(H.rows());
  const Eigen::MatrixXd T = H * B.transpose();
  Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(n, n);
  double total = 0.0;
  int pairs = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!gold.reachable(i, j)) continue;
      const double residual = (T.row(i) - T.row(j)).squaredNorm() - gold.d(i, j);
      total += std::abs(residual);
      ++pairs;
      const double c = sign(residual);
      laplacian(i, i) += c;
      laplacian(j, j) += c;
      laplacian(i, j) -= c;
      laplacian(j, i) -= c;
    }
  }
  if (pairs == 0) throw Error(ErrorKind::undefined_loss, "no reachable token pairs");
  // Σ_{i<j} c_ij (t_i − t_j)(h_i − h_j)ᵀ = Tᵀ L H for the weighted Laplacian L.
  if (grad != nullptr) *grad += (2.0 * scale / pairs) * (T.transpose() * laplacian * H);
  return total / pairs;
}

double depth_terms(const Eigen::MatrixXd& B, const Eigen::MatrixXd& H, const DepthVector& gold,
                   Eigen::MatrixXd* grad, double scale) {
  const int n = static_cast<int>(H.rows());
  const Eigen::MatrixXd T = H * B.transpose();
  Eigen::VectorXd signs = Eigen::VectorXd::Zero(n);
  double total = 0.0;
  int count = 0;
  for (int i = 0; i < n; ++i) {
    if (!gold.reachable[i]) continue;
    const double residual = T.row(i).squaredNorm() - gold.depth(i);
    total += std::abs(residual);
    signs(i) = sign(residual);
    ++count;
  }
  if (count == 0) throw Error(ErrorKind::undefined_loss, "no reachable tokens");
  if (grad != nullptr) *grad += (2.0 * scale / count) * (T.transpose() * signs.asDiagonal() * H);
  return total / count;
}

double example_terms(const ProbeParams& params, const ProbeExample& ex, Eigen::MatrixXd* grad, double scale) {
  check_dims(params, ex.embeddings);
  if (params.kind == ProbeKind::distance) return distance_terms(params.B, ex.embeddings, ex.distances, grad, scale);
  return depth_terms(params.B, ex.embeddings, *ex.depths, grad, scale);
}

/// Mean loss over usable batch members; accumulates the gradient of that mean.
double batch_terms(const ProbeParams& params, ProbeBatch batch, Eigen::MatrixXd* grad) {
  const auto usable = std::count_if(batch.begin(), batch.end(),
                                    [&](const ProbeExample* ex) { return has_targets(*ex, params.kind); });
  if (usable == 0) throw Error(ErrorKind::undefined_loss, "batch has no sentence with targets");
  const double scale = 1.0 / static_cast<double>(usable);
  double total = 0.0;
  for (const ProbeExample* ex : batch) {
    if (has_targets(*ex, params.kind)) total += example_terms(params, *ex, grad, scale);
  }
  return total * scale;
}

}  // namespace

std::string_view to_string(ProbeKind kind) noexcept {
  return kind == ProbeKind::distance ? "distance" : "depth";
}

ProbeKind probe_kind_from_string(std::string_view text) {
  if (text == "distance") return ProbeKind::distance;
  if (text == "depth") return ProbeKind::depth;
  throw Error(ErrorKind::invalid_argument, "unknown probe kind '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::invalid_argument, std::string("invalid train config: ") + what);
  };
  require(rank >= 1, "rank must be >= 1");
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning rate must be positive");
  require(max_epochs >= 0, "max epochs must be >= 0");
  require(batch_size >= 1, "batch size must be >= 1");
  require(patience >= 1, "patience must be >= 1");
  require(max_train_length >= 1, "max train length must be >= 1");
}

nlohmann::json to_json(const TrainConfig& cfg) {
  return {{"rank", cfg.rank},
          {"learning_rate", cfg.learning_rate},
          {"max_epochs", cfg.max_epochs},
          {"batch_size", cfg.batch_size},
          {"patience", cfg.patience},
          {"seed", cfg.seed},
          {"max_train_length", cfg.max_train_length}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.rank = j.value("rank", cfg.rank);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.max_epochs = j.value("max_epochs", cfg.max_epochs);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.patience = j.value("patience", cfg.patience);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.max_train_length = j.value("max_train_length", cfg.max_train_length);
  return cfg;
}

ProbeCorpus build_corpus(std::span<const DepStructure> structures, const EmbeddingSet& embeddings,
                         const std::vector<std::string>* keys) {
  std::unordered_set<std::string> wanted;
  if (keys != nullptr) wanted.insert(keys->begin(), keys->end());

  ProbeCorpus corpus;
  corpus.dim = embeddings.dim();
  if (!structures.empty()) corpus.mode = structures.front().mode;
  for (const auto& s : structures) {
    if (keys != nullptr && !wanted.contains(s.sentence_id)) continue;
    const auto* matrix = embeddings.find(s.sentence_id);
    if (matrix == nullptr) {
      ++corpus.skipped_missing;
      continue;
    }
    if (static_cast<std::size_t>(matrix->rows()) != s.size()) {
      ++corpus.skipped_length_mismatch;
      continue;
    }
    ProbeExample ex;
    ex.key = s.sentence_id;
    ex.embeddings = matrix->cast<double>();
    ex.distances = gold_distances(s);
    if (!s.roots.empty()) ex.depths = gold_depths(s);
    ex.gold_edges = s.edges;
    ex.roots = s.roots;
    ex.punctuation = punctuation_mask(s);
    corpus.examples.push_back(std::move(ex));
  }
  return corpus;
}

Eigen::MatrixXd predict_sq_distances(const ProbeParams& params, const Eigen::MatrixXd& H) {
  check_dims(params, H);
  const Eigen::MatrixXd T = H * params.B.transpose();
  const auto n = T.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out(i, j) = out(j, i) = (T.row(i) - T.row(j)).squaredNorm();
    }
  }
  return out;
}

Eigen::VectorXd predict_sq_depths(const ProbeParams& params, const Eigen::MatrixXd& H) {
  check_dims(params, H);
  return (H * params.B.transpose()).rowwise().squaredNorm();
}

double distance_loss(const ProbeParams& params, const Eigen::MatrixXd& H, const DistMatrix& gold) {
  check_dims(params, H);
  if (gold.n != H.rows()) throw Error(ErrorKind::dimension_mismatch, "gold distances do not match sentence length");
  return distance_terms(params.B, H, gold, nullptr, 0.0);
}

double depth_loss(const ProbeParams& params, const Eigen::MatrixXd& H, const DepthVector& gold) {
  check_dims(params, H);
  if (gold.n != H.rows()) throw Error(ErrorKind::dimension_mismatch, "gold depths do not match sentence length");
  return depth_terms(params.B, H, gold, nullptr, 0.0);
}

bool has_targets(const ProbeExample& example, ProbeKind kind) {
  if (kind == ProbeKind::distance) return example.distances.reachable_pairs() > 0;
  return example.depths.has_value() && example.depths->reachable_count() > 0;
}

double batch_loss(const ProbeParams& params, ProbeBatch batch) { return batch_terms(params, batch, nullptr); }

Eigen::MatrixXd loss_gradient(const ProbeParams& params, ProbeBatch batch) {
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(params.B.rows(), params.B.cols());
  batch_terms(params, batch, &grad);
  return grad;
}

ProbeParams initial_params(int rank, int dim, std::uint64_t seed, ProbeKind kind) {
  ProbeParams p;
  p.kind = kind;
  p.seed = seed;
  p.B.resize(rank, dim);
  Rng rng(substream_seed(seed, "init", static_cast<std::uint64_t>(kind)));
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int r = 0; r < rank; ++r) {
    for (int c = 0; c < dim; ++c) p.B(r, c) = rng.uniform(-bound, bound);
  }
  return p;
}

TrainResult train_probe(const ProbeCorpus& train, const ProbeCorpus& dev, const TrainConfig& cfg, ProbeKind kind) {
  cfg.validate();
  if (train.examples.empty()) throw Error(ErrorKind::empty_corpus, "empty train corpus");
  if (train.dim <= 0) throw Error(ErrorKind::invalid_argument, "train corpus has no embedding dim");

  TrainResult result;
  std::vector<const ProbeExample*> train_set;
  for (const auto& ex : train.examples) {
    if (ex.size() <= cfg.max_train_length && has_targets(ex, kind)) {
      train_set.push_back(&ex);
    } else {
      ++result.skipped_train;
    }
  }
  if (train_set.empty()) throw Error(ErrorKind::empty_corpus, "all train sentences skipped (no usable targets)");

  std::vector<const ProbeExample*> dev_set;
  for (const auto& ex : dev.examples) {
    if (has_targets(ex, kind)) {
      dev_set.push_back(&ex);
    } else {
      ++result.skipped_dev;
    }
  }
  if (dev_set.empty()) {
    dev_set = train_set;
    result.dev_fallback_to_train = true;
  }
  result.train_sentences = train_set.size();
  result.dev_sentences = result.dev_fallback_to_train ? 0 : dev_set.size();

  const int rank = std::min(cfg.rank, train.dim);
  ProbeParams params = initial_params(rank, train.dim, cfg.seed, kind);
  params.trained_on = train.mode;

  ProbeParams best = params;
  double best_loss = batch_loss(params, dev_set);
  int stale = 0;

  Eigen::MatrixXd m1 = Eigen::MatrixXd::Zero(rank, train.dim);
  Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(rank, train.dim);
  double beta1_t = 1.0, beta2_t = 1.0;
  Rng batch_rng(substream_seed(cfg.seed, "batching", static_cast<std::uint64_t>(kind)));
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    auto order = train_set;
    batch_rng.shuffle(order);
    double epoch_loss = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::span<const ProbeExample* const> batch(order.data() + start,
                                                       std::min(batch_size, order.size() - start));
      Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(rank, train.dim);
      epoch_loss += batch_terms(params, batch, &grad);
      ++batches;

      beta1_t *= kBeta1;
      beta2_t *= kBeta2;
      m1 = kBeta1 * m1 + (1.0 - kBeta1) * grad;
      m2 = kBeta2 * m2 + (1.0 - kBeta2) * grad.cwiseProduct(grad);
      const Eigen::MatrixXd m_hat = m1 / (1.0 - beta1_t);
      const Eigen::MatrixXd v_hat = m2 / (1.0 - beta2_t);
      params.B -= cfg.learning_rate * (m_hat.array() / (v_hat.array().sqrt() + kEpsilon)).matrix();
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / batches;
    rec.dev_loss = batch_loss(params, dev_set);
    rec.improved = rec.dev_loss < best_loss;
    if (rec.improved) {
      best = params;
      best_loss = rec.dev_loss;
      result.best_epoch = epoch;
      stale = 0;
    } else {
      ++stale;
    }
    rec.best_dev_loss = best_loss;
    result.trace.push_back(rec);
    if (stale >= cfg.patience) break;
  }

  result.params = std::move(best);
  result.best_dev_loss = best_loss;
  return result;
}

nlohmann::json to_json(const TrainResult& r) {
  auto trace = nlohmann::json::array();
  for (const auto& e : r.trace) {
    trace.push_back({{"epoch", e.epoch},
                     {"train_loss", e.train_loss},
                     {"dev_loss", e.dev_loss},
                     {"best_dev_loss", e.best_dev_loss},
                     {"improved", e.improved}});
  }
  return {{"kind", to_string(r.params.kind)},
          {"rank", r.params.rank()},
          {"dim", r.params.dim()},
          {"best_dev_loss", r.best_dev_loss},
          {"best_epoch", r.best_epoch},
          {"train_sentences", r.train_sentences},
          {"dev_sentences", r.dev_sentences},
          {"skipped_train", r.skipped_train},
          {"skipped_dev", r.skipped_dev},
          {"dev_fallback_to_train", r.dev_fallback_to_train},
          {"trace", trace}};
}

void save_probe(const ProbeParams& params, const nlohmann::json& sidecar, const std::filesystem::path& stem) {
  EmbeddingSet set("probe", 0, params.dim());
  set.add("PROBE", params.B.cast<float>());
  auto speb = stem;
  speb += ".speb";
  write_store_file(set, speb);

  nlohmann::json meta = sidecar;
  meta["mode"] = to_string(params.kind);
  meta["trained_on"] = to_string(params.trained_on);
  meta["k"] = params.rank();
  meta["m"] = params.dim();
  meta["seed"] = params.seed;
  auto json_path = stem;
  json_path += ".json";
  std::ofstream out(json_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + json_path.string());
  out << meta.dump(2) << "\n";
}

ProbeParams load_probe(const std::filesystem::path& speb_path) {
  const auto set = read_store_file(speb_path);
  auto json_path = speb_path;
  json_path.replace_extension(".json");
  std::ifstream in(json_path, std::ios::binary);
  if (!in) throw Error(ErrorKind::missing_input, "missing probe sidecar " + json_path.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, "malformed probe sidecar " + json_path.string() + ": " + e.what());
  }
  ProbeParams p;
  p.B = set.at("PROBE").cast<double>();
  p.kind = probe_kind_from_string(meta.at("mode").get<std::string>());
  p.trained_on = parse_mode_from_string(meta.at("trained_on").get<std::string>());
  p.seed = meta.value("seed", std::uint64_t{0});
  if (!p.B.allFinite() || p.rank() < 1) throw Error(ErrorKind::non_finite, "invalid probe matrix");
  return p;
}

}  // namespace structprobe
