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

#include "structprobe/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "structprobe/embedding_store.hpp"
#include "structprobe/error.hpp"
#include "structprobe/random.hpp"
#include "structprobe/scoring.hpp"

namespace structprobe::pipeline {
namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::missing_input, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) throw Error(ErrorKind::invalid_argument, "output directory is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
}

nlohmann::json provenance(const nlohmann::json& config, std::uint64_t seed) {
  return {{"config_hash", config_hash(config)}, {"seed", seed}};
}

nlohmann::json fractions_json(const SplitFractions& f) {
  return {{"train", f.train}, {"dev", f.dev}, {"test", f.test}};
}

std::vector<std::string> keys_of(const std::vector<DepStructure>& structures) {
  std::vector<std::string> keys;
  keys.reserve(structures.size());
  for (const auto& s : structures) keys.push_back(s.sentence_id);
  return keys;
}

/// Split manifest from disk, or derived from the seed when no directory is given.
SplitManifest resolve_split(const fs::path& split_dir, const std::vector<DepStructure>& structures,
                            const SplitFractions& fractions, std::uint64_t seed) {
  if (!split_dir.empty()) return read_split(split_dir);
  return split_keys(keys_of(structures), fractions, seed);
}

nlohmann::json split_identity(const fs::path& split_dir, const SplitFractions& fractions, std::uint64_t seed) {
  if (!split_dir.empty()) {
    return {{"train", file_digest(split_dir / "split_train.txt")},
            {"dev", file_digest(split_dir / "split_dev.txt")},
            {"test", file_digest(split_dir / "split_test.txt")}};
  }
  return {{"fractions", fractions_json(fractions)}, {"seed", seed}};
}

ProbeCorpus load_subset(const std::vector<DepStructure>& structures, const EmbeddingSet& embeddings,
                        const std::vector<std::string>& keys, bool skip_misaligned, const char* split_name) {
  const std::unordered_set<std::string> wanted(keys.begin(), keys.end());
  std::vector<DepStructure> subset;
  for (const auto& s : structures) {
    if (wanted.contains(s.sentence_id)) subset.push_back(s);
  }
  if (subset.size() != wanted.size()) {
    throw Error(ErrorKind::missing_input, std::string(split_name) + " split names " +
                                              std::to_string(wanted.size() - subset.size()) +
                                              " sentence keys absent from the CoNLL-U corpus");
  }
  const auto report = validate_alignment(embeddings, subset);
  if (!report.clean() && !skip_misaligned) {
    throw Error(ErrorKind::alignment, std::string(split_name) + " split is misaligned with the embedding store: " +
                                          std::to_string(report.missing.size()) + " missing keys, " +
                                          std::to_string(report.mismatches.size()) + " length mismatches");
  }
  return build_corpus(subset, embeddings);
}

ProbeTriple triple_from_metrics(const nlohmann::json& metrics, const std::string& where) {
  ProbeTriple t;
  auto field = [&](const char* name) {
    const auto& v = metrics.at(name);
    if (v.is_null()) throw Error(ErrorKind::degenerate, where + ": metric '" + name + "' is unavailable");
    return v.get<double>();
  };
  t.dspr = field("dspr");
  t.uuas = field("uuas");
  t.root_acc = field("root_acc");
  return t;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string rank_text(double r) {
  return r == std::floor(r) ? std::to_string(static_cast<int>(r)) : fixed(r, 1);
}

}  // namespace

void SplitFractions::validate() const {
  if (!(train > 0 && dev > 0 && test > 0) || std::abs(train + dev + test - 1.0) > 1e-9) {
    throw Error(ErrorKind::invalid_argument, "split fractions must be positive and sum to 1");
  }
}

SplitManifest split_keys(std::vector<std::string> keys, const SplitFractions& fractions, std::uint64_t seed) {
  fractions.validate();
  Rng rng(substream_seed(seed, "split"));
  rng.shuffle(keys);
  const auto n = static_cast<double>(keys.size());
  auto n_train = static_cast<std::size_t>(std::llround(fractions.train * n));
  auto n_dev = static_cast<std::size_t>(std::llround(fractions.dev * n));
  n_train = std::min(n_train, keys.size());
  n_dev = std::min(n_dev, keys.size() - n_train);
  SplitManifest m;
  m.train.assign(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n_train));
  m.dev.assign(keys.begin() + static_cast<std::ptrdiff_t>(n_train),
               keys.begin() + static_cast<std::ptrdiff_t>(n_train + n_dev));
  m.test.assign(keys.begin() + static_cast<std::ptrdiff_t>(n_train + n_dev), keys.end());
  return m;
}

void write_split(const SplitManifest& manifest, const fs::path& dir) {
  ensure_dir(dir);
  auto dump = [&](const std::vector<std::string>& keys, const char* name) {
    std::string text;
    for (const auto& k : keys) text += k + "\n";
    write_text(dir / name, text);
  };
  dump(manifest.train, "split_train.txt");
  dump(manifest.dev, "split_dev.txt");
  dump(manifest.test, "split_test.txt");
}

SplitManifest read_split(const fs::path& dir) {
  auto load = [&](const char* name) {
    std::vector<std::string> keys;
    std::istringstream in(read_text(dir / name));
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) keys.push_back(line);
    }
    return keys;
  };
  return {load("split_train.txt"), load("split_dev.txt"), load("split_test.txt")};
}

std::string file_digest(const fs::path& path) { return hex64(fnv1a64(read_text(path))); }

std::string config_hash(const nlohmann::json& config) { return hex64(fnv1a64(config.dump())); }

void write_json(const fs::path& path, const nlohmann::json& value) { write_text(path, value.dump(2) + "\n"); }

nlohmann::json read_json(const fs::path& path) {
  const auto text = read_text(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

nlohmann::json run_synth(const SynthOptions& options) {
  const auto& spec = options.spec;
  const auto fixture = make_fixture(spec);
  ensure_dir(options.out);
  write_text(options.out / "fixture.conllu", fixture.conllu);
  write_store_file(fixture.embeddings, options.out / "fixture.speb");

  const nlohmann::json config = {{"command", "synth"},
                                 {"sentences", spec.sentences},
                                 {"min_tokens", spec.min_tokens},
                                 {"max_tokens", spec.max_tokens},
                                 {"dim", spec.effective_dim()},
                                 {"mixing", to_string(spec.mixing)},
                                 {"noise", spec.noise},
                                 {"model_name", spec.model_name},
                                 {"seed", spec.seed}};
  nlohmann::json summary = {
      {"config", config},
      {"provenance", provenance(config, spec.seed)},
      {"files",
       {{"fixture.conllu", file_digest(options.out / "fixture.conllu")},
        {"fixture.speb", file_digest(options.out / "fixture.speb")}}},
  };
  write_json(options.out / "synth.json", summary);
  return summary;
}

nlohmann::json run_split(const SplitOptions& options) {
  const auto structures = read_conllu_file(options.conllu, options.mode);
  const auto manifest = split_keys(keys_of(structures), options.fractions, options.seed);
  write_split(manifest, options.out);
  const nlohmann::json config = {{"command", "split"},
                                 {"mode", to_string(options.mode)},
                                 {"fractions", fractions_json(options.fractions)},
                                 {"seed", options.seed},
                                 {"inputs", {{"conllu", file_digest(options.conllu)}}}};
  nlohmann::json summary = {
      {"config", config},
      {"provenance", provenance(config, options.seed)},
      {"counts", {{"train", manifest.train.size()}, {"dev", manifest.dev.size()}, {"test", manifest.test.size()}}}};
  write_json(options.out / "split.json", summary);
  return summary;
}

nlohmann::json run_train(const TrainOptions& options) {
  const auto structures = read_conllu_file(options.conllu, options.mode);
  const auto embeddings = read_store_file(options.embeddings);
  const auto manifest = resolve_split(options.split_dir, structures, options.fractions, options.train.seed);
  const auto train = load_subset(structures, embeddings, manifest.train, options.skip_misaligned, "train");
  const auto dev = load_subset(structures, embeddings, manifest.dev, options.skip_misaligned, "dev");
  ensure_dir(options.out);

  auto probes = nlohmann::json::array();
  for (const auto kind : options.kinds) {
    const nlohmann::json config = {
        {"command", "train"},
        {"probe", to_string(kind)},
        {"mode", to_string(options.mode)},
        {"train_config", to_json(options.train)},
        {"split", split_identity(options.split_dir, options.fractions, options.train.seed)},
        {"inputs", {{"conllu", file_digest(options.conllu)}, {"embeddings", file_digest(options.embeddings)}}}};
    const auto result = train_probe(train, dev, options.train, kind);
    const nlohmann::json sidecar = {
        {"config", to_json(options.train)},
        {"final_dev_loss", result.best_dev_loss},
        {"rank_clamped", result.params.rank() < options.train.rank},
        {"model_name", embeddings.model_name()},
        {"layer", embeddings.layer()},
        {"training", to_json(result)},
        {"skipped_misaligned", train.skipped_missing + train.skipped_length_mismatch + dev.skipped_missing +
                                   dev.skipped_length_mismatch},
        {"provenance", provenance(config, options.train.seed)}};
    const auto stem = options.out / ("probe_" + std::string(to_string(kind)));
    save_probe(result.params, sidecar, stem);
    probes.push_back({{"probe", to_string(kind)},
                      {"file", stem.filename().string() + ".speb"},
                      {"final_dev_loss", result.best_dev_loss},
                      {"best_epoch", result.best_epoch},
                      {"epochs_run", result.trace.size()}});
  }
  auto kinds = nlohmann::json::array();
  for (const auto kind : options.kinds) kinds.push_back(to_string(kind));
  const nlohmann::json run_config = {
      {"command", "train"},
      {"probes", kinds},
      {"mode", to_string(options.mode)},
      {"train_config", to_json(options.train)},
      {"split", split_identity(options.split_dir, options.fractions, options.train.seed)},
      {"inputs", {{"conllu", file_digest(options.conllu)}, {"embeddings", file_digest(options.embeddings)}}}};
  nlohmann::json summary = {{"probes", probes},
                            {"train_sentences", train.examples.size()},
                            {"dev_sentences", dev.examples.size()},
                            {"provenance", provenance(run_config, options.train.seed)}};
  write_json(options.out / "train.json", summary);
  return summary;
}

nlohmann::json run_eval(const EvalRunOptions& options) {
  const auto structures = read_conllu_file(options.conllu, options.mode);
  const auto embeddings = read_store_file(options.embeddings);
  std::vector<std::string> keys;
  if (options.split == "all") {
    keys = keys_of(structures);
  } else {
    const auto manifest = resolve_split(options.split_dir, structures, options.fractions, options.seed);
    if (options.split == "train") {
      keys = manifest.train;
    } else if (options.split == "dev") {
      keys = manifest.dev;
    } else if (options.split == "test") {
      keys = manifest.test;
    } else {
      throw Error(ErrorKind::invalid_argument, "unknown split '" + options.split + "'");
    }
  }
  const auto corpus = load_subset(structures, embeddings, keys, options.skip_misaligned, options.split.c_str());
  const auto distance_path = options.probe_dir / "probe_distance.speb";
  const auto depth_path = options.probe_dir / "probe_depth.speb";
  const auto distance_probe = load_probe(distance_path);
  const auto depth_probe = load_probe(depth_path);
  const auto report = evaluate(distance_probe, depth_probe, corpus, options.eval);

  const nlohmann::json config = {
      {"command", "eval"},
      {"mode", to_string(options.mode)},
      {"split", options.split},
      {"split_source", split_identity(options.split_dir, options.fractions, options.seed)},
      {"dspr_window", {options.eval.dspr_min_length, options.eval.dspr_max_length}},
      {"inputs",
       {{"conllu", file_digest(options.conllu)},
        {"embeddings", file_digest(options.embeddings)},
        {"probe_distance", file_digest(distance_path)},
        {"probe_depth", file_digest(depth_path)}}}};
  auto metrics = to_json(report);
  metrics["model_name"] = embeddings.model_name();
  metrics["layer"] = embeddings.layer();
  metrics["mode"] = to_string(options.mode);
  metrics["split"] = options.split;
  metrics["counts"]["skipped"]["misaligned"] = corpus.skipped_missing + corpus.skipped_length_mismatch;
  metrics["provenance"] = provenance(config, options.seed);
  ensure_dir(options.out);
  write_json(options.out / "metrics.json", metrics);
  return metrics;
}

double analogy_score_from_spec(const fs::path& spec_path) {
  const auto spec = read_json(spec_path);
  const auto base = spec_path.parent_path();
  std::vector<AnalogyDataset> datasets;
  std::map<fs::path, EmbeddingSet> stores;
  try {
    for (const auto& ds : spec.at("datasets")) {
      AnalogyDataset d;
      d.name = ds.value("name", "dataset" + std::to_string(datasets.size()));
      fs::path store = ds.at("store").get<std::string>();
      if (store.is_relative()) store = base / store;
      auto it = stores.find(store);
      if (it == stores.end()) it = stores.emplace(store, read_store_file(store)).first;
      const auto& set = it->second;
      for (const auto& pair : ds.at("pairs")) {
        const auto a = pair.at(0).get<std::string>();
        const auto b = pair.at(1).get<std::string>();
        d.pairs.emplace_back(set.at(a).cast<double>(), set.at(b).cast<double>());
      }
      datasets.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, "malformed analogy spec " + spec_path.string() + ": " + e.what());
  }
  return analogy_score(datasets, spec.value("ridge", kDefaultRidge));
}

nlohmann::json run_scores(const ScoresOptions& options) {
  const auto table = read_json(options.table);
  const auto base = options.table.parent_path();
  std::vector<ModelInput> models;
  auto resolve = [&](const std::string& p) {
    fs::path path = p;
    return path.is_relative() ? base / path : path;
  };
  try {
    for (const auto& m : table.at("models")) {
      ModelInput in;
      in.name = m.at("name").get<std::string>();
      for (const auto& [field, target] : {std::pair{"syntactic", &in.syntactic}, std::pair{"semantic", &in.semantic}}) {
        const auto& v = m.at(field);
        *target = v.is_string() ? triple_from_metrics(read_json(resolve(v.get<std::string>())), in.name)
                                : triple_from_metrics(v, in.name);
      }
      if (m.contains("analogy_score")) {
        in.analogy_score = m.at("analogy_score").get<double>();
      } else {
        in.analogy_score = analogy_score_from_spec(resolve(m.at("analogy").get<std::string>()));
      }
      models.push_back(std::move(in));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, "malformed metrics table " + options.table.string() + ": " + e.what());
  }
  const auto scores = compose_scores(models);
  const nlohmann::json config = {{"command", "scores"}, {"inputs", {{"table", file_digest(options.table)}}}};
  auto out = to_json(scores);
  out["provenance"] = provenance(config, 0);
  ensure_dir(options.out);
  write_json(options.out / "scores.json", out);
  return out;
}

nlohmann::json run_correlate(const CorrelateOptions& options) {
  const auto rows = score_rows_from_json(read_json(options.scores));
  auto reports = nlohmann::json::array();
  for (const auto& r : correlate_scores(rows)) reports.push_back(to_json(r));
  auto names = nlohmann::json::array();
  for (const auto& r : rows) names.push_back(r.name);
  const nlohmann::json config = {{"command", "correlate"}, {"inputs", {{"scores", file_digest(options.scores)}}}};
  nlohmann::json out = {{"models", names}, {"reports", reports}, {"provenance", provenance(config, 0)}};
  ensure_dir(options.out);
  write_json(options.out / "correlation.json", out);
  return out;
}

nlohmann::json run_report(const ReportOptions& options) {
  struct Entry {
    std::optional<ProbeTriple> syntactic, semantic;
  };
  std::map<std::string, Entry> by_model;
  nlohmann::json input_digests = nlohmann::json::object();
  for (const auto& path : options.metrics) {
    const auto metrics = read_json(path);
    const auto name = metrics.at("model_name").get<std::string>();
    const auto mode = parse_mode_from_string(metrics.at("mode").get<std::string>());
    auto& slot = mode == ParseMode::syntactic ? by_model[name].syntactic : by_model[name].semantic;
    if (slot) throw Error(ErrorKind::duplicate_key, "duplicate " + std::string(to_string(mode)) + " metrics for " + name);
    slot = triple_from_metrics(metrics, path.string());
    input_digests[path.filename().string() + "#" + name + "#" + std::string(to_string(mode))] = file_digest(path);
  }

  const auto analogy = read_json(options.analogy);
  const auto base = options.analogy.parent_path();
  std::vector<ModelInput> models;
  for (const auto& [name, entry] : by_model) {
    if (!entry.syntactic || !entry.semantic) {
      throw Error(ErrorKind::missing_input, "model " + name + " needs both syntactic and semantic metrics");
    }
    if (!analogy.contains(name)) throw Error(ErrorKind::missing_input, "no analogy score for model " + name);
    const auto& a = analogy.at(name);
    double score = 0.0;
    if (a.is_number()) {
      score = a.get<double>();
    } else {
      fs::path p = a.get<std::string>();
      score = analogy_score_from_spec(p.is_relative() ? base / p : p);
    }
    models.push_back({name, *entry.syntactic, *entry.semantic, score});
  }
  const auto scores = compose_scores(models);
  const auto rows = score_rows(scores);
  const auto correlations = correlate_scores(rows);

  std::vector<double> analogy_col, synt_col, sem_col;
  for (const auto& r : rows) {
    analogy_col.push_back(r.analogy_score);
    synt_col.push_back(r.synt_score);
    sem_col.push_back(r.sem_score);
  }
  const auto ra = rank_scores(analogy_col, Direction::ascending);
  const auto rs = rank_scores(synt_col, Direction::descending);
  const auto rm = rank_scores(sem_col, Direction::descending);

  auto score_table = nlohmann::json::array();
  std::string md = "## Probe metrics\n\n"
                   "| Model | Syn DSpr | Syn UUAS | Syn RootAcc | Sem DSpr | Sem UUAS | Sem RootAcc "
                   "| Z Syn DSpr | Z Syn UUAS | Z Syn RootAcc | Z Sem DSpr | Z Sem UUAS | Z Sem RootAcc |\n"
                   "|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& s : scores) {
    md += "| " + s.name;
    for (const auto* t : {&s.syntactic, &s.semantic, &s.syntactic_z, &s.semantic_z}) {
      md += " | " + fixed(t->dspr, 2) + " | " + fixed(t->uuas, 2) + " | " + fixed(t->root_acc, 2);
    }
    md += " |\n";
  }
  md += "\n## Scores\n\n| Model | AnalogyScore | Rank | SyntScore | Rank | SemScore | Rank |\n"
        "|---|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    score_table.push_back({{"name", rows[i].name},
                      {"analogy_score", rows[i].analogy_score},
                      {"analogy_rank", ra[i]},
                      {"synt_score", rows[i].synt_score},
                      {"synt_rank", rs[i]},
                      {"sem_score", rows[i].sem_score},
                      {"sem_rank", rm[i]}});
    md += "| " + rows[i].name + " | " + fixed(rows[i].analogy_score, 3) + " | " + rank_text(ra[i]) + " | " +
          fixed(rows[i].synt_score, 2) + " | " + rank_text(rs[i]) + " | " + fixed(rows[i].sem_score, 2) + " | " +
          rank_text(rm[i]) + " |\n";
  }
  md += "\n## Rank correlations\n\n| Pair | Method | Coefficient | p-value | n |\n|---|---|---|---|---|\n";
  auto corr_json = nlohmann::json::array();
  for (const auto& c : correlations) {
    corr_json.push_back(to_json(c));
    md += "| " + c.pair + " | " + std::string(to_string(c.result.method)) + " | " + fixed(c.result.coefficient, 3) +
          " | " + fixed(c.result.p_value, 4) + " | " + std::to_string(c.result.n) + " |\n";
  }

  const nlohmann::json config = {
      {"command", "report"}, {"inputs", {{"metrics", input_digests}, {"analogy", file_digest(options.analogy)}}}};
  nlohmann::json out = {{"probe_metrics", to_json(scores)["models"]},
                        {"scores", score_table},
                        {"correlations", corr_json},
                        {"provenance", provenance(config, 0)}};
  ensure_dir(options.out);
  write_json(options.out / "report.json", out);
  write_text(options.out / "report.md", md);
  return out;
}

}  // namespace structprobe::pipeline
