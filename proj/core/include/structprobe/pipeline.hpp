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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "structprobe/conllu.hpp"
#include "structprobe/probe.hpp"
#include "structprobe/probe_eval.hpp"
#include "structprobe/synth.hpp"

// Subcommand drivers used by the structprobe tool. Each reads its inputs, writes
// JSON artifacts under `out` and returns the summary it wrote. Failures surface
// as structprobe::Error.

namespace structprobe::pipeline {

namespace fs = std::filesystem;

struct SplitFractions {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;

  void validate() const;
};

struct SplitManifest {
  std::vector<std::string> train;
  std::vector<std::string> dev;
  std::vector<std::string> test;
};

/// Seeded shuffle of `keys` partitioned by rounded fractions; test takes the remainder.
SplitManifest split_keys(std::vector<std::string> keys, const SplitFractions& fractions, std::uint64_t seed);

/// Writes split_{train,dev,test}.txt, one key per line.
void write_split(const SplitManifest& manifest, const fs::path& dir);
SplitManifest read_split(const fs::path& dir);

/// Hex FNV-1a digest of a file's bytes.
std::string file_digest(const fs::path& path);

/// Hex FNV-1a digest of the canonical serialization of `config`.
std::string config_hash(const nlohmann::json& config);

void write_json(const fs::path& path, const nlohmann::json& value);
nlohmann::json read_json(const fs::path& path);

struct SynthOptions {
  FixtureSpec spec;
  fs::path out;
};
nlohmann::json run_synth(const SynthOptions& options);

struct SplitOptions {
  fs::path conllu;
  ParseMode mode = ParseMode::syntactic;
  SplitFractions fractions;
  std::uint64_t seed = 0;
  fs::path out;
};
nlohmann::json run_split(const SplitOptions& options);

struct TrainOptions {
  fs::path conllu;
  ParseMode mode = ParseMode::syntactic;
  fs::path embeddings;
  fs::path split_dir;                   ///< empty: derive the split from the seed
  SplitFractions fractions;
  std::vector<ProbeKind> kinds{ProbeKind::distance, ProbeKind::depth};
  TrainConfig train;
  bool skip_misaligned = false;
  fs::path out;
};
nlohmann::json run_train(const TrainOptions& options);

struct EvalRunOptions {
  fs::path conllu;
  ParseMode mode = ParseMode::syntactic;
  fs::path embeddings;
  fs::path split_dir;                   ///< empty: derive the split from the seed
  SplitFractions fractions;
  std::uint64_t seed = 0;
  std::string split = "test";           ///< train | dev | test | all
  fs::path probe_dir;
  EvalOptions eval;
  bool skip_misaligned = false;
  fs::path out;
};
nlohmann::json run_eval(const EvalRunOptions& options);

struct ScoresOptions {
  fs::path table;
  fs::path out;
};
nlohmann::json run_scores(const ScoresOptions& options);

struct CorrelateOptions {
  fs::path scores;
  fs::path out;
};
nlohmann::json run_correlate(const CorrelateOptions& options);

struct ReportOptions {
  std::vector<fs::path> metrics;
  fs::path analogy;                     ///< JSON object: model name -> score or analogy spec path
  fs::path out;
};
nlohmann::json run_report(const ReportOptions& options);

/// Loads an analogy spec {"datasets": [{"name", "store", "pairs": [[a, b], ...]}], "ridge"}
/// and returns its AnalogyScore. Relative store paths resolve against the spec's directory.
double analogy_score_from_spec(const fs::path& spec_path);

}  // namespace structprobe::pipeline
