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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "structprobe/error.hpp"
#include "structprobe/pipeline.hpp"

namespace {

namespace sp = structprobe;
namespace pl = structprobe::pipeline;

/// Splices a flat JSON config ({"learning_rate": 0.01, ...}) into the argument
/// list of the selected subcommand. Keys name long flags, with underscores read
/// as dashes. Flags already given on the command line win; unknown keys are ignored.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  auto cmd = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
    return app.get_subcommand_no_throw(a) != nullptr;
  });
  if (cmd == args.end()) return args;
  const CLI::App* sub = app.get_subcommand_no_throw(*cmd);
  std::string path;
  for (auto it = cmd + 1; it != args.end(); ++it) {
    if (*it == "--config" && it + 1 != args.end()) path = *(it + 1);
    if (it->rfind("--config=", 0) == 0) path = it->substr(9);
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw CLI::ParseError("cannot open config file " + path, CLI::ExitCodes::FileError);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CLI::ParseError(std::string("config is not valid JSON: ") + e.what(), CLI::ExitCodes::ConfigError);
  }
  if (!j.is_object()) throw CLI::ParseError("config must be a flat JSON object", CLI::ExitCodes::ConfigError);

  auto given = [&](const std::string& flag) {
    return std::any_of(cmd + 1, args.end(), [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  auto scalar = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  std::vector<std::string> extra;
  for (const auto& [key, value] : j.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt == nullptr || flag == "--config" || given(flag)) continue;
    if (value.is_object()) throw CLI::ParseError("config key '" + key + "' must not be nested", CLI::ExitCodes::ConfigError);
    if (opt->get_items_expected_max() == 0) {
      if (!value.is_boolean()) throw CLI::ParseError("config key '" + key + "' must be a boolean", CLI::ExitCodes::ConfigError);
      if (value.get<bool>()) extra.push_back(flag);
      continue;
    }
    extra.push_back(flag);
    if (value.is_array()) {
      for (const auto& v : value) extra.push_back(scalar(v));
    } else {
      extra.push_back(scalar(value));
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

struct Shared {
  std::uint64_t seed = 0;
  std::string out;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help, Shared& shared,
                      bool needs_seed = true) {
  auto* sub = app.add_subcommand(name, help);
  sub->add_option("--config", "Flat JSON config file; command-line flags take precedence");
  if (needs_seed) sub->add_option("--seed", shared.seed, "Top-level random seed")->capture_default_str();
  sub->add_option("--out", shared.out, "Output directory")->required();
  return sub;
}

template <typename T>
void add_fractions(CLI::App* sub, T& fractions_vec) {
  sub->add_option("--fractions", fractions_vec, "Train/dev/test fractions")->expected(3)->capture_default_str();
}

pl::SplitFractions to_fractions(const std::vector<double>& v) { return {v.at(0), v.at(1), v.at(2)}; }

void emit_error(sp::ErrorKind kind, const std::string& message) {
  const nlohmann::json err = {{"status", "error"}, {"error", sp::to_string(kind)}, {"message", message},
                              {"exit_code", sp::exit_code(kind)}};
  std::cerr << err.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structprobe: structural probes, score composition and rank correlation"};
  app.require_subcommand(1);
  Shared shared;

  // synth
  pl::SynthOptions synth;
  std::string mixing = "random";
  auto* synth_cmd = add_command(app, "synth", "Generate a Pythagorean-embedded random-tree fixture", shared);
  synth_cmd->add_option("--sentences", synth.spec.sentences, "Number of sentences")->capture_default_str();
  synth_cmd->add_option("--min-tokens", synth.spec.min_tokens)->capture_default_str();
  synth_cmd->add_option("--max-tokens", synth.spec.max_tokens)->capture_default_str();
  synth_cmd->add_option("--dim", synth.spec.dim, "Embedding dim (0 = max tokens - 1)")->capture_default_str();
  synth_cmd->add_option("--mixing", mixing)->check(CLI::IsMember({"none", "random"}))->capture_default_str();
  synth_cmd->add_option("--noise", synth.spec.noise, "Std. dev. of additive Gaussian noise")->capture_default_str();
  synth_cmd->add_option("--model-name", synth.spec.model_name)->capture_default_str();

  // split
  pl::SplitOptions split;
  std::string conllu, mode = "syntactic", embeddings, split_dir;
  std::vector<double> fractions{0.8, 0.1, 0.1};
  auto* split_cmd = add_command(app, "split", "Write a seeded train/dev/test split manifest", shared);
  split_cmd->add_option("--conllu", conllu, "CoNLL-U corpus")->required();
  split_cmd->add_option("--mode", mode)->check(CLI::IsMember({"syntactic", "semantic"}))->capture_default_str();
  add_fractions(split_cmd, fractions);

  // train
  pl::TrainOptions train;
  std::string probe = "both";
  auto* train_cmd = add_command(app, "train", "Train distance and/or depth probes", shared);
  train_cmd->add_option("--conllu", conllu)->required();
  train_cmd->add_option("--mode", mode)->check(CLI::IsMember({"syntactic", "semantic"}))->capture_default_str();
  train_cmd->add_option("--embeddings", embeddings, "SPEB embedding store")->required();
  train_cmd->add_option("--split", split_dir, "Directory with split_{train,dev,test}.txt");
  add_fractions(train_cmd, fractions);
  train_cmd->add_option("--probe", probe)->check(CLI::IsMember({"distance", "depth", "both"}))->capture_default_str();
  train_cmd->add_option("--rank", train.train.rank)->capture_default_str();
  train_cmd->add_option("--lr", train.train.learning_rate)->capture_default_str();
  train_cmd->add_option("--epochs", train.train.max_epochs)->capture_default_str();
  train_cmd->add_option("--batch-size", train.train.batch_size)->capture_default_str();
  train_cmd->add_option("--patience", train.train.patience)->capture_default_str();
  train_cmd->add_option("--max-length", train.train.max_train_length)->capture_default_str();
  train_cmd->add_flag("--skip-misaligned", train.skip_misaligned, "Skip misaligned sentences instead of failing");

  // eval
  pl::EvalRunOptions eval;
  std::string probes;
  auto* eval_cmd = add_command(app, "eval", "Score trained probes with UUAS, DSpr and RootAcc", shared);
  eval_cmd->add_option("--conllu", conllu)->required();
  eval_cmd->add_option("--mode", mode)->check(CLI::IsMember({"syntactic", "semantic"}))->capture_default_str();
  eval_cmd->add_option("--embeddings", embeddings)->required();
  eval_cmd->add_option("--split", split_dir);
  add_fractions(eval_cmd, fractions);
  eval_cmd->add_option("--eval-split", eval.split)
      ->check(CLI::IsMember({"train", "dev", "test", "all"}))
      ->capture_default_str();
  eval_cmd->add_option("--probes", probes, "Directory holding probe_distance.speb and probe_depth.speb")->required();
  eval_cmd->add_option("--dspr-min", eval.eval.dspr_min_length)->capture_default_str();
  eval_cmd->add_option("--dspr-max", eval.eval.dspr_max_length)->capture_default_str();
  eval_cmd->add_flag("--skip-misaligned", eval.skip_misaligned);

  // scores
  pl::ScoresOptions scores;
  std::string table;
  auto* scores_cmd = add_command(app, "scores", "Compose SyntScore/SemScore from a per-model metrics table", shared, false);
  scores_cmd->add_option("--table", table, "Metrics table JSON")->required();

  // correlate
  pl::CorrelateOptions correlate;
  std::string score_file;
  auto* correlate_cmd = add_command(app, "correlate", "Rank correlations between score families", shared, false);
  correlate_cmd->add_option("--scores", score_file, "Score table JSON")->required();

  // report
  pl::ReportOptions report;
  std::vector<std::string> metric_files;
  std::string analogy;
  auto* report_cmd = add_command(app, "report", "Aggregate metrics into score tables and correlations", shared, false);
  report_cmd->add_option("--metrics", metric_files, "metrics.json files (both modes per model)")->required();
  report_cmd->add_option("--analogy", analogy, "JSON: model name -> AnalogyScore or analogy spec path")->required();

  try {
    // CLI11 wants the arguments in reverse order.
    auto args = expand_config(app, std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    nlohmann::json summary;
    if (synth_cmd->parsed()) {
      synth.spec.seed = shared.seed;
      synth.spec.mixing = sp::mixing_from_string(mixing);
      synth.out = shared.out;
      summary = pl::run_synth(synth);
    } else if (split_cmd->parsed()) {
      split.conllu = conllu;
      split.mode = sp::parse_mode_from_string(mode);
      split.fractions = to_fractions(fractions);
      split.seed = shared.seed;
      split.out = shared.out;
      summary = pl::run_split(split);
    } else if (train_cmd->parsed()) {
      train.conllu = conllu;
      train.mode = sp::parse_mode_from_string(mode);
      train.embeddings = embeddings;
      train.split_dir = split_dir;
      train.fractions = to_fractions(fractions);
      if (probe != "both") train.kinds = {sp::probe_kind_from_string(probe)};
      train.train.seed = shared.seed;
      train.out = shared.out;
      summary = pl::run_train(train);
    } else if (eval_cmd->parsed()) {
      eval.conllu = conllu;
      eval.mode = sp::parse_mode_from_string(mode);
      eval.embeddings = embeddings;
      eval.split_dir = split_dir;
      eval.fractions = to_fractions(fractions);
      eval.seed = shared.seed;
      eval.probe_dir = probes;
      eval.out = shared.out;
      summary = pl::run_eval(eval);
    } else if (scores_cmd->parsed()) {
      scores.table = table;
      scores.out = shared.out;
      summary = pl::run_scores(scores);
    } else if (correlate_cmd->parsed()) {
      correlate.scores = score_file;
      correlate.out = shared.out;
      summary = pl::run_correlate(correlate);
    } else if (report_cmd->parsed()) {
      report.metrics.assign(metric_files.begin(), metric_files.end());
      report.analogy = analogy;
      report.out = shared.out;
      summary = pl::run_report(report);
    }
    std::cout << nlohmann::json{{"status", "ok"}, {"out", shared.out}}.dump() << std::endl;
  } catch (const sp::Error& e) {
    emit_error(e.kind(), e.what());
    return sp::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"status", "error"}, {"error", "internal"}, {"message", e.what()}, {"exit_code", 1}}.dump()
              << std::endl;
    return 1;
  }
  return 0;
}
