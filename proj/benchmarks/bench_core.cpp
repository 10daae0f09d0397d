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

#include <benchmark/benchmark.h>

#include "structprobe/conllu.hpp"
#include "structprobe/correlation.hpp"
#include "structprobe/probe.hpp"
#include "structprobe/probe_eval.hpp"
#include "structprobe/synth.hpp"

namespace sp = structprobe;

namespace {

sp::Fixture fixture(int sentences, int tokens) {
  sp::FixtureSpec spec;
  spec.sentences = sentences;
  spec.min_tokens = tokens;
  spec.max_tokens = tokens;
  spec.mixing = sp::Mixing::random;
  spec.seed = 1;
  return sp::make_fixture(spec);
}

void BM_PredictSqDistances(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto fx = fixture(1, n);
  const auto corpus = sp::build_corpus(fx.structures, fx.embeddings);
  const auto p = sp::initial_params(corpus.dim, corpus.dim, 1, sp::ProbeKind::distance);
  for (auto _ : state) benchmark::DoNotOptimize(sp::predict_sq_distances(p, corpus.examples[0].embeddings));
}
BENCHMARK(BM_PredictSqDistances)->Arg(10)->Arg(40)->Arg(100);

void BM_LossGradient(benchmark::State& state) {
  const auto fx = fixture(20, static_cast<int>(state.range(0)));
  const auto corpus = sp::build_corpus(fx.structures, fx.embeddings);
  std::vector<const sp::ProbeExample*> batch;
  for (const auto& ex : corpus.examples) batch.push_back(&ex);
  const auto kind = state.range(1) == 0 ? sp::ProbeKind::distance : sp::ProbeKind::depth;
  const auto p = sp::initial_params(corpus.dim, corpus.dim, 1, kind);
  for (auto _ : state) benchmark::DoNotOptimize(sp::loss_gradient(p, batch));
}
BENCHMARK(BM_LossGradient)->Args({10, 0})->Args({20, 0})->Args({20, 1})->Args({40, 0});

void BM_MstEdges(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  sp::Rng rng(2);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) w(i, j) = w(j, i) = rng.uniform();
  }
  const std::vector<bool> excluded(n, false);
  for (auto _ : state) benchmark::DoNotOptimize(sp::mst_edges(w, excluded));
}
BENCHMARK(BM_MstEdges)->Arg(10)->Arg(50)->Arg(200);

void BM_ExactKendallNull(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sp::exact_kendall_null(n));
}
BENCHMARK(BM_ExactKendallNull)->Arg(8)->Arg(20);

void BM_ParseConllu(benchmark::State& state) {
  const auto fx = fixture(static_cast<int>(state.range(0)), 15);
  for (auto _ : state) benchmark::DoNotOptimize(sp::parse_conllu(fx.conllu, sp::ParseMode::syntactic));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * fx.conllu.size()));
}
BENCHMARK(BM_ParseConllu)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
