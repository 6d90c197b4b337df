// Copyright 2026 The artlang Authors. All Rights Reserved.
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
// =============================================================================
// Micro benchmarks for the hot paths. Most of the time in a real run goes to
// masked scoring and the estimators on top of it; the probe solver is cheap.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "artlang/corpus.hpp"
#include "artlang/degree.hpp"
#include "artlang/mask_query.hpp"
#include "artlang/model_loader.hpp"
#include "artlang/polarity.hpp"
#include "artlang/probe.hpp"

namespace artlang {
namespace {

const std::filesystem::path kFixtures = ARTLANG_FIXTURE_DIR;

const LanguageModel& TinyBert() {
  static const auto model = LoadModel((kFixtures / "tiny_bert").string());
  return *model;
}

const LanguageModel& TinyGpt2() {
  static const auto model = LoadModel((kFixtures / "tiny_gpt2").string());
  return *model;
}

std::vector<TemplateSentence> Sentences(std::size_t n) {
  const std::vector<std::string> nouns{"reason", "question"};
  const std::vector<std::string> adjs{"simple", "good", "strange"};
  auto all = generate_base_sentences(nouns, adjs);
  all.resize(std::min(n, all.size()));
  return all;
}

void BM_MaskScore(benchmark::State& state) {
  const auto& m = TinyBert();
  const MaskQuery q("the reason is [MASK] simple.");
  const auto ids = m.require_tokens(std::vector<std::string>{"very", "slightly"});
  for (auto _ : state) benchmark::DoNotOptimize(m.score_mask(q, ids, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_MaskScore)->Arg(0)->Arg(100);

void BM_Perplexity(benchmark::State& state) {
  const auto& m = TinyGpt2();
  for (auto _ : state) benchmark::DoNotOptimize(m.sentence_perplexity("The reason is simple."));
}
BENCHMARK(BM_Perplexity);

void BM_PolarityLexicon(benchmark::State& state) {
  const auto& m = TinyBert();
  const auto sentences = Sentences(static_cast<std::size_t>(state.range(0)));
  const auto pairs = make_polarity_pairs(sentences);
  const std::vector<std::string> tokens{"very", "slightly", "well", "no"};
  for (auto _ : state) benchmark::DoNotOptimize(score_lexicon(tokens, pairs, m));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(pairs.size()));
}
BENCHMARK(BM_PolarityLexicon)->Arg(2)->Arg(12);

void BM_ModifierDegrees(benchmark::State& state) {
  const auto& m = TinyBert();
  const auto sentences = Sentences(6);
  ParticleInventory inv;
  inv.high = {"yes", "oh"};
  inv.low = {"well", "no"};
  const std::vector<std::string> mods{"very", "slightly"};
  for (auto _ : state) benchmark::DoNotOptimize(score_modifier_degrees(mods, sentences, inv, m));
}
BENCHMARK(BM_ModifierDegrees);

void BM_CountStrictWins(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  std::vector<double> high(static_cast<std::size_t>(state.range(0))), low(high.size());
  for (auto& x : high) x = u(rng);
  for (auto& x : low) x = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(CountStrictWins(high, low));
}
BENCHMARK(BM_CountStrictWins)->Arg(10)->Arg(1000);

// The probe's shape: about a hundred modifiers, embedding-width features.
void BM_FitL1Logistic(benchmark::State& state) {
  const auto width = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(98, width);
  std::vector<int> y;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    y.push_back(static_cast<int>(i % 2));
    for (Eigen::Index k = 0; k < width; ++k) x(i, k) = 0.05 * g(rng) + (k < 4 && i % 2 ? 0.03 : 0.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(FitL1Logistic(x, y, L1LogisticOptions{}));
}
BENCHMARK(BM_FitL1Logistic)->Arg(64)->Arg(768)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace artlang

BENCHMARK_MAIN();
