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
#include <cstdlib>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "artlang/degree.hpp"
#include "artlang/error.hpp"
#include "artlang/io.hpp"
#include "artlang/pipeline.hpp"
#include "support/test_support.hpp"

namespace artlang {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;
using nlohmann::json;

PipelineConfig MiniConfig(const fs::path& work) {
  const fs::path mini = testing::FixtureDir() / "mini_world";
  auto cfg = PipelineConfig::FromFile(mini / "config.json");
  cfg.masked_model = (testing::FixtureDir() / "tiny_bert").string();
  cfg.causal_model = (testing::FixtureDir() / "tiny_gpt2").string();
  cfg.tagger_lexicon = (mini / "pos_lexicon.tsv").string();
  cfg.corpus_path = (mini / "corpus.txt").string();
  cfg.keep_list = (mini / "keep_list.txt").string();
  cfg.artifact_dir = (work / "artifacts").string();
  cfg.cache_dir = (work / "cache").string();
  return cfg;
}

TEST(PipelineConfigTest, JsonRoundTripIsLossless) {
  PipelineConfig c;
  c.keep = 1234;
  c.probe_lambda = 0.0125;
  c.seeds_low = {"barely"};
  c.finetune.learning_rate = 3e-5;
  c.finetune.seed = 99;
  const json j = c.ToJson();
  const auto back = PipelineConfig::FromJson(j);
  EXPECT_EQ(back.ToJson(), j);
  EXPECT_EQ(back.keep, 1234u);
  EXPECT_EQ(back.finetune.learning_rate, 3e-5);
  EXPECT_EQ(PipelineConfig::FromJson(json::parse(j.dump())).ToJson(), j);
}

TEST(PipelineConfigTest, DefaultsMatchReferenceSettings) {
  const PipelineConfig c;
  EXPECT_EQ(c.n_nouns, 1000u);
  EXPECT_EQ(c.n_adjs, 2000u);
  EXPECT_EQ(c.n_gradable, 200u);
  EXPECT_EQ(c.keep, 10000u);
  EXPECT_EQ(c.particles_k, 10u);
  EXPECT_EQ(c.probe_folds, 5);
  EXPECT_EQ(c.probe_min_folds, 4);
  EXPECT_EQ(c.cohort_size, 99u);
  EXPECT_EQ(c.finetune.learning_rate, 5e-5);
  EXPECT_EQ(c.finetune.batch_size, 32);
  EXPECT_EQ(c.finetune.epochs, 3);
}

TEST(PipelineConfigTest, RejectsUnknownKeysAndBadValues) {
  try {
    PipelineConfig::FromJson(json{{"kep", 3}});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_THAT(e.what(), HasSubstr("kep"));
  }
  EXPECT_THROW(PipelineConfig::FromJson(json{{"finetune", {{"lr", 1}}}}), ConfigError);
  EXPECT_THROW(PipelineConfig::FromJson(json{{"keep", "many"}}), ConfigError);
  EXPECT_THROW(PipelineConfig::FromJson(json{{"probe_task", "syntax"}}), ConfigError);
  EXPECT_THROW(PipelineConfig::FromJson(json{{"probe_min_folds", 6}}), ConfigError);
  EXPECT_THROW(PipelineConfig::FromFile("/nonexistent/config.json"), ConfigError);
}

TEST(PipelineConfigTest, DeskScale) {
  PipelineConfig c;
  c.ApplyScale("desk");
  EXPECT_EQ(c.scale, "desk");
  EXPECT_EQ(c.keep, 500u);
  EXPECT_EQ(c.n_nouns, 100u);
  EXPECT_EQ(c.n_gradable, 20u);
  EXPECT_EQ(c.finetune.epochs, 1);
  EXPECT_THROW(c.ApplyScale("huge"), ConfigError);
}

TEST(PipelineConfigTest, CacheDirectoryOverride) {
  PipelineConfig c;
  c.cache_dir = "here";
  ::unsetenv("ARTLANG_CACHE_DIR");
  EXPECT_EQ(c.ResolvedCacheDir(), fs::path("here"));
  ::setenv("ARTLANG_CACHE_DIR", "/tmp/elsewhere", 1);
  EXPECT_EQ(c.ResolvedCacheDir(), fs::path("/tmp/elsewhere"));
  ::unsetenv("ARTLANG_CACHE_DIR");
}

TEST(PipelineTest, MissingUpstreamNamesTheStage) {
  const auto work = testing::ScratchDir("prereq");
  Pipeline p(MiniConfig(work));
  try {
    p.RunStage("score-degree");
    FAIL() << "expected PrerequisiteError";
  } catch (const PrerequisiteError& e) {
    EXPECT_EQ(e.stage(), "build-corpus");
    EXPECT_THAT(e.what(), HasSubstr("build-corpus"));
  }
  EXPECT_THROW(p.RunStage("no-such-stage"), ConfigError);
}

TEST(PipelineTest, MissingCheckpointIsAnEnvironmentError) {
  const auto work = testing::ScratchDir("nockpt");
  auto cfg = MiniConfig(work);
  cfg.masked_model = (work / "absent").string();
  Pipeline p(cfg);
  EXPECT_THROW(p.RunStage("build-corpus"), EnvironmentError);
}

class MiniPipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    work_ = new fs::path(testing::ScratchDir("mini_pipeline"));
    Pipeline p(MiniConfig(*work_));
    first_ = new std::vector<StageArtifact>(p.RunAll());
  }
  static void TearDownTestSuite() {
    fs::remove_all(*work_);
    delete work_;
    delete first_;
  }

  static fs::path* work_;
  static std::vector<StageArtifact>* first_;
};

fs::path* MiniPipelineTest::work_ = nullptr;
std::vector<StageArtifact>* MiniPipelineTest::first_ = nullptr;

TEST_F(MiniPipelineTest, FullChainProducesEveryArtifact) {
  ASSERT_EQ(first_->size(), StageNames().size());
  Pipeline p(MiniConfig(*work_));
  for (const char* f : {"base_sentences.tsv", "gradable_adjectives.tsv", "polarity_pairs.tsv", "polarity_scores.json",
                        "particles.json", "degree_scores.json", "lexicon.json", "probe_report.json", "cohorts.json",
                        "training_set.tsv", "measurements_before.json", "measurements_after.json",
                        "summary_table.tsv", "fig1_lexicon.svg", "fig1_lexicon.tsv", "fig1_quadratic_fit.json",
                        "fig2_targets.svg", "fig3_baselines.svg", "fig2_fig3_points.tsv",
                        "report_summary_table.tsv", "report.json"}) {
    EXPECT_TRUE(fs::exists(p.ArtifactPath(f))) << f;
  }
  for (const auto& s : StageNames()) EXPECT_TRUE(fs::exists(p.ManifestPath(s))) << s;
  EXPECT_TRUE(ReadJsonFile(p.ArtifactPath("report.json")).at("gaps").empty());
}

TEST_F(MiniPipelineTest, UnchangedRerunIsServedFromCache) {
  Pipeline p(MiniConfig(*work_));
  const auto again = p.RunAll();
  for (std::size_t i = 0; i < again.size(); ++i) {
    EXPECT_TRUE(again[i].from_cache) << again[i].stage;
    EXPECT_EQ(again[i].outputs, (*first_)[i].outputs) << again[i].stage;
  }
}

TEST_F(MiniPipelineTest, ReportTableEqualsExperimentTable) {
  Pipeline p(MiniConfig(*work_));
  EXPECT_EQ(ReadTextFile(p.ArtifactPath("report_summary_table.tsv")),
            ReadTextFile(p.ArtifactPath("summary_table.tsv")));
}

TEST_F(MiniPipelineTest, UntrainedTokensAbsentFromTrainingSet) {
  Pipeline p(MiniConfig(*work_));
  const auto t = ReadTsv(p.ArtifactPath("training_set.tsv"));
  const std::size_t col = t.Column("text");
  for (const auto& row : t.rows) EXPECT_EQ(row[col].find("[unt_"), std::string::npos);
  const json cohorts = ReadJsonFile(p.ArtifactPath("cohorts.json"));
  EXPECT_EQ(cohorts.at("training").at("frozen_digest_before"), cohorts.at("training").at("frozen_digest_after"));
}

TEST_F(MiniPipelineTest, ChangedParameterRecomputesWithIdenticalCachedScores) {
  // A fresh artifact directory sharing the score cache: every stage reruns
  // and the bytes match the first run.
  auto cfg = MiniConfig(*work_);
  cfg.artifact_dir = (*work_ / "artifacts_copy").string();
  Pipeline copy(cfg);
  const auto rerun = copy.RunAll();
  for (std::size_t i = 0; i < rerun.size(); ++i) {
    EXPECT_FALSE(rerun[i].from_cache);
    EXPECT_EQ(rerun[i].outputs, (*first_)[i].outputs) << rerun[i].stage;
  }

  cfg.keep = 100;
  Pipeline changed(cfg);
  const auto art = changed.RunStage("build-corpus");
  EXPECT_FALSE(art.from_cache);
  EXPECT_EQ(ReadTsv(changed.ArtifactPath("base_sentences.tsv")).rows.size(), 100u);
  EXPECT_TRUE(changed.RunStage("build-corpus").from_cache);
}

TEST(PipelineReportTest, MissingMeasurementsGiveExplicitGaps) {
  const auto work = testing::ScratchDir("gaps");
  auto cfg = MiniConfig(work);
  fs::create_directories(cfg.artifact_dir);
  ScoredLexicon lex;
  for (int i = 0; i < 5; ++i) {
    const std::string t = "m" + std::to_string(i);
    lex.entries.push_back({t, PolarityScore{t, i / 4.0, 0, 0}, DegreeScore{t, (i * i) / 16.0, 0, 0}});
  }
  WriteJsonFile(fs::path(cfg.artifact_dir) / "lexicon.json", lex.ToJson());
  Pipeline p(cfg);
  const auto art = p.RunStage("report");
  EXPECT_FALSE(art.outputs.count("fig2_targets.svg"));
  const json r = ReadJsonFile(p.ArtifactPath("report.json"));
  ASSERT_EQ(r.at("gaps").size(), 1u);
  EXPECT_THAT(r.at("gaps")[0].get<std::string>(), HasSubstr("measurements missing"));
  EXPECT_EQ(ReadJsonFile(p.ArtifactPath("fig1_quadratic_fit.json")).at("points"), 5);
}

}  // namespace
}  // namespace artlang
