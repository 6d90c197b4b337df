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
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "artlang/language_model.hpp"

namespace artlang {

// Every parameter of the pipeline, with reference-experiment defaults.
// Relative paths are resolved against the working directory.
struct PipelineConfig {
  std::string masked_model = "bert-base-uncased";
  std::string causal_model = "gpt2";
  std::string tagger_lexicon = "data/pos_lexicon.tsv";
  std::string corpus_path = "data/gradability_corpus.txt";
  std::string keep_list = "data/curated_modifiers.txt";
  bool curation_allow_missing = false;
  std::string artifact_dir = "artifacts";
  // Score cache location; ARTLANG_CACHE_DIR overrides it.
  std::string cache_dir = ".artlang-cache";
  std::string scale = "full";

  // Corpus.
  std::size_t n_nouns = 1000;
  std::size_t n_adjs = 2000;
  std::size_t n_gradable = 200;
  std::size_t keep = 10000;
  std::vector<std::string> gradability_seeds{"somewhat", "very", "really", "extremely", "rather"};

  // Polarity. polarity_pairs = 0 uses every base sentence.
  std::size_t polarity_pairs = 0;
  std::size_t polarity_topk = 100;
  std::size_t polarity_min_count = 100;

  // Degree.
  std::vector<std::string> seeds_low{"somewhat", "slightly"};
  std::vector<std::string> seeds_high{"very", "extremely"};
  std::size_t particle_topk = 100;
  std::size_t particle_min_count = 100;
  std::size_t particles_k = 10;

  // Probe. probe_task is "polarity", "degree" or "both".
  std::string probe_task = "both";
  int probe_folds = 5;
  std::uint64_t probe_seed = 0;
  double probe_lambda = 0.01;
  int probe_min_folds = 4;
  std::vector<double> probe_sweep{0.002, 0.005, 0.01, 0.02, 0.05};

  // Experiment.
  std::size_t particles_per_group = 10;
  std::size_t cohort_size = 99;
  std::uint64_t experiment_seed = 42;
  FinetuneConfig finetune;

  nlohmann::json ToJson() const;
  // Unknown keys are rejected with ConfigError; missing keys keep defaults.
  static PipelineConfig FromJson(const nlohmann::json& j);
  static PipelineConfig FromFile(const std::filesystem::path& path);

  // "full" (reference defaults) or "desk": 100 nouns, 20 gradable adjectives,
  // 500 base sentences, one fine-tuning epoch.
  void ApplyScale(const std::string& scale);
  void Validate() const;

  std::filesystem::path ResolvedCacheDir() const;
};

// Canonical stage order.
const std::vector<std::string>& StageNames();

struct StageArtifact {
  std::string stage;
  std::string config_hash;
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256
  std::string timestamp;
  bool from_cache = false;

  nlohmann::json ToJson() const;
};

// Staged runner with content-addressed stage caching. A stage is skipped when
// its manifest records the same config hash and input hashes and every
// recorded output still has the recorded hash.
class Pipeline {
 public:
  using ModelFactory = std::function<std::unique_ptr<LanguageModel>(const std::string& spec)>;

  explicit Pipeline(PipelineConfig cfg, ModelFactory factory = {});
  ~Pipeline();

  StageArtifact RunStage(const std::string& name, bool force = false);
  std::vector<StageArtifact> RunAll(bool force = false);

  const PipelineConfig& config() const { return cfg_; }
  std::filesystem::path ArtifactPath(const std::string& file) const;
  std::filesystem::path ManifestPath(const std::string& stage) const;

 private:
  struct Impl;
  PipelineConfig cfg_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace artlang
