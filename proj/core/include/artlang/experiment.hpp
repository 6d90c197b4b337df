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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "artlang/corpus.hpp"
#include "artlang/degree.hpp"
#include "artlang/language_model.hpp"
#include "artlang/polarity.hpp"

namespace artlang {

struct DegreeGroup {
  std::string label;  // v1 (moderate), v2 (medium), v3 (high)
  std::vector<std::string> members;
  double lower = 0.0;
  double upper = 0.0;
};

// Three equal-width degree intervals over [min, max]; a value on a boundary
// belongs to the lower interval. Throws DegenerateInputError when all degrees
// are equal.
std::array<DegreeGroup, 3> partition_modifiers(const ScoredLexicon& lexicon);

// For each group, scores `candidates` one-vs-rest (group members as high
// seeds, the other groups' members as low seeds) and keeps the k
// best-scoring particles.
struct GroupParticles {
  std::array<std::vector<std::string>, 3> particles;
  std::array<std::vector<DegreeScore>, 3> scores;
};
GroupParticles mine_group_particles(const std::array<DegreeGroup, 3>& groups,
                                    std::span<const std::string> candidates,
                                    std::span<const TemplateSentence> sentences, const LanguageModel& model,
                                    std::size_t k = 10);

enum class CohortRole { kTargetV1, kTargetV2, kTargetV3, kRandomBaseline, kUntrainedBaseline };

std::string RoleName(CohortRole role);
CohortRole ParseRole(std::string_view name);
// "[mod_v1_7]", "[rnd_7]", "[unt_7]", ...
std::string CohortTokenName(CohortRole role, std::size_t index);

inline constexpr std::size_t kCohortSize = 99;

struct TokenCohort {
  CohortRole role = CohortRole::kTargetV1;
  std::vector<std::string> names;
  std::vector<TokenId> ids;
};

// Adds 5 x cohort_size fresh tokens in one call (so every new row is drawn
// from the statistics of the original vocabulary).
std::array<TokenCohort, 5> create_cohorts(LanguageModel& model, std::uint64_t seed,
                                          std::size_t cohort_size = kCohortSize);

struct TrainingExample {
  std::size_t sentence = 0;
  CohortRole role = CohortRole::kTargetV1;
  std::string particle;
  std::size_t token_index = 0;
  std::string token;
  std::string text;
};

// Three target examples per sentence (one per group) followed by three
// random-baseline examples per sentence that draw their particle from the
// union of the three particle sets. Token indices are uniform over the
// cohort. Deterministic given the seed.
std::vector<TrainingExample> build_training_dataset(std::span<const TemplateSentence> sentences,
                                                    const GroupParticles& particles,
                                                    const std::array<TokenCohort, 5>& cohorts, std::uint64_t seed);

struct TokenMeasurement {
  std::string token;
  PolarityScore polarity;
  DegreeScore degree;
};

std::vector<TokenMeasurement> measure_cohort(const TokenCohort& cohort,
                                             std::span<const TemplateSentence> sentences,
                                             const ParticleInventory& inventory, const LanguageModel& model);

// All cohorts in one sweep over the contexts.
std::vector<std::vector<TokenMeasurement>> measure_cohorts(std::span<const TokenCohort> cohorts,
                                                           std::span<const TemplateSentence> sentences,
                                                           const ParticleInventory& inventory,
                                                           const LanguageModel& model);

struct CohortSummary {
  std::string cohort;
  double degree_mean = 0.0, degree_std = 0.0;
  double polarity_mean = 0.0, polarity_std = 0.0;
};

// Mean and population standard deviation of each score.
CohortSummary Summarize(const std::string& cohort, std::span<const TokenMeasurement> m);

struct ExperimentConfig {
  std::size_t particles_per_group = 10;
  std::size_t cohort_size = kCohortSize;
  std::uint64_t seed = 42;
  FinetuneConfig finetune;
};

struct ExperimentReport {
  std::array<DegreeGroup, 3> groups;
  GroupParticles group_particles;
  std::array<TokenCohort, 5> cohorts;
  std::vector<TrainingExample> training_set;
  std::vector<std::vector<TokenMeasurement>> before;
  std::vector<std::vector<TokenMeasurement>> after;
  TrainingReport training;
  std::vector<CohortSummary> summary_before;
  std::vector<CohortSummary> summary_after;
  std::string frozen_digest_before;
  std::string frozen_digest_after;
};

// Partition, group-particle mining, cohort creation, dataset construction,
// before-measurement, embedding fine-tuning on the pooled target and
// random-baseline texts, after-measurement. Mutates `model`.
ExperimentReport run_experiment(const ScoredLexicon& lexicon, std::span<const std::string> particle_candidates,
                                const ParticleInventory& inventory, std::span<const TemplateSentence> sentences,
                                LanguageModel& model, const ExperimentConfig& cfg);

nlohmann::json CohortsToJson(const ExperimentReport& r);
nlohmann::json MeasurementsToJson(const std::array<TokenCohort, 5>& cohorts,
                                  const std::vector<std::vector<TokenMeasurement>>& m);
// Cohort name -> measurements, read back from a measurements file.
std::vector<std::pair<std::string, std::vector<TokenMeasurement>>> MeasurementsFromJson(const nlohmann::json& j);
void WriteTrainingSet(const std::filesystem::path& path, std::span<const TrainingExample> examples);
void WriteSummaryTable(const std::filesystem::path& path, std::span<const CohortSummary> before,
                       std::span<const CohortSummary> after);

}  // namespace artlang
