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

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "artlang/corpus.hpp"
#include "artlang/language_model.hpp"
#include "artlang/mask_query.hpp"
#include "artlang/polarity.hpp"

namespace artlang {

enum class QaSlot { kParticleMasked, kModifierMasked };

// Question/answer context "Is the {noun} {adj}? {X}, it is {Y} {adj}."
// Exactly one of X (particle) and Y (modifier) is the mask; the other is the
// fixed filler. Plural bases use "Are ... ? X, they are Y adj."
struct QAContext {
  std::size_t source = 0;
  std::string question;
  std::string answer;
  QaSlot slot = QaSlot::kParticleMasked;
  std::string filler;

  std::string text() const { return question + " " + answer; }
  MaskQuery query() const { return MaskQuery(text()); }
};

QAContext make_qa_context(const TemplateSentence& s, const std::string& filler, QaSlot slot);
std::vector<QAContext> make_qa_contexts(const TemplateSentence& s, std::span<const std::string> fillers,
                                        QaSlot slot);

// Renders an answer with both slots filled (used for training text).
std::string RenderQaText(const TemplateSentence& s, std::string_view particle, std::string_view modifier);

inline const std::vector<std::string>& DefaultLowSeeds() {
  static const std::vector<std::string> v{"somewhat", "slightly"};
  return v;
}
inline const std::vector<std::string>& DefaultHighSeeds() {
  static const std::vector<std::string> v{"very", "extremely"};
  return v;
}

struct ParticleCandidate {
  std::string token;
  std::size_t count = 0;
};

// Counts how often each token appears among the top-k fillers of the
// particle slot over |sentences| x (low + high seeds) contexts, and keeps
// tokens seen at least `min_count` times. Only purely alphabetic,
// non-subword tokens are counted. Sorted by token.
std::vector<ParticleCandidate> mine_particles(std::span<const TemplateSentence> sentences,
                                              std::span<const std::string> seeds_low,
                                              std::span<const std::string> seeds_high,
                                              const LanguageModel& model, std::size_t topk = 100,
                                              std::size_t min_count = 100);

struct DegreeScore {
  std::string token;
  double score = 0.0;
  std::size_t wins = 0;
  std::size_t comparisons = 0;
};

using SeedPair = std::pair<std::string, std::string>;  // (high, low)

inline std::vector<SeedPair> DefaultSeedPairs() {
  return {{"very", "somewhat"}, {"very", "slightly"}, {"extremely", "somewhat"}, {"extremely", "slightly"}};
}

// Pooled proportion over (sentence, seed pair) of p(particle | high-seed
// context) > p(particle | low-seed context).
DegreeScore particle_degree_score(const std::string& particle, std::span<const TemplateSentence> sentences,
                                  std::span<const SeedPair> seed_pairs, const LanguageModel& model);

// Batched particle scoring: one model pass per (sentence, seed). Sorted by
// token.
std::vector<DegreeScore> score_particles(std::span<const std::string> particles,
                                         std::span<const TemplateSentence> sentences,
                                         std::span<const SeedPair> seed_pairs, const LanguageModel& model);

// One-vs-rest variant: every (high, low) in high x low is a seed pair. Wins
// are counted with a sort per (sentence, particle), so large seed groups stay
// cheap.
std::vector<DegreeScore> score_particles_grouped(std::span<const std::string> particles,
                                                 std::span<const TemplateSentence> sentences,
                                                 std::span<const std::string> high,
                                                 std::span<const std::string> low, const LanguageModel& model);

struct ParticleInventory {
  std::vector<DegreeScore> scores;  // sorted by token
  std::vector<std::string> low;     // ascending score
  std::vector<std::string> high;    // descending score

  nlohmann::json ToJson() const;
  static ParticleInventory FromJson(const nlohmann::json& j);
};

// Bottom-k scores form the low set, top-k the high set; ties by token.
ParticleInventory select_top_particles(std::span<const DegreeScore> scored, std::size_t k = 10);

// Pooled proportion over (sentence, high particle, low particle) of
// p(modifier | high-particle context) > p(modifier | low-particle context).
DegreeScore modifier_degree_score(const std::string& modifier, std::span<const TemplateSentence> sentences,
                                  const ParticleInventory& inventory, const LanguageModel& model);

// Batched modifier scoring: one pass per (sentence, particle). Sorted by
// token.
std::vector<DegreeScore> score_modifier_degrees(std::span<const std::string> modifiers,
                                                std::span<const TemplateSentence> sentences,
                                                const ParticleInventory& inventory, const LanguageModel& model);

// Number of pairs (h, l) with h > l, for h in `high`, l in `low`.
std::size_t CountStrictWins(std::span<const double> high, std::span<const double> low);

struct LexiconEntry {
  std::string token;
  std::optional<PolarityScore> polarity;
  std::optional<DegreeScore> degree;
};

// Token-sorted lexicon with both score dimensions.
struct ScoredLexicon {
  std::vector<LexiconEntry> entries;

  const LexiconEntry* Find(const std::string& token) const;
  std::vector<std::string> Tokens() const;
  nlohmann::json ToJson() const;
  static ScoredLexicon FromJson(const nlohmann::json& j);
};

ScoredLexicon MergeScores(std::span<const PolarityScore> polarity, std::span<const DegreeScore> degree);

// Restricts the lexicon to the curated keep list. Every keep-list token must
// be present in `candidates`; otherwise a ConfigError names the missing
// tokens, unless `allow_missing` is set, in which case they are dropped with
// a warning.
ScoredLexicon apply_curation(const ScoredLexicon& candidates, std::span<const std::string> keep_list,
                             bool allow_missing = false);

nlohmann::json ToJson(const PolarityScore& s);
nlohmann::json ToJson(const DegreeScore& s);
PolarityScore PolarityScoreFromJson(const std::string& token, const nlohmann::json& j);
DegreeScore DegreeScoreFromJson(const std::string& token, const nlohmann::json& j);

}  // namespace artlang
