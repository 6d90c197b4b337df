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
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "artlang/language_model.hpp"

namespace artlang {

inline constexpr std::string_view kNounTag = "NOUN";
inline constexpr std::string_view kAdjectiveTag = "ADJ";

struct TaggedToken {
  std::string token;
  std::string pos;
  // Position in the model vocabulary, used as the frequency rank.
  int rank = 0;
};

// Single-word part-of-speech tagger.
class PosTagger {
 public:
  virtual ~PosTagger() = default;
  // Universal POS label ("NOUN", "ADJ", ...) for a token tagged in isolation.
  virtual std::string Tag(std::string_view token) const = 0;
};

// Tagger backed by a precomputed token<TAB>label file, typically produced
// offline by running an external tagger over the vocabulary
// (tools/tag_vocabulary.py). Unlisted tokens are tagged "X".
class LexiconTagger final : public PosTagger {
 public:
  explicit LexiconTagger(std::unordered_map<std::string, std::string> labels)
      : labels_(std::move(labels)) {}
  // Throws EnvironmentError when the file does not exist.
  static LexiconTagger FromFile(const std::filesystem::path& path);

  std::string Tag(std::string_view token) const override;
  std::size_t size() const { return labels_.size(); }

 private:
  std::unordered_map<std::string, std::string> labels_;
};

// Tags every non-subword vocabulary item, in vocabulary order.
std::vector<TaggedToken> tag_vocabulary(const LanguageModel& model, const PosTagger& tagger);

struct PosSets {
  std::vector<std::string> nouns;
  std::vector<std::string> adjectives;
};

// First n_nouns nouns and n_adjs adjectives by rank. Returns what is there,
// with a warning, when fewer are available.
PosSets select_pos_sets(std::span<const TaggedToken> tagged, std::size_t n_nouns = 1000,
                        std::size_t n_adjs = 2000);

inline const std::vector<std::string>& DefaultGradabilitySeeds() {
  static const std::vector<std::string> seeds{"somewhat", "very", "really", "extremely", "rather"};
  return seeds;
}

struct GradabilityRecord {
  std::string adjective;
  long modified = 0;
  long total = 0;
  double ratio = 0.0;
  // Position in the candidate adjective list.
  int rank = 0;
};

// Global adjective counts over a plain-text corpus. Each line is lowercased
// and split into word tokens; a use counts as modified when the immediately
// preceding token on the same line is a seed modifier. Lines are independent,
// so the counts do not depend on line order.
class GradabilityCounter {
 public:
  GradabilityCounter(std::span<const std::string> adjectives, std::span<const std::string> seeds);

  void AddLine(std::string_view line);
  void AddStream(std::istream& in);

  long modified(const std::string& adjective) const;
  long total(const std::string& adjective) const;

 private:
  std::unordered_map<std::string, std::pair<long, long>> counts_;
  std::unordered_map<std::string, bool> seeds_;
};

// Lowercased word tokens of a corpus line; letters, digits, apostrophes and
// hyphens inside words are kept.
std::vector<std::string> CorpusTokens(std::string_view line);

// Top `keep` adjectives by ratio, ties broken by rank. Adjectives absent
// from the corpus get ratio 0 and stay in the ranking.
std::vector<GradabilityRecord> rank_gradable(std::span<const std::string> adjectives,
                                             const GradabilityCounter& counts,
                                             std::size_t keep = 200);

enum class Copula { kIs, kAre };

std::string_view CopulaText(Copula c);
Copula ParseCopula(std::string_view text);

struct TemplateSentence {
  std::size_t id = 0;  // index in the generated set
  std::string noun;
  std::string adjective;
  Copula copula = Copula::kIs;
  std::string text;
  std::optional<double> perplexity;
};

std::string RenderSentence(std::string_view noun, Copula copula, std::string_view adjective);

// |nouns| x |adjectives| x {is, are}, noun-major.
std::vector<TemplateSentence> generate_base_sentences(std::span<const std::string> nouns,
                                                      std::span<const std::string> adjectives);

// Keeps the `keep` sentences with the lowest perplexity, sorted by
// (perplexity, original id). Perplexities are recorded on the output.
std::vector<TemplateSentence> filter_by_perplexity(std::span<const TemplateSentence> sentences,
                                                   const LanguageModel& scorer, std::size_t keep = 10000);

// base_sentences.tsv: noun, adjective, copula, text, perplexity, id.
void WriteBaseSentences(const std::filesystem::path& path, std::span<const TemplateSentence> sentences);
std::vector<TemplateSentence> ReadBaseSentences(const std::filesystem::path& path);

void WriteGradable(const std::filesystem::path& path, std::span<const GradabilityRecord> records);
std::vector<GradabilityRecord> ReadGradable(const std::filesystem::path& path);

}  // namespace artlang
