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
#include <span>
#include <string>
#include <vector>

#include "artlang/corpus.hpp"
#include "artlang/language_model.hpp"
#include "artlang/mask_query.hpp"

namespace artlang {

// Affirmative and negated masked contexts built from one base sentence. The
// mask occupies the modifier slot before the adjective.
struct PolarityPair {
  MaskQuery positive;
  MaskQuery negative;
  std::size_t source = 0;  // TemplateSentence id
};

PolarityPair make_polarity_pair(const TemplateSentence& s);
std::vector<PolarityPair> make_polarity_pairs(std::span<const TemplateSentence> sentences);

struct PolarityScore {
  std::string token;
  double score = 0.0;
  std::size_t wins = 0;
  std::size_t pairs = 0;
};

// Proportion of pairs where p(token | positive) > p(token | negative).
// Ties are not wins.
PolarityScore polarity_score(const std::string& token, std::span<const PolarityPair> pairs,
                             const LanguageModel& model);

// polarity_score for several tokens with one model pass per context.
// Results are sorted by token.
std::vector<PolarityScore> score_lexicon(std::span<const std::string> tokens,
                                         std::span<const PolarityPair> pairs, const LanguageModel& model);

struct ModifierCandidate {
  std::string token;
  std::size_t positive_count = 0;
  std::size_t negative_count = 0;
};

// Counts how often each token is among the top-k fillers of the positive
// contexts and, separately, of the negative contexts. A token is kept when
// either count is strictly greater than `min_count`. Subword pieces and
// special tokens are never candidates. Sorted by token.
std::vector<ModifierCandidate> mine_modifier_candidates(std::span<const PolarityPair> pairs,
                                                        const LanguageModel& model, std::size_t topk = 100,
                                                        std::size_t min_count = 100);

// polarity_pairs.tsv: source, positive, negative.
void WritePolarityPairs(const std::filesystem::path& path, std::span<const PolarityPair> pairs);

}  // namespace artlang
