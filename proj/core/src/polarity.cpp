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
#include "artlang/polarity.hpp"

#include <algorithm>
#include <map>

#include <glog/logging.h>

#include "artlang/error.hpp"
#include "artlang/io.hpp"

namespace artlang {

PolarityPair make_polarity_pair(const TemplateSentence& s) {
  const std::string cop(CopulaText(s.copula));
  const std::string tail = std::string(" ") + std::string(kMaskPlaceholder) + " " + s.adjective + ".";
  return {MaskQuery("The " + s.noun + " " + cop + tail), MaskQuery("The " + s.noun + " " + cop + "n't" + tail),
          s.id};
}

std::vector<PolarityPair> make_polarity_pairs(std::span<const TemplateSentence> sentences) {
  std::vector<PolarityPair> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(make_polarity_pair(s));
  return out;
}

PolarityScore polarity_score(const std::string& token, std::span<const PolarityPair> pairs,
                             const LanguageModel& model) {
  const std::vector<std::string> one{token};
  return score_lexicon(one, pairs, model).front();
}

std::vector<PolarityScore> score_lexicon(std::span<const std::string> tokens,
                                         std::span<const PolarityPair> pairs, const LanguageModel& model) {
  if (tokens.empty()) return {};
  if (pairs.empty()) throw ConfigError("polarity scoring needs at least one minimal pair");
  const std::vector<TokenId> ids = model.require_tokens(tokens);
  std::vector<std::size_t> wins(tokens.size(), 0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto pos = model.score_mask(pairs[i].positive, ids, 0).token_probs;
    const auto neg = model.score_mask(pairs[i].negative, ids, 0).token_probs;
    for (std::size_t t = 0; t < tokens.size(); ++t) wins[t] += pos[t] > neg[t] ? 1 : 0;
    if ((i + 1) % 2000 == 0) LOG(INFO) << "polarity pairs scored " << (i + 1) << "/" << pairs.size();
  }
  std::vector<PolarityScore> out;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    out.push_back({tokens[t], static_cast<double>(wins[t]) / static_cast<double>(pairs.size()), wins[t],
                   pairs.size()});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.token < b.token; });
  return out;
}

std::vector<ModifierCandidate> mine_modifier_candidates(std::span<const PolarityPair> pairs,
                                                        const LanguageModel& model, std::size_t topk,
                                                        std::size_t min_count) {
  std::map<std::string, ModifierCandidate> counts;
  for (const auto& p : pairs) {
    for (const auto* q : {&p.positive, &p.negative}) {
      for (const auto& e : model.mask_topk(*q, topk).entries) {
        if (model.is_subword(e.id)) continue;
        auto& c = counts[e.token];
        c.token = e.token;
        (q == &p.positive ? c.positive_count : c.negative_count)++;
      }
    }
  }
  std::vector<ModifierCandidate> out;
  for (auto& [tok, c] : counts) {
    if (c.positive_count > min_count || c.negative_count > min_count) out.push_back(std::move(c));
  }
  return out;
}

void WritePolarityPairs(const std::filesystem::path& path, std::span<const PolarityPair> pairs) {
  TsvTable t;
  t.header = {"source", "positive", "negative"};
  for (const auto& p : pairs) t.rows.push_back({std::to_string(p.source), p.positive.text(), p.negative.text()});
  WriteTsv(path, t);
}

}  // namespace artlang
