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
#include "artlang/language_model.hpp"

#include <algorithm>
#include <numeric>

#include "artlang/error.hpp"

namespace artlang {

void FinetuneConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (mask_fraction < 0.0 || mask_fraction > 1.0) {
    throw ConfigError("mask fraction must lie in [0, 1]");
  }
  if (validation_fraction < 0.0 || validation_fraction >= 1.0) {
    throw ConfigError("validation fraction must lie in [0, 1)");
  }
  if (weight_decay < 0.0) throw ConfigError("weight decay must be >= 0");
}

std::vector<TokenProb> TopK(const LanguageModel& model, std::span<const double> probs,
                            std::size_t k) {
  std::vector<TokenId> ids;
  ids.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) ids.push_back(static_cast<TokenId>(i));
  }
  k = std::min(k, ids.size());
  auto better = [&](TokenId a, TokenId b) {
    if (probs[a] != probs[b]) return probs[a] > probs[b];
    return a < b;
  };
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(), better);
  std::vector<TokenProb> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back({ids[i], model.token_text(ids[i]), probs[ids[i]]});
  }
  return out;
}

std::vector<double> LanguageModel::mask_distribution(const MaskQuery&) const {
  throw CapabilityError("backend '" + model_id() + "' does not support masked scoring");
}

MaskScores LanguageModel::score_mask(const MaskQuery& query, std::span<const TokenId> tokens,
                                     std::size_t topk) const {
  const std::vector<double> dist = mask_distribution(query);
  MaskScores out;
  out.token_probs.reserve(tokens.size());
  for (TokenId id : tokens) {
    if (id < 0 || static_cast<std::size_t>(id) >= dist.size()) {
      throw VocabularyError("token id " + std::to_string(id) + " outside vocabulary");
    }
    out.token_probs.push_back(dist[static_cast<std::size_t>(id)]);
  }
  if (topk > 0) out.top = TopK(*this, dist, topk);
  return out;
}

std::vector<MaskScores> LanguageModel::score_masks(std::span<const MaskQuery> queries,
                                                   std::span<const TokenId> tokens,
                                                   std::size_t topk) const {
  std::vector<MaskScores> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(score_mask(q, tokens, topk));
  return out;
}

double LanguageModel::sentence_perplexity(std::string_view) const {
  throw CapabilityError("backend '" + model_id() + "' does not support causal scoring");
}

std::vector<TokenId> LanguageModel::add_new_tokens(std::span<const std::string>, std::uint64_t) {
  throw CapabilityError("backend '" + model_id() + "' does not support vocabulary mutation");
}

TrainingReport LanguageModel::finetune_embeddings(std::span<const std::string>,
                                                  const FinetuneConfig&) {
  throw CapabilityError("backend '" + model_id() + "' is not trainable");
}

TokenDistribution LanguageModel::mask_topk(const MaskQuery& query, std::size_t k) const {
  if (k == 0) throw ConfigError("mask_topk requires k >= 1");
  TokenDistribution out;
  out.query = query.text();
  out.entries = score_mask(query, {}, k).top;
  return out;
}

double LanguageModel::token_prob_at_mask(const MaskQuery& query, std::string_view token) const {
  const TokenId id = require_token(token);
  return score_mask(query, std::span<const TokenId>(&id, 1), 0).token_probs.front();
}

std::vector<double> LanguageModel::token_probs_at_mask(std::span<const MaskQuery> queries,
                                                       std::string_view token) const {
  const TokenId id = require_token(token);
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& s : score_masks(queries, std::span<const TokenId>(&id, 1), 0)) {
    out.push_back(s.token_probs.front());
  }
  return out;
}

TokenId LanguageModel::require_token(std::string_view token) const {
  if (auto id = find_token(token)) return *id;
  throw VocabularyError("token '" + std::string(token) + "' is not a single vocabulary item of '" +
                        model_id() + "'");
}

std::vector<TokenId> LanguageModel::require_tokens(std::span<const std::string> tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(require_token(t));
  return ids;
}

Matrix LanguageModel::read_embeddings(std::span<const std::string> tokens) const {
  const auto ids = require_tokens(tokens);
  return read_embeddings(std::span<const TokenId>(ids));
}

}  // namespace artlang
