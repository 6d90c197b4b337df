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
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "artlang/language_model.hpp"

namespace artlang {

// Persistent content-addressed store for model scores, backed by SQLite.
//
// Masked-slot results are stored per (model state, context): a map from
// token to probability plus the longest top-k list seen so far. Lookups for
// a (state, context, token) triple therefore hit whenever that token was
// requested before for the same context. Values are stored as shortest
// round-trip decimals, so cached results are bit-identical to fresh ones.
class ScoreCache {
 public:
  // ":memory:" gives a private in-memory cache.
  explicit ScoreCache(const std::filesystem::path& db_path);
  ~ScoreCache();
  ScoreCache(const ScoreCache&) = delete;
  ScoreCache& operator=(const ScoreCache&) = delete;

  struct MaskEntry {
    std::vector<std::pair<TokenId, double>> token_probs;  // sorted by id
    std::size_t topk = 0;
    std::vector<TokenProb> top;
  };

  std::optional<MaskEntry> GetMask(const std::string& state, const std::string& context) const;
  void PutMask(const std::string& state, const std::string& context, const MaskEntry& entry);
  std::optional<double> GetPerplexity(const std::string& state, const std::string& text) const;
  void PutPerplexity(const std::string& state, const std::string& text, double value);

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

  static std::string Key(const std::string& state, const std::string& kind, const std::string& text);

 private:
  friend class CachedModel;
  struct Impl;
  std::unique_ptr<Impl> impl_;
  mutable std::mutex mu_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
};

// Decorator that serves scoring calls from a ScoreCache and forwards every
// other call to the wrapped model. Mutations change the inner state_id(), so
// stale entries are never returned.
class CachedModel final : public LanguageModel {
 public:
  CachedModel(LanguageModel* inner, ScoreCache* cache) : inner_(inner), cache_(cache) {}

  std::string model_id() const override { return inner_->model_id(); }
  std::string state_id() const override { return inner_->state_id(); }
  Capabilities capabilities() const override { return inner_->capabilities(); }
  std::size_t vocab_size() const override { return inner_->vocab_size(); }
  std::size_t embedding_width() const override { return inner_->embedding_width(); }
  std::optional<TokenId> find_token(std::string_view token) const override {
    return inner_->find_token(token);
  }
  std::string token_text(TokenId id) const override { return inner_->token_text(id); }
  bool is_subword(TokenId id) const override { return inner_->is_subword(id); }

  MaskScores score_mask(const MaskQuery& query, std::span<const TokenId> tokens,
                        std::size_t topk) const override;
  double sentence_perplexity(std::string_view text) const override;

  std::vector<TokenId> add_new_tokens(std::span<const std::string> names,
                                      std::uint64_t seed) override {
    return inner_->add_new_tokens(names, seed);
  }
  using LanguageModel::read_embeddings;
  Matrix read_embeddings(std::span<const TokenId> tokens) const override {
    return inner_->read_embeddings(tokens);
  }
  TrainingReport finetune_embeddings(std::span<const std::string> texts,
                                     const FinetuneConfig& cfg) override {
    return inner_->finetune_embeddings(texts, cfg);
  }
  std::string frozen_parameter_digest() const override { return inner_->frozen_parameter_digest(); }

  LanguageModel& inner() { return *inner_; }

 private:
  LanguageModel* inner_;
  ScoreCache* cache_;
};

}  // namespace artlang
