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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "artlang/mask_query.hpp"

namespace artlang {

using TokenId = std::int32_t;

// Row-major float matrix; one row per vocabulary item for embedding tables.
using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Capabilities {
  bool masked_scoring = false;
  bool causal_scoring = false;
  bool trainable = false;
};

struct TokenProb {
  TokenId id = -1;
  std::string token;
  double probability = 0.0;
};

// Top-k view of the masked-slot distribution. Entries have probability in
// (0, 1] and are sorted by non-increasing probability (ties by token id).
struct TokenDistribution {
  std::string query;
  std::vector<TokenProb> entries;
};

// Result of one pass over a masked query: probabilities of the requested
// tokens (in request order) plus the top-k list.
struct MaskScores {
  std::vector<double> token_probs;
  std::vector<TokenProb> top;
};

enum class TrainableScope { kEmbeddingLayerOnly };

struct FinetuneConfig {
  double learning_rate = 5e-5;
  int batch_size = 32;
  int epochs = 3;
  // AdamW (decoupled decay) when true, plain Adam with L2 otherwise.
  bool decoupled_weight_decay = true;
  double weight_decay = 0.0;
  TrainableScope scope = TrainableScope::kEmbeddingLayerOnly;
  double mask_fraction = 0.15;
  double validation_fraction = 0.15;
  std::uint64_t seed = 42;
  // Linear decay of the learning rate to zero over all optimizer steps.
  bool linear_schedule = true;
  // Apply the checkpoint's dropout rates while training.
  bool dropout = true;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void Validate() const;
};

struct EpochLoss {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct TrainingReport {
  std::size_t train_examples = 0;
  std::size_t validation_examples = 0;
  std::size_t optimizer_steps = 0;
  std::vector<EpochLoss> epochs;
};

// Uniform interface to the language-model capabilities used by the pipeline.
//
// Scoring calls are const and must be pure functions of (model state, input).
// Vocabulary mutation and fine-tuning require exclusive access.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  // Identifier of the underlying checkpoint.
  virtual std::string model_id() const = 0;
  // Identifier of the current parameter state: changes whenever tokens are
  // added or embeddings are trained. Used as the score-cache namespace.
  virtual std::string state_id() const = 0;
  virtual Capabilities capabilities() const = 0;

  virtual std::size_t vocab_size() const = 0;
  virtual std::size_t embedding_width() const = 0;
  virtual std::optional<TokenId> find_token(std::string_view token) const = 0;
  virtual std::string token_text(TokenId id) const = 0;
  // True for word-continuation pieces and special/control tokens.
  virtual bool is_subword(TokenId id) const = 0;

  // One pass over a masked query. `tokens` must be vocabulary ids; `topk` may
  // be zero when only token probabilities are needed.
  virtual MaskScores score_mask(const MaskQuery& query, std::span<const TokenId> tokens,
                                std::size_t topk) const;
  virtual std::vector<MaskScores> score_masks(std::span<const MaskQuery> queries,
                                              std::span<const TokenId> tokens,
                                              std::size_t topk) const;

  // exp(mean negative log-likelihood) under the causal scorer's tokenization.
  virtual double sentence_perplexity(std::string_view text) const;

  virtual std::vector<TokenId> add_new_tokens(std::span<const std::string> names,
                                              std::uint64_t seed);
  virtual Matrix read_embeddings(std::span<const TokenId> tokens) const = 0;
  virtual TrainingReport finetune_embeddings(std::span<const std::string> texts,
                                             const FinetuneConfig& cfg);
  // Digest over every parameter except the token-embedding matrix.
  virtual std::string frozen_parameter_digest() const = 0;

  // Convenience wrappers built on score_mask.
  TokenDistribution mask_topk(const MaskQuery& query, std::size_t k) const;
  double token_prob_at_mask(const MaskQuery& query, std::string_view token) const;
  std::vector<double> token_probs_at_mask(std::span<const MaskQuery> queries,
                                          std::string_view token) const;

  // Throws VocabularyError naming the token when it is not a vocabulary item.
  TokenId require_token(std::string_view token) const;
  std::vector<TokenId> require_tokens(std::span<const std::string> tokens) const;
  Matrix read_embeddings(std::span<const std::string> tokens) const;

 protected:
  // Full masked-slot distribution over the vocabulary. Backends that support
  // masked scoring override this; score_mask is derived from it by default.
  virtual std::vector<double> mask_distribution(const MaskQuery& query) const;
};

// Selects the k highest entries of a probability vector, dropping zeros.
// Ties are broken by the lower token id.
std::vector<TokenProb> TopK(const LanguageModel& model, std::span<const double> probs,
                            std::size_t k);

}  // namespace artlang
