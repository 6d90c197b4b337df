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

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "artlang/language_model.hpp"

namespace artlang {

struct BertConfig {
  int vocab_size = 0;
  int hidden_size = 768;
  int num_layers = 12;
  int num_heads = 12;
  int intermediate_size = 3072;
  int max_positions = 512;
  int type_vocab_size = 2;
  float layer_norm_eps = 1e-12f;
  float hidden_dropout = 0.1f;
  float attention_dropout = 0.1f;
  bool tie_word_embeddings = true;
};

// Native BERT masked language model loaded from a Hugging Face style
// directory (config.json, vocab.txt, model.safetensors).
//
// Fine-tuning updates only the word-embedding matrix. The masked-LM decoder
// shares that matrix (weight tying), so output-side gradients reach every
// vocabulary row; all other parameters stay bit-identical.
class BertMaskedLM final : public LanguageModel {
 public:
  static std::unique_ptr<BertMaskedLM> Load(const std::filesystem::path& dir,
                                            std::string model_id = {});
  ~BertMaskedLM() override;

  std::string model_id() const override { return model_id_; }
  std::string state_id() const override;
  Capabilities capabilities() const override { return {true, false, true}; }

  std::size_t vocab_size() const override;
  std::size_t embedding_width() const override;
  std::optional<TokenId> find_token(std::string_view token) const override;
  std::string token_text(TokenId id) const override;
  bool is_subword(TokenId id) const override;

  std::vector<TokenId> add_new_tokens(std::span<const std::string> names,
                                      std::uint64_t seed) override;
  using LanguageModel::read_embeddings;
  Matrix read_embeddings(std::span<const TokenId> tokens) const override;
  TrainingReport finetune_embeddings(std::span<const std::string> texts,
                                     const FinetuneConfig& cfg) override;
  std::string frozen_parameter_digest() const override;

  const BertConfig& config() const;
  std::vector<TokenId> Encode(std::string_view text) const;

  struct LossSum {
    double nll = 0.0;
    int count = 0;
  };
  // Sums the masked-LM negative log-likelihood over positions whose label is
  // >= 0. When `embedding_grad` is non-null (vocab x hidden), the gradient of
  // that sum with respect to the word-embedding matrix is added to it.
  // `dropout_rng` enables dropout; null means evaluation mode.
  LossSum AccumulateMlmGradient(std::span<const TokenId> input_ids,
                                std::span<const TokenId> labels, Matrix* embedding_grad,
                                std::mt19937_64* dropout_rng) const;
  // One Adam/AdamW update of the word-embedding matrix.
  void OptimizerStep(const Matrix& grad, double learning_rate, const FinetuneConfig& cfg);
  void ResetOptimizer();

 protected:
  std::vector<double> mask_distribution(const MaskQuery& query) const override;

 private:
  struct Impl;
  explicit BertMaskedLM(std::unique_ptr<Impl> impl, std::string model_id);

  std::unique_ptr<Impl> impl_;
  std::string model_id_;
  std::vector<std::string> mutation_log_;
};

}  // namespace artlang
