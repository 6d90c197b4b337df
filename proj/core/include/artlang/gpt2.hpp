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
#include <string>
#include <vector>

#include "artlang/language_model.hpp"

namespace artlang {

// Native GPT-2 causal scorer loaded from a Hugging Face style directory
// (config.json, vocab.json, merges.txt, model.safetensors). Supports only
// sentence perplexity and embedding reads.
class Gpt2Scorer final : public LanguageModel {
 public:
  static std::unique_ptr<Gpt2Scorer> Load(const std::filesystem::path& dir, std::string model_id = {});
  ~Gpt2Scorer() override;

  std::string model_id() const override { return model_id_; }
  std::string state_id() const override;
  Capabilities capabilities() const override { return {false, true, false}; }

  std::size_t vocab_size() const override;
  std::size_t embedding_width() const override;
  std::optional<TokenId> find_token(std::string_view token) const override;
  std::string token_text(TokenId id) const override;
  bool is_subword(TokenId id) const override;

  // Perplexity over tokens 2..n of the byte-level BPE encoding (no BOS).
  double sentence_perplexity(std::string_view text) const override;

  using LanguageModel::read_embeddings;
  Matrix read_embeddings(std::span<const TokenId> tokens) const override;
  std::string frozen_parameter_digest() const override;

  std::vector<TokenId> Encode(std::string_view text) const;

 private:
  struct Impl;
  Gpt2Scorer(std::unique_ptr<Impl> impl, std::string model_id);
  std::unique_ptr<Impl> impl_;
  std::string model_id_;
};

}  // namespace artlang
