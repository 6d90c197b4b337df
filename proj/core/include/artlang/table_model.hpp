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
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "artlang/language_model.hpp"

namespace artlang {

// Deterministic table-driven backend. Masked distributions and causal
// next-token probabilities are read from a JSON fixture:
//
//   {
//     "model_id": "mock-mini",
//     "vocabulary": ["[MASK]", "very", "##ly", ...],   // rank order
//     "subword_prefix": "##",                          // optional
//     "special_tokens": ["[MASK]"],                    // optional
//     "embedding_width": 8, "embedding_seed": 1,       // optional
//     "embeddings": {"very": [..]},                    // optional explicit rows
//     "masked": {"The reason is [MASK] simple.": {"very": 0.4}},
//     "masked_fallback": "zero" | "hashed" | {"very": 0.1},
//     "causal": {"The purpose is interesting .": [0.5, 0.5, 0.5, 0.5]},
//     "causal_fallback": "none" | "uniform" | "hashed"
//   }
//
// Contexts absent from "masked" use the fallback: zero mass everywhere, a
// fixed table, or a pseudo-random distribution derived from an FNV-1a hash of
// (context, token) and normalised over the current vocabulary. Causal texts
// are split into word and punctuation tokens; a "causal" entry lists the
// probabilities of tokens 2..n.
//
// The table model supports vocabulary mutation and embedding reads but is not
// trainable.
class TableModel final : public LanguageModel {
 public:
  explicit TableModel(const nlohmann::json& fixture);
  static TableModel FromFile(const std::filesystem::path& path);

  std::string model_id() const override { return model_id_; }
  std::string state_id() const override;
  Capabilities capabilities() const override;

  std::size_t vocab_size() const override { return vocab_.size(); }
  std::size_t embedding_width() const override { return static_cast<std::size_t>(embeddings_.cols()); }
  std::optional<TokenId> find_token(std::string_view token) const override;
  std::string token_text(TokenId id) const override;
  bool is_subword(TokenId id) const override;

  double sentence_perplexity(std::string_view text) const override;

  std::vector<TokenId> add_new_tokens(std::span<const std::string> names,
                                      std::uint64_t seed) override;
  using LanguageModel::read_embeddings;
  Matrix read_embeddings(std::span<const TokenId> tokens) const override;
  std::string frozen_parameter_digest() const override;

  // Word/punctuation split used by the causal tables.
  static std::vector<std::string> SplitWords(std::string_view text);
  static std::uint64_t Fnv1a(std::string_view a, std::string_view b);

 protected:
  std::vector<double> mask_distribution(const MaskQuery& query) const override;

 private:
  enum class MaskedFallback { kZero, kHashed, kTable };
  enum class CausalFallback { kNone, kUniform, kHashed };

  std::vector<double> TableToVector(const std::map<std::string, double>& table) const;

  std::string model_id_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, TokenId> index_;
  std::string subword_prefix_;
  std::vector<std::string> special_;
  Matrix embeddings_;
  std::map<std::string, std::map<std::string, double>> masked_;
  MaskedFallback masked_fallback_ = MaskedFallback::kZero;
  std::map<std::string, double> fallback_table_;
  std::map<std::string, std::vector<double>> causal_;
  CausalFallback causal_fallback_ = CausalFallback::kNone;
  std::string tables_digest_;
  std::string content_digest_;
  std::vector<std::string> mutation_log_;
};

}  // namespace artlang
