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
#include "artlang/table_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>

#include "artlang/embedding_init.hpp"
#include "artlang/error.hpp"
#include "artlang/hashing.hpp"

namespace artlang {

namespace {

std::map<std::string, double> ReadTable(const nlohmann::json& j) {
  std::map<std::string, double> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const double p = it.value().get<double>();
    if (p < 0.0 || p > 1.0) {
      throw FormatError("probability for '" + it.key() + "' outside [0, 1]");
    }
    out[it.key()] = p;
  }
  return out;
}

}  // namespace

TableModel::TableModel(const nlohmann::json& fixture) {
  model_id_ = fixture.value("model_id", std::string("table-model"));
  subword_prefix_ = fixture.value("subword_prefix", std::string("##"));
  if (fixture.contains("special_tokens")) {
    special_ = fixture.at("special_tokens").get<std::vector<std::string>>();
  }
  vocab_ = fixture.at("vocabulary").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (!index_.emplace(vocab_[i], static_cast<TokenId>(i)).second) {
      throw FormatError("duplicate vocabulary entry '" + vocab_[i] + "'");
    }
  }

  const int width = fixture.value("embedding_width", 8);
  if (width <= 0) throw FormatError("embedding_width must be positive");
  embeddings_.resize(static_cast<Eigen::Index>(vocab_.size()), width);
  std::mt19937_64 rng(fixture.value("embedding_seed", std::uint64_t{1}));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index r = 0; r < embeddings_.rows(); ++r) {
    for (Eigen::Index c = 0; c < width; ++c) embeddings_(r, c) = static_cast<float>(normal(rng));
  }
  if (fixture.contains("embeddings")) {
    for (auto it = fixture.at("embeddings").begin(); it != fixture.at("embeddings").end(); ++it) {
      const TokenId id = require_token(it.key());
      const auto row = it.value().get<std::vector<float>>();
      if (static_cast<int>(row.size()) != width) {
        throw FormatError("embedding row for '" + it.key() + "' has wrong width");
      }
      for (int c = 0; c < width; ++c) embeddings_(id, c) = row[static_cast<std::size_t>(c)];
    }
  }

  if (fixture.contains("masked")) {
    for (auto it = fixture.at("masked").begin(); it != fixture.at("masked").end(); ++it) {
      MaskQuery check(it.key());
      (void)check;
      masked_[it.key()] = ReadTable(it.value());
    }
  }
  if (fixture.contains("masked_fallback")) {
    const auto& fb = fixture.at("masked_fallback");
    if (fb.is_object()) {
      masked_fallback_ = MaskedFallback::kTable;
      fallback_table_ = ReadTable(fb);
    } else if (fb == "hashed") {
      masked_fallback_ = MaskedFallback::kHashed;
    } else if (fb == "zero") {
      masked_fallback_ = MaskedFallback::kZero;
    } else {
      throw FormatError("unknown masked_fallback value");
    }
  }
  for (const auto& [ctx, table] : masked_) {
    for (const auto& [tok, p] : table) {
      (void)p;
      if (!index_.contains(tok)) throw FormatError("table for '" + ctx + "' names unknown token '" + tok + "'");
    }
  }
  for (const auto& [tok, p] : fallback_table_) {
    (void)p;
    if (!index_.contains(tok)) throw FormatError("fallback table names unknown token '" + tok + "'");
  }

  if (fixture.contains("causal")) {
    for (auto it = fixture.at("causal").begin(); it != fixture.at("causal").end(); ++it) {
      auto probs = it.value().get<std::vector<double>>();
      for (double p : probs) {
        if (!(p > 0.0 && p <= 1.0)) throw FormatError("causal probabilities must lie in (0, 1]");
      }
      causal_[it.key()] = std::move(probs);
    }
  }
  const std::string cf = fixture.value("causal_fallback", std::string("none"));
  if (cf == "none") {
    causal_fallback_ = CausalFallback::kNone;
  } else if (cf == "uniform") {
    causal_fallback_ = CausalFallback::kUniform;
  } else if (cf == "hashed") {
    causal_fallback_ = CausalFallback::kHashed;
  } else {
    throw FormatError("unknown causal_fallback value '" + cf + "'");
  }

  nlohmann::json tables = {{"masked", fixture.value("masked", nlohmann::json::object())},
                           {"masked_fallback", fixture.value("masked_fallback", nlohmann::json("zero"))},
                           {"causal", fixture.value("causal", nlohmann::json::object())},
                           {"causal_fallback", cf}};
  tables_digest_ = Sha256Hex(tables.dump());
  content_digest_ = Sha256Hex(fixture.dump());
}

TableModel TableModel::FromFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EnvironmentError("cannot open table-model fixture " + path.string());
  try {
    return TableModel(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed table-model fixture " + path.string() + ": " + e.what());
  }
}

std::string TableModel::state_id() const {
  const std::string base = model_id_ + "#" + content_digest_.substr(0, 16);
  if (mutation_log_.empty()) return base;
  Sha256 h;
  for (const auto& m : mutation_log_) h.Field(m);
  return base + "@" + h.Digest().substr(0, 16);
}

Capabilities TableModel::capabilities() const {
  Capabilities c;
  c.masked_scoring = true;
  c.causal_scoring = !causal_.empty() || causal_fallback_ != CausalFallback::kNone;
  c.trainable = false;
  return c;
}

std::optional<TokenId> TableModel::find_token(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string TableModel::token_text(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= vocab_.size()) {
    throw VocabularyError("token id " + std::to_string(id) + " outside vocabulary");
  }
  return vocab_[static_cast<std::size_t>(id)];
}

bool TableModel::is_subword(TokenId id) const {
  const std::string& t = vocab_.at(static_cast<std::size_t>(id));
  if (!subword_prefix_.empty() && t.starts_with(subword_prefix_)) return true;
  return std::find(special_.begin(), special_.end(), t) != special_.end();
}

std::uint64_t TableModel::Fnv1a(std::string_view a, std::string_view b) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
  };
  mix(a);
  mix(std::string_view("\x1f", 1));
  mix(b);
  return h;
}

std::vector<double> TableModel::TableToVector(const std::map<std::string, double>& table) const {
  std::vector<double> out(vocab_.size(), 0.0);
  for (const auto& [tok, p] : table) out[static_cast<std::size_t>(index_.at(tok))] = p;
  return out;
}

std::vector<double> TableModel::mask_distribution(const MaskQuery& query) const {
  if (auto it = masked_.find(query.text()); it != masked_.end()) return TableToVector(it->second);
  switch (masked_fallback_) {
    case MaskedFallback::kZero:
      return std::vector<double>(vocab_.size(), 0.0);
    case MaskedFallback::kTable:
      return TableToVector(fallback_table_);
    case MaskedFallback::kHashed: {
      std::vector<double> out(vocab_.size());
      double total = 0.0;
      for (std::size_t i = 0; i < vocab_.size(); ++i) {
        out[i] = 1.0 + static_cast<double>(Fnv1a(query.text(), vocab_[i]) % 1000);
        total += out[i];
      }
      for (double& p : out) p /= total;
      return out;
    }
  }
  return {};
}

std::vector<std::string> TableModel::SplitWords(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isspace(u)) {
      flush();
    } else if (std::isalnum(u) || u >= 0x80 || ch == '_' || ch == '[' || ch == ']') {
      cur.push_back(ch);
    } else {
      flush();
      out.emplace_back(1, ch);
    }
  }
  flush();
  return out;
}

double TableModel::sentence_perplexity(std::string_view text) const {
  if (!capabilities().causal_scoring) return LanguageModel::sentence_perplexity(text);
  const auto words = SplitWords(text);
  if (words.size() < 2) {
    throw QueryError("perplexity needs at least 2 tokens: \"" + std::string(text) + "\"");
  }
  std::string key;
  for (const auto& w : words) key += (key.empty() ? "" : " ") + w;
  std::vector<double> probs;
  if (auto it = causal_.find(std::string(text)); it != causal_.end()) {
    probs = it->second;
  } else if (auto it2 = causal_.find(key); it2 != causal_.end()) {
    probs = it2->second;
  } else if (causal_fallback_ == CausalFallback::kUniform) {
    probs.assign(words.size() - 1, 1.0 / static_cast<double>(vocab_.size()));
  } else if (causal_fallback_ == CausalFallback::kHashed) {
    std::string prefix = words[0];
    for (std::size_t i = 1; i < words.size(); ++i) {
      probs.push_back(1.0 / (2.0 + static_cast<double>(Fnv1a(prefix, words[i]) % 50)));
      prefix += " " + words[i];
    }
  } else {
    throw CapabilityError("no causal table entry for \"" + std::string(text) + "\"");
  }
  if (probs.size() != words.size() - 1) {
    throw FormatError("causal table for \"" + std::string(text) + "\" must list " +
                      std::to_string(words.size() - 1) + " probabilities");
  }
  double nll = 0.0;
  for (double p : probs) nll -= std::log(p);
  return std::exp(nll / static_cast<double>(probs.size()));
}

std::vector<TokenId> TableModel::add_new_tokens(std::span<const std::string> names,
                                                std::uint64_t seed) {
  std::vector<std::string> offenders;
  std::unordered_map<std::string, int> seen;
  for (const auto& n : names) {
    if (index_.contains(n) || seen[n]++ == 1) offenders.push_back(n);
  }
  if (!offenders.empty()) {
    std::string msg = "cannot add tokens already present or duplicated:";
    for (const auto& o : offenders) msg += " " + o;
    throw VocabularyError(msg);
  }
  if (names.empty()) return {};
  const Matrix rows = SampleEmbeddingRows(embeddings_, names.size(), seed);
  Matrix grown(embeddings_.rows() + rows.rows(), embeddings_.cols());
  grown << embeddings_, rows;
  embeddings_ = std::move(grown);
  std::vector<TokenId> ids;
  Sha256 h;
  for (const auto& n : names) {
    const auto id = static_cast<TokenId>(vocab_.size());
    vocab_.push_back(n);
    index_.emplace(n, id);
    ids.push_back(id);
    h.Field(n);
  }
  mutation_log_.push_back("add:" + std::to_string(seed) + ":" + h.Digest());
  return ids;
}

Matrix TableModel::read_embeddings(std::span<const TokenId> tokens) const {
  Matrix out(static_cast<Eigen::Index>(tokens.size()), embeddings_.cols());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const TokenId id = tokens[i];
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_.size()) {
      throw VocabularyError("token id " + std::to_string(id) + " outside vocabulary");
    }
    out.row(static_cast<Eigen::Index>(i)) = embeddings_.row(id);
  }
  return out;
}

std::string TableModel::frozen_parameter_digest() const { return tables_digest_; }

}  // namespace artlang
