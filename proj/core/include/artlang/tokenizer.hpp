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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace artlang {

// Decodes UTF-8 into code points; invalid bytes map to U+FFFD.
std::vector<char32_t> DecodeUtf8(std::string_view text);
std::string EncodeUtf8(std::u32string_view cps);

// BERT-style tokenizer: basic splitting (whitespace, punctuation, optional
// lower-casing and accent stripping) followed by greedy longest-match
// WordPiece with "##" continuation pieces. Added tokens are matched verbatim
// before basic splitting and never broken up.
class WordPieceTokenizer {
 public:
  WordPieceTokenizer(std::vector<std::string> vocab, bool lower_case);
  static WordPieceTokenizer FromDirectory(const std::filesystem::path& dir);

  // Token ids wrapped in [CLS] ... [SEP].
  std::vector<std::int32_t> Encode(std::string_view text) const;
  std::vector<std::string> Tokenize(std::string_view text) const;

  std::int32_t AddToken(const std::string& token);
  std::optional<std::int32_t> Find(std::string_view token) const;
  const std::string& Token(std::int32_t id) const { return vocab_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return vocab_.size(); }
  bool IsSpecial(std::int32_t id) const;
  bool IsContinuation(std::int32_t id) const;

  std::int32_t cls_id() const { return cls_; }
  std::int32_t sep_id() const { return sep_; }
  std::int32_t mask_id() const { return mask_; }
  std::int32_t unk_id() const { return unk_; }

 private:
  std::vector<std::string> BasicSplit(std::string_view text) const;
  void WordPiece(const std::string& word, std::vector<std::string>& out) const;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::int32_t> index_;
  std::vector<std::string> atomic_;  // special + added tokens, longest first
  std::size_t original_size_ = 0;
  bool lower_case_ = true;
  std::int32_t cls_ = -1, sep_ = -1, mask_ = -1, unk_ = -1;
};

// GPT-2 byte-level BPE tokenizer.
class ByteLevelBpeTokenizer {
 public:
  ByteLevelBpeTokenizer(std::unordered_map<std::string, std::int32_t> vocab,
                        std::vector<std::pair<std::string, std::string>> merges);
  static ByteLevelBpeTokenizer FromDirectory(const std::filesystem::path& dir);

  std::vector<std::int32_t> Encode(std::string_view text) const;
  std::size_t size() const { return vocab_.size(); }

  // Pre-tokenizer pieces (before byte mapping and merges).
  static std::vector<std::string> PreTokenize(std::string_view text);

 private:
  std::vector<std::string> Bpe(const std::string& mapped) const;

  std::unordered_map<std::string, std::int32_t> vocab_;
  std::map<std::pair<std::string, std::string>, int> ranks_;
  std::vector<std::string> byte_encoder_;  // byte -> UTF-8 of mapped code point
};

}  // namespace artlang
