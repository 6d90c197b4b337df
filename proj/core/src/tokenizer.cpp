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
#include "artlang/tokenizer.hpp"

#include <algorithm>
#include <climits>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "artlang/error.hpp"

namespace artlang {

std::vector<char32_t> DecodeUtf8(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const auto c = static_cast<unsigned char>(text[i]);
    int len = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      cp = c;
      len = 1;
    } else if ((c >> 5) == 0x6) {
      cp = c & 0x1F;
      len = 2;
    } else if ((c >> 4) == 0xE) {
      cp = c & 0x0F;
      len = 3;
    } else if ((c >> 3) == 0x1E) {
      cp = c & 0x07;
      len = 4;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + static_cast<std::size_t>(len) > text.size()) {
      out.push_back(0xFFFD);
      break;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + static_cast<std::size_t>(k)]);
      if ((cc >> 6) != 0x2) ok = false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    out.push_back(ok ? cp : 0xFFFD);
    i += ok ? static_cast<std::size_t>(len) : 1;
  }
  return out;
}

std::string EncodeUtf8(std::u32string_view cps) {
  std::string out;
  for (char32_t cp : cps) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

namespace {

bool IsWhitespace(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0x0B || cp == 0x0C ||
         cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 ||
         cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000 || cp == 0x85;
}

bool IsControl(char32_t cp) {
  if (cp == '\t' || cp == '\n' || cp == '\r') return false;
  return cp < 0x20 || (cp >= 0x7F && cp < 0xA0) || cp == 0xFFFD;
}

// ASCII non-alphanumerics plus the common Unicode punctuation blocks.
bool IsPunctuation(char32_t cp) {
  if ((cp >= 33 && cp <= 47) || (cp >= 58 && cp <= 64) || (cp >= 91 && cp <= 96) ||
      (cp >= 123 && cp <= 126)) {
    return true;
  }
  return cp == 0xA1 || cp == 0xA7 || cp == 0xAB || cp == 0xB6 || cp == 0xB7 || cp == 0xBB ||
         cp == 0xBF || (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
         (cp >= 0x3001 && cp <= 0x3003) || (cp >= 0x3008 && cp <= 0x3011);
}

bool IsLetter(char32_t cp) {
  if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  if (IsWhitespace(cp) || IsPunctuation(cp)) return false;
  if (cp >= 0xA0 && cp <= 0xBF) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return false;
  return true;
}

bool IsNumber(char32_t cp) { return cp >= '0' && cp <= '9'; }

// Lower-cases ASCII and Latin-1 letters and strips Latin-1 accents.
char32_t FoldLatin(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) cp += 32;
  static constexpr char32_t kBase[] = {
      'a', 'a', 'a', 'a', 'a', 'a', 0xE6, 'c', 'e', 'e', 'e', 'e', 'i', 'i', 'i', 'i',
      0xF0, 'n', 'o', 'o', 'o', 'o', 'o', 0xF7, 0xF8, 'u', 'u', 'u', 'u', 'y', 0xFE, 'y'};
  if (cp >= 0xE0 && cp <= 0xFF) return kBase[cp - 0xE0];
  return cp;
}

}  // namespace

WordPieceTokenizer::WordPieceTokenizer(std::vector<std::string> vocab, bool lower_case)
    : vocab_(std::move(vocab)), lower_case_(lower_case) {
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    index_.emplace(vocab_[i], static_cast<std::int32_t>(i));
  }
  original_size_ = vocab_.size();
  auto need = [&](const char* t) {
    auto it = index_.find(t);
    if (it == index_.end()) throw FormatError(std::string("vocabulary lacks ") + t);
    atomic_.push_back(t);
    return it->second;
  };
  cls_ = need("[CLS]");
  sep_ = need("[SEP]");
  mask_ = need("[MASK]");
  unk_ = need("[UNK]");
  if (index_.contains("[PAD]")) atomic_.push_back("[PAD]");
  std::stable_sort(atomic_.begin(), atomic_.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
}

WordPieceTokenizer WordPieceTokenizer::FromDirectory(const std::filesystem::path& dir) {
  std::ifstream in(dir / "vocab.txt");
  if (!in) throw EnvironmentError("missing vocab.txt in " + dir.string());
  std::vector<std::string> vocab;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.push_back(line);
  }
  bool lower = true;
  if (std::ifstream cfg(dir / "tokenizer_config.json"); cfg) {
    const auto j = nlohmann::json::parse(cfg, nullptr, false);
    if (!j.is_discarded()) lower = j.value("do_lower_case", true);
  }
  return WordPieceTokenizer(std::move(vocab), lower);
}

std::int32_t WordPieceTokenizer::AddToken(const std::string& token) {
  if (index_.contains(token)) throw VocabularyError("token '" + token + "' already in vocabulary");
  const auto id = static_cast<std::int32_t>(vocab_.size());
  vocab_.push_back(token);
  index_.emplace(token, id);
  atomic_.push_back(token);
  std::stable_sort(atomic_.begin(), atomic_.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  return id;
}

std::optional<std::int32_t> WordPieceTokenizer::Find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool WordPieceTokenizer::IsSpecial(std::int32_t id) const {
  const std::string& t = Token(id);
  if (static_cast<std::size_t>(id) >= original_size_) return false;
  return t.size() >= 2 && t.front() == '[' && t.back() == ']';
}

bool WordPieceTokenizer::IsContinuation(std::int32_t id) const {
  return static_cast<std::size_t>(id) < original_size_ && Token(id).starts_with("##");
}

std::vector<std::string> WordPieceTokenizer::BasicSplit(std::string_view text) const {
  std::vector<std::string> words;
  std::u32string cur;
  auto flush = [&] {
    if (!cur.empty()) words.push_back(EncodeUtf8(cur));
    cur.clear();
  };
  for (char32_t cp : DecodeUtf8(text)) {
    if (cp == 0 || IsControl(cp)) continue;
    if (IsWhitespace(cp)) {
      flush();
      continue;
    }
    if (lower_case_) cp = FoldLatin(cp);
    if (IsPunctuation(cp)) {
      flush();
      words.push_back(EncodeUtf8(std::u32string(1, cp)));
      continue;
    }
    cur.push_back(cp);
  }
  flush();
  return words;
}

void WordPieceTokenizer::WordPiece(const std::string& word, std::vector<std::string>& out) const {
  const auto cps = DecodeUtf8(word);
  if (cps.size() > 100) {
    out.push_back(vocab_[static_cast<std::size_t>(unk_)]);
    return;
  }
  std::vector<std::string> pieces;
  std::size_t start = 0;
  while (start < cps.size()) {
    std::size_t end = cps.size();
    std::string found;
    while (start < end) {
      std::string sub = EncodeUtf8(std::u32string_view(cps.data() + start, end - start));
      if (start > 0) sub = "##" + sub;
      if (auto it = index_.find(sub); it != index_.end() &&
                                      static_cast<std::size_t>(it->second) < original_size_) {
        found = std::move(sub);
        break;
      }
      --end;
    }
    if (found.empty()) {
      out.push_back(vocab_[static_cast<std::size_t>(unk_)]);
      return;
    }
    pieces.push_back(std::move(found));
    start = end;
  }
  out.insert(out.end(), pieces.begin(), pieces.end());
}

std::vector<std::string> WordPieceTokenizer::Tokenize(std::string_view text) const {
  std::vector<std::string> out;
  std::size_t pos = 0;
  std::size_t seg_start = 0;
  auto emit_segment = [&](std::size_t end) {
    if (end > seg_start) {
      for (const auto& w : BasicSplit(text.substr(seg_start, end - seg_start))) WordPiece(w, out);
    }
  };
  while (pos < text.size()) {
    bool matched = false;
    for (const auto& a : atomic_) {
      if (text.compare(pos, a.size(), a) == 0) {
        emit_segment(pos);
        out.push_back(a);
        pos += a.size();
        seg_start = pos;
        matched = true;
        break;
      }
    }
    if (!matched) ++pos;
  }
  emit_segment(text.size());
  return out;
}

std::vector<std::int32_t> WordPieceTokenizer::Encode(std::string_view text) const {
  std::vector<std::int32_t> ids{cls_};
  for (const auto& t : Tokenize(text)) ids.push_back(index_.at(t));
  ids.push_back(sep_);
  return ids;
}

// --- byte-level BPE -------------------------------------------------------

namespace {

std::vector<std::string> BuildByteEncoder() {
  std::vector<int> bs;
  for (int b = '!'; b <= '~'; ++b) bs.push_back(b);
  for (int b = 0xA1; b <= 0xAC; ++b) bs.push_back(b);
  for (int b = 0xAE; b <= 0xFF; ++b) bs.push_back(b);
  std::vector<char32_t> map(256, 0);
  std::set<int> present(bs.begin(), bs.end());
  for (int b : bs) map[static_cast<std::size_t>(b)] = static_cast<char32_t>(b);
  int n = 0;
  for (int b = 0; b < 256; ++b) {
    if (!present.contains(b)) map[static_cast<std::size_t>(b)] = static_cast<char32_t>(256 + n++);
  }
  std::vector<std::string> out(256);
  for (int b = 0; b < 256; ++b) out[static_cast<std::size_t>(b)] = EncodeUtf8(std::u32string(1, map[static_cast<std::size_t>(b)]));
  return out;
}

}  // namespace

ByteLevelBpeTokenizer::ByteLevelBpeTokenizer(std::unordered_map<std::string, std::int32_t> vocab,
                                             std::vector<std::pair<std::string, std::string>> merges)
    : vocab_(std::move(vocab)), byte_encoder_(BuildByteEncoder()) {
  for (std::size_t i = 0; i < merges.size(); ++i) ranks_.emplace(merges[i], static_cast<int>(i));
}

ByteLevelBpeTokenizer ByteLevelBpeTokenizer::FromDirectory(const std::filesystem::path& dir) {
  std::ifstream vin(dir / "vocab.json");
  std::ifstream min(dir / "merges.txt");
  if (!vin || !min) throw EnvironmentError("missing vocab.json/merges.txt in " + dir.string());
  auto vocab = nlohmann::json::parse(vin).get<std::unordered_map<std::string, std::int32_t>>();
  std::vector<std::pair<std::string, std::string>> merges;
  for (std::string line; std::getline(min, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("#version")) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw FormatError("bad merges line: " + line);
    merges.emplace_back(line.substr(0, sp), line.substr(sp + 1));
  }
  return ByteLevelBpeTokenizer(std::move(vocab), std::move(merges));
}

std::vector<std::string> ByteLevelBpeTokenizer::PreTokenize(std::string_view text) {
  const auto cps = DecodeUtf8(text);
  const std::size_t n = cps.size();
  std::vector<std::string> out;
  auto other = [](char32_t c) { return !IsWhitespace(c) && !IsLetter(c) && !IsNumber(c); };
  std::size_t i = 0;
  while (i < n) {
    const char32_t c = cps[i];
    std::size_t j = i;
    if (c == '\'' && i + 1 < n) {
      static const std::u32string kSuffixes[] = {U"re", U"ve", U"ll", U"s", U"t", U"m", U"d"};
      for (const auto& s : kSuffixes) {
        if (i + 1 + s.size() <= n && std::equal(s.begin(), s.end(), cps.begin() + static_cast<std::ptrdiff_t>(i + 1))) {
          j = i + 1 + s.size();
          break;
        }
      }
    }
    if (j == i) {
      const std::size_t k = (c == ' ' && i + 1 < n) ? i + 1 : i;
      const char32_t d = cps[k];
      auto run = [&](auto pred) {
        std::size_t e = k;
        while (e < n && pred(cps[e])) ++e;
        return e;
      };
      if (IsLetter(d)) {
        j = run(IsLetter);
      } else if (IsNumber(d)) {
        j = run(IsNumber);
      } else if (other(d)) {
        j = run(other);
      }
    }
    if (j == i) {
      std::size_t e = i;
      while (e < n && IsWhitespace(cps[e])) ++e;
      if (e < n && e - i >= 2) {
        j = e - 1;
      } else {
        j = e;
      }
    }
    out.push_back(EncodeUtf8(std::u32string(cps.begin() + static_cast<std::ptrdiff_t>(i),
                                            cps.begin() + static_cast<std::ptrdiff_t>(j))));
    i = j;
  }
  return out;
}

std::vector<std::string> ByteLevelBpeTokenizer::Bpe(const std::string& mapped) const {
  std::vector<std::string> parts;
  for (char32_t cp : DecodeUtf8(mapped)) parts.push_back(EncodeUtf8(std::u32string(1, cp)));
  while (parts.size() > 1) {
    int best = INT_MAX;
    std::size_t at = 0;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      auto it = ranks_.find({parts[i], parts[i + 1]});
      if (it != ranks_.end() && it->second < best) {
        best = it->second;
        at = i;
      }
    }
    if (best == INT_MAX) break;
    const std::string a = parts[at], b = parts[at + 1];
    std::vector<std::string> merged;
    for (std::size_t i = 0; i < parts.size();) {
      if (i + 1 < parts.size() && parts[i] == a && parts[i + 1] == b) {
        merged.push_back(a + b);
        i += 2;
      } else {
        merged.push_back(parts[i]);
        ++i;
      }
    }
    parts = std::move(merged);
  }
  return parts;
}

std::vector<std::int32_t> ByteLevelBpeTokenizer::Encode(std::string_view text) const {
  std::vector<std::int32_t> ids;
  for (const auto& piece : PreTokenize(text)) {
    std::string mapped;
    for (unsigned char b : piece) mapped += byte_encoder_[b];
    for (const auto& tok : Bpe(mapped)) {
      auto it = vocab_.find(tok);
      if (it == vocab_.end()) throw FormatError("BPE produced token missing from vocab: " + tok);
      ids.push_back(it->second);
    }
  }
  return ids;
}

}  // namespace artlang
