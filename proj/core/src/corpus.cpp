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
#include "artlang/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include <glog/logging.h>

#include "artlang/error.hpp"
#include "artlang/io.hpp"

namespace artlang {

LexiconTagger LexiconTagger::FromFile(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw EnvironmentError("POS tagger lexicon not found: " + path.string() +
                           " (generate it with tools/tag_vocabulary.py)");
  }
  std::unordered_map<std::string, std::string> labels;
  std::istringstream in(ReadTextFile(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError(path.string() + ": expected token<TAB>label");
    std::string label = line.substr(tab + 1);
    if (!label.empty() && label.back() == '\r') label.pop_back();
    labels[line.substr(0, tab)] = std::move(label);
  }
  return LexiconTagger(std::move(labels));
}

std::string LexiconTagger::Tag(std::string_view token) const {
  auto it = labels_.find(std::string(token));
  return it == labels_.end() ? "X" : it->second;
}

std::vector<TaggedToken> tag_vocabulary(const LanguageModel& model, const PosTagger& tagger) {
  std::vector<TaggedToken> out;
  const auto n = static_cast<TokenId>(model.vocab_size());
  for (TokenId id = 0; id < n; ++id) {
    if (model.is_subword(id)) continue;
    const std::string tok = model.token_text(id);
    out.push_back({tok, tagger.Tag(tok), id});
  }
  return out;
}

PosSets select_pos_sets(std::span<const TaggedToken> tagged, std::size_t n_nouns, std::size_t n_adjs) {
  PosSets out;
  for (const auto& t : tagged) {
    if (t.pos == kNounTag && out.nouns.size() < n_nouns) out.nouns.push_back(t.token);
    if (t.pos == kAdjectiveTag && out.adjectives.size() < n_adjs) out.adjectives.push_back(t.token);
  }
  if (out.nouns.size() < n_nouns) {
    LOG(WARNING) << "requested " << n_nouns << " nouns, only " << out.nouns.size() << " available";
  }
  if (out.adjectives.size() < n_adjs) {
    LOG(WARNING) << "requested " << n_adjs << " adjectives, only " << out.adjectives.size() << " available";
  }
  return out;
}

std::vector<std::string> CorpusTokens(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    while (!cur.empty() && (cur.back() == '\'' || cur.back() == '-')) cur.pop_back();
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : line) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if ((c == '\'' || c == '-') && !cur.empty()) {
      cur.push_back(ch);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

GradabilityCounter::GradabilityCounter(std::span<const std::string> adjectives,
                                       std::span<const std::string> seeds) {
  for (const auto& a : adjectives) counts_.emplace(a, std::pair<long, long>{0, 0});
  for (const auto& s : seeds) seeds_.emplace(s, true);
}

void GradabilityCounter::AddLine(std::string_view line) {
  const auto toks = CorpusTokens(line);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    auto it = counts_.find(toks[i]);
    if (it == counts_.end()) continue;
    it->second.second++;
    if (i > 0 && seeds_.count(toks[i - 1])) it->second.first++;
  }
}

void GradabilityCounter::AddStream(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) AddLine(line);
}

long GradabilityCounter::modified(const std::string& adjective) const {
  auto it = counts_.find(adjective);
  return it == counts_.end() ? 0 : it->second.first;
}

long GradabilityCounter::total(const std::string& adjective) const {
  auto it = counts_.find(adjective);
  return it == counts_.end() ? 0 : it->second.second;
}

std::vector<GradabilityRecord> rank_gradable(std::span<const std::string> adjectives,
                                             const GradabilityCounter& counts, std::size_t keep) {
  std::vector<GradabilityRecord> recs;
  recs.reserve(adjectives.size());
  for (std::size_t i = 0; i < adjectives.size(); ++i) {
    GradabilityRecord r;
    r.adjective = adjectives[i];
    r.modified = counts.modified(r.adjective);
    r.total = counts.total(r.adjective);
    r.ratio = r.total > 0 ? static_cast<double>(r.modified) / static_cast<double>(r.total) : 0.0;
    r.rank = static_cast<int>(i);
    recs.push_back(std::move(r));
  }
  std::stable_sort(recs.begin(), recs.end(),
                   [](const GradabilityRecord& a, const GradabilityRecord& b) { return a.ratio > b.ratio; });
  if (recs.size() > keep) recs.resize(keep);
  return recs;
}

std::string_view CopulaText(Copula c) { return c == Copula::kIs ? "is" : "are"; }

Copula ParseCopula(std::string_view text) {
  if (text == "is") return Copula::kIs;
  if (text == "are") return Copula::kAre;
  throw FormatError("unknown copula '" + std::string(text) + "'");
}

std::string RenderSentence(std::string_view noun, Copula copula, std::string_view adjective) {
  std::string s = "The ";
  s.append(noun).append(" ").append(CopulaText(copula)).append(" ").append(adjective).append(".");
  return s;
}

std::vector<TemplateSentence> generate_base_sentences(std::span<const std::string> nouns,
                                                      std::span<const std::string> adjectives) {
  std::vector<TemplateSentence> out;
  out.reserve(nouns.size() * adjectives.size() * 2);
  for (const auto& n : nouns) {
    for (const auto& a : adjectives) {
      for (Copula c : {Copula::kIs, Copula::kAre}) {
        TemplateSentence s;
        s.id = out.size();
        s.noun = n;
        s.adjective = a;
        s.copula = c;
        s.text = RenderSentence(n, c, a);
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

std::vector<TemplateSentence> filter_by_perplexity(std::span<const TemplateSentence> sentences,
                                                   const LanguageModel& scorer, std::size_t keep) {
  if (keep > sentences.size()) {
    LOG(WARNING) << "keep=" << keep << " exceeds the " << sentences.size() << " sentences available";
    keep = sentences.size();
  }
  std::vector<double> ppl(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    ppl[i] = scorer.sentence_perplexity(sentences[i].text);
    if ((i + 1) % 10000 == 0) LOG(INFO) << "perplexity scored " << (i + 1) << "/" << sentences.size();
  }
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ppl[a] < ppl[b]; });
  std::vector<TemplateSentence> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    TemplateSentence s = sentences[order[i]];
    s.perplexity = ppl[order[i]];
    out.push_back(std::move(s));
  }
  return out;
}

void WriteBaseSentences(const std::filesystem::path& path, std::span<const TemplateSentence> sentences) {
  TsvTable t;
  t.header = {"id", "noun", "adjective", "copula", "text", "perplexity"};
  for (const auto& s : sentences) {
    t.rows.push_back({std::to_string(s.id), s.noun, s.adjective, std::string(CopulaText(s.copula)), s.text,
                      s.perplexity ? FormatDouble(*s.perplexity) : ""});
  }
  WriteTsv(path, t);
}

std::vector<TemplateSentence> ReadBaseSentences(const std::filesystem::path& path) {
  const TsvTable t = ReadTsv(path);
  const auto ci = t.Column("id"), cn = t.Column("noun"), ca = t.Column("adjective"), cc = t.Column("copula"),
             ct = t.Column("text"), cp = t.Column("perplexity");
  std::vector<TemplateSentence> out;
  for (const auto& r : t.rows) {
    TemplateSentence s;
    s.id = static_cast<std::size_t>(std::stoull(r[ci]));
    s.noun = r[cn];
    s.adjective = r[ca];
    s.copula = ParseCopula(r[cc]);
    s.text = r[ct];
    if (!r[cp].empty()) s.perplexity = ParseDouble(r[cp]);
    if (s.text != RenderSentence(s.noun, s.copula, s.adjective)) {
      throw FormatError(path.string() + ": text does not match its template fields: '" + s.text + "'");
    }
    out.push_back(std::move(s));
  }
  return out;
}

void WriteGradable(const std::filesystem::path& path, std::span<const GradabilityRecord> records) {
  TsvTable t;
  t.header = {"adjective", "ratio", "modified", "total", "rank"};
  for (const auto& r : records) {
    t.rows.push_back({r.adjective, FormatDouble(r.ratio), std::to_string(r.modified), std::to_string(r.total),
                      std::to_string(r.rank)});
  }
  WriteTsv(path, t);
}

std::vector<GradabilityRecord> ReadGradable(const std::filesystem::path& path) {
  const TsvTable t = ReadTsv(path);
  const auto ca = t.Column("adjective"), cr = t.Column("ratio"), cm = t.Column("modified"),
             ct = t.Column("total"), ck = t.Column("rank");
  std::vector<GradabilityRecord> out;
  for (const auto& r : t.rows) {
    out.push_back({r[ca], std::stol(r[cm]), std::stol(r[ct]), ParseDouble(r[cr]), std::stoi(r[ck])});
  }
  return out;
}

}  // namespace artlang
