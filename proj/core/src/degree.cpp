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
#include "artlang/degree.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <glog/logging.h>

#include "artlang/error.hpp"

namespace artlang {
namespace {

std::string Capitalize(std::string_view word) {
  std::string out(word);
  if (!out.empty() && std::islower(static_cast<unsigned char>(out[0]))) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

std::string Question(const TemplateSentence& s) {
  return std::string(s.copula == Copula::kIs ? "Is" : "Are") + " the " + s.noun + " " + s.adjective + "?";
}

std::string Answer(const TemplateSentence& s, std::string_view particle, std::string_view modifier) {
  std::string a = Capitalize(particle);
  a += s.copula == Copula::kIs ? ", it is " : ", they are ";
  a.append(modifier).append(" ").append(s.adjective).append(".");
  return a;
}

bool IsAlphabetic(std::string_view tok) {
  return !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0;
  });
}

}  // namespace

QAContext make_qa_context(const TemplateSentence& s, const std::string& filler, QaSlot slot) {
  QAContext c;
  c.source = s.id;
  c.question = Question(s);
  c.slot = slot;
  c.filler = filler;
  c.answer = slot == QaSlot::kParticleMasked ? Answer(s, kMaskPlaceholder, filler)
                                             : Answer(s, filler, kMaskPlaceholder);
  return c;
}

std::vector<QAContext> make_qa_contexts(const TemplateSentence& s, std::span<const std::string> fillers,
                                        QaSlot slot) {
  std::vector<QAContext> out;
  out.reserve(fillers.size());
  for (const auto& f : fillers) out.push_back(make_qa_context(s, f, slot));
  return out;
}

std::string RenderQaText(const TemplateSentence& s, std::string_view particle, std::string_view modifier) {
  return Question(s) + " " + Answer(s, particle, modifier);
}

std::vector<ParticleCandidate> mine_particles(std::span<const TemplateSentence> sentences,
                                              std::span<const std::string> seeds_low,
                                              std::span<const std::string> seeds_high,
                                              const LanguageModel& model, std::size_t topk,
                                              std::size_t min_count) {
  std::vector<std::string> seeds(seeds_low.begin(), seeds_low.end());
  seeds.insert(seeds.end(), seeds_high.begin(), seeds_high.end());
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    for (const auto& c : make_qa_contexts(sentences[i], seeds, QaSlot::kParticleMasked)) {
      for (const auto& e : model.mask_topk(c.query(), topk).entries) {
        if (model.is_subword(e.id) || !IsAlphabetic(e.token)) continue;
        counts[e.token]++;
      }
    }
    if ((i + 1) % 1000 == 0) LOG(INFO) << "particle mining " << (i + 1) << "/" << sentences.size();
  }
  std::vector<ParticleCandidate> out;
  for (const auto& [tok, n] : counts) {
    if (n >= min_count) out.push_back({tok, n});
  }
  return out;
}

std::size_t CountStrictWins(std::span<const double> high, std::span<const double> low) {
  std::vector<double> sorted(low.begin(), low.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t wins = 0;
  for (double h : high) {
    wins += static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), h) - sorted.begin());
  }
  return wins;
}

namespace {

std::vector<DegreeScore> Finish(std::span<const std::string> tokens, const std::vector<std::size_t>& wins,
                                std::size_t comparisons) {
  std::vector<DegreeScore> out;
  out.reserve(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    out.push_back({tokens[t],
                   comparisons ? static_cast<double>(wins[t]) / static_cast<double>(comparisons) : 0.0, wins[t],
                   comparisons});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.token < b.token; });
  return out;
}

// probs[f][t]: probability of token t in the context filled with filler f.
std::vector<std::vector<double>> ScoreFillers(const TemplateSentence& s, std::span<const std::string> fillers,
                                              QaSlot slot, std::span<const TokenId> ids,
                                              const LanguageModel& model) {
  std::vector<std::vector<double>> probs;
  probs.reserve(fillers.size());
  for (const auto& c : make_qa_contexts(s, fillers, slot)) probs.push_back(model.score_mask(c.query(), ids, 0).token_probs);
  return probs;
}

std::vector<std::string> Unique(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::string> out(a.begin(), a.end());
  for (const auto& x : b) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  return out;
}

std::size_t IndexOf(const std::vector<std::string>& v, const std::string& x) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), x) - v.begin());
}

}  // namespace

DegreeScore particle_degree_score(const std::string& particle, std::span<const TemplateSentence> sentences,
                                  std::span<const SeedPair> seed_pairs, const LanguageModel& model) {
  const std::vector<std::string> one{particle};
  return score_particles(one, sentences, seed_pairs, model).front();
}

std::vector<DegreeScore> score_particles(std::span<const std::string> particles,
                                         std::span<const TemplateSentence> sentences,
                                         std::span<const SeedPair> seed_pairs, const LanguageModel& model) {
  if (particles.empty()) return {};
  const auto ids = model.require_tokens(particles);
  std::vector<std::string> highs, lows;
  for (const auto& [h, l] : seed_pairs) {
    highs.push_back(h);
    lows.push_back(l);
  }
  const auto seeds = Unique(highs, lows);
  std::vector<std::size_t> wins(particles.size(), 0);
  for (const auto& s : sentences) {
    const auto probs = ScoreFillers(s, seeds, QaSlot::kParticleMasked, ids, model);
    for (const auto& [h, l] : seed_pairs) {
      const auto& ph = probs[IndexOf(seeds, h)];
      const auto& pl = probs[IndexOf(seeds, l)];
      for (std::size_t t = 0; t < particles.size(); ++t) wins[t] += ph[t] > pl[t] ? 1 : 0;
    }
  }
  return Finish(particles, wins, sentences.size() * seed_pairs.size());
}

std::vector<DegreeScore> score_particles_grouped(std::span<const std::string> particles,
                                                 std::span<const TemplateSentence> sentences,
                                                 std::span<const std::string> high,
                                                 std::span<const std::string> low, const LanguageModel& model) {
  if (particles.empty()) return {};
  const auto ids = model.require_tokens(particles);
  std::vector<std::size_t> wins(particles.size(), 0);
  std::vector<double> ph(high.size()), pl(low.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto hp = ScoreFillers(sentences[i], high, QaSlot::kParticleMasked, ids, model);
    const auto lp = ScoreFillers(sentences[i], low, QaSlot::kParticleMasked, ids, model);
    for (std::size_t t = 0; t < particles.size(); ++t) {
      for (std::size_t j = 0; j < high.size(); ++j) ph[j] = hp[j][t];
      for (std::size_t j = 0; j < low.size(); ++j) pl[j] = lp[j][t];
      wins[t] += CountStrictWins(ph, pl);
    }
    if ((i + 1) % 200 == 0) LOG(INFO) << "group particle scoring " << (i + 1) << "/" << sentences.size();
  }
  return Finish(particles, wins, sentences.size() * high.size() * low.size());
}

ParticleInventory select_top_particles(std::span<const DegreeScore> scored, std::size_t k) {
  if (scored.size() < 2 * k) {
    throw DegenerateInputError("need at least " + std::to_string(2 * k) + " scored particles, got " +
                               std::to_string(scored.size()));
  }
  ParticleInventory inv;
  inv.scores.assign(scored.begin(), scored.end());
  std::sort(inv.scores.begin(), inv.scores.end(), [](const auto& a, const auto& b) { return a.token < b.token; });
  std::vector<DegreeScore> asc = inv.scores;
  std::stable_sort(asc.begin(), asc.end(), [](const auto& a, const auto& b) { return a.score < b.score; });
  std::vector<DegreeScore> desc = inv.scores;
  std::stable_sort(desc.begin(), desc.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  for (std::size_t i = 0; i < k; ++i) {
    inv.low.push_back(asc[i].token);
    inv.high.push_back(desc[i].token);
  }
  return inv;
}

DegreeScore modifier_degree_score(const std::string& modifier, std::span<const TemplateSentence> sentences,
                                  const ParticleInventory& inventory, const LanguageModel& model) {
  const std::vector<std::string> one{modifier};
  return score_modifier_degrees(one, sentences, inventory, model).front();
}

std::vector<DegreeScore> score_modifier_degrees(std::span<const std::string> modifiers,
                                                std::span<const TemplateSentence> sentences,
                                                const ParticleInventory& inventory, const LanguageModel& model) {
  if (modifiers.empty()) return {};
  if (inventory.high.empty() || inventory.low.empty()) {
    throw ConfigError("particle inventory has no selected high/low particles");
  }
  const auto ids = model.require_tokens(modifiers);
  std::vector<std::size_t> wins(modifiers.size(), 0);
  std::vector<double> ph(inventory.high.size()), pl(inventory.low.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto hp = ScoreFillers(sentences[i], inventory.high, QaSlot::kModifierMasked, ids, model);
    const auto lp = ScoreFillers(sentences[i], inventory.low, QaSlot::kModifierMasked, ids, model);
    for (std::size_t t = 0; t < modifiers.size(); ++t) {
      for (std::size_t j = 0; j < ph.size(); ++j) ph[j] = hp[j][t];
      for (std::size_t j = 0; j < pl.size(); ++j) pl[j] = lp[j][t];
      wins[t] += CountStrictWins(ph, pl);
    }
    if ((i + 1) % 500 == 0) LOG(INFO) << "degree scoring " << (i + 1) << "/" << sentences.size();
  }
  return Finish(modifiers, wins, sentences.size() * inventory.high.size() * inventory.low.size());
}

nlohmann::json ToJson(const PolarityScore& s) { return {{"score", s.score}, {"wins", s.wins}, {"pairs", s.pairs}}; }
nlohmann::json ToJson(const DegreeScore& s) {
  return {{"score", s.score}, {"wins", s.wins}, {"comparisons", s.comparisons}};
}

PolarityScore PolarityScoreFromJson(const std::string& token, const nlohmann::json& j) {
  return {token, j.at("score").get<double>(), j.at("wins").get<std::size_t>(), j.at("pairs").get<std::size_t>()};
}

DegreeScore DegreeScoreFromJson(const std::string& token, const nlohmann::json& j) {
  return {token, j.at("score").get<double>(), j.at("wins").get<std::size_t>(),
          j.at("comparisons").get<std::size_t>()};
}

nlohmann::json ParticleInventory::ToJson() const {
  nlohmann::json j;
  j["scores"] = nlohmann::json::object();
  for (const auto& s : scores) j["scores"][s.token] = artlang::ToJson(s);
  j["low"] = low;
  j["high"] = high;
  return j;
}

ParticleInventory ParticleInventory::FromJson(const nlohmann::json& j) {
  ParticleInventory inv;
  for (auto it = j.at("scores").begin(); it != j.at("scores").end(); ++it) {
    inv.scores.push_back(DegreeScoreFromJson(it.key(), it.value()));
  }
  inv.low = j.at("low").get<std::vector<std::string>>();
  inv.high = j.at("high").get<std::vector<std::string>>();
  return inv;
}

const LexiconEntry* ScoredLexicon::Find(const std::string& token) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), token,
                             [](const LexiconEntry& e, const std::string& t) { return e.token < t; });
  return it != entries.end() && it->token == token ? &*it : nullptr;
}

std::vector<std::string> ScoredLexicon::Tokens() const {
  std::vector<std::string> out;
  for (const auto& e : entries) out.push_back(e.token);
  return out;
}

nlohmann::json ScoredLexicon::ToJson() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& e : entries) {
    nlohmann::json v = nlohmann::json::object();
    if (e.polarity) v["polarity"] = artlang::ToJson(*e.polarity);
    if (e.degree) v["degree"] = artlang::ToJson(*e.degree);
    j[e.token] = std::move(v);
  }
  return j;
}

ScoredLexicon ScoredLexicon::FromJson(const nlohmann::json& j) {
  ScoredLexicon lex;
  for (auto it = j.begin(); it != j.end(); ++it) {
    LexiconEntry e;
    e.token = it.key();
    if (it.value().contains("polarity")) e.polarity = PolarityScoreFromJson(e.token, it.value()["polarity"]);
    if (it.value().contains("degree")) e.degree = DegreeScoreFromJson(e.token, it.value()["degree"]);
    lex.entries.push_back(std::move(e));
  }
  std::sort(lex.entries.begin(), lex.entries.end(), [](const auto& a, const auto& b) { return a.token < b.token; });
  return lex;
}

ScoredLexicon MergeScores(std::span<const PolarityScore> polarity, std::span<const DegreeScore> degree) {
  std::map<std::string, LexiconEntry> m;
  for (const auto& p : polarity) {
    m[p.token].token = p.token;
    m[p.token].polarity = p;
  }
  for (const auto& d : degree) {
    m[d.token].token = d.token;
    m[d.token].degree = d;
  }
  ScoredLexicon lex;
  for (auto& [tok, e] : m) lex.entries.push_back(std::move(e));
  return lex;
}

ScoredLexicon apply_curation(const ScoredLexicon& candidates, std::span<const std::string> keep_list,
                             bool allow_missing) {
  std::set<std::string> keep(keep_list.begin(), keep_list.end());
  std::vector<std::string> missing;
  for (const auto& t : keep) {
    if (!candidates.Find(t)) missing.push_back(t);
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    if (!allow_missing) throw ConfigError("keep-list tokens not among the scored candidates: " + names);
    LOG(WARNING) << "dropping keep-list tokens without scores: " << names;
  }
  ScoredLexicon out;
  for (const auto& e : candidates.entries) {
    if (keep.count(e.token)) out.entries.push_back(e);
  }
  return out;
}

}  // namespace artlang
