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
#include "artlang/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <glog/logging.h>

#include "artlang/error.hpp"
#include "artlang/io.hpp"

namespace artlang {

std::array<DegreeGroup, 3> partition_modifiers(const ScoredLexicon& lexicon) {
  if (lexicon.entries.empty()) throw DegenerateInputError("cannot partition an empty lexicon");
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& e : lexicon.entries) {
    if (!e.degree) throw ConfigError("lexicon entry '" + e.token + "' has no degree score");
    lo = first ? e.degree->score : std::min(lo, e.degree->score);
    hi = first ? e.degree->score : std::max(hi, e.degree->score);
    first = false;
  }
  if (!(hi > lo)) throw DegenerateInputError("all modifiers have the same degree; intervals collapse");
  const double range = hi - lo;
  std::array<DegreeGroup, 3> groups;
  for (int g = 0; g < 3; ++g) {
    groups[g].label = "v" + std::to_string(g + 1);
    groups[g].lower = lo + range * g / 3.0;
    groups[g].upper = g == 2 ? hi : lo + range * (g + 1) / 3.0;
  }
  // Compare against the stored bounds so membership agrees with the reported
  // intervals; a value on a boundary belongs to the lower group.
  for (const auto& e : lexicon.entries) {
    const double d = e.degree->score;
    const int g = d <= groups[0].upper ? 0 : (d <= groups[1].upper ? 1 : 2);
    groups[g].members.push_back(e.token);
  }
  return groups;
}

GroupParticles mine_group_particles(const std::array<DegreeGroup, 3>& groups,
                                    std::span<const std::string> candidates,
                                    std::span<const TemplateSentence> sentences, const LanguageModel& model,
                                    std::size_t k) {
  GroupParticles out;
  if (k == 0) return out;
  for (const auto& g : groups) {
    if (g.members.empty()) throw DegenerateInputError("degree group " + g.label + " has no members");
  }
  if (candidates.size() < k) {
    throw DegenerateInputError("need at least " + std::to_string(k) + " particle candidates, got " +
                               std::to_string(candidates.size()));
  }
  for (int g = 0; g < 3; ++g) {
    std::vector<std::string> rest;
    for (int o = 0; o < 3; ++o) {
      if (o != g) rest.insert(rest.end(), groups[o].members.begin(), groups[o].members.end());
    }
    LOG(INFO) << "mining particles for " << groups[g].label << " vs rest";
    out.scores[g] = score_particles_grouped(candidates, sentences, groups[g].members, rest, model);
    std::vector<DegreeScore> desc = out.scores[g];
    std::stable_sort(desc.begin(), desc.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
    for (std::size_t i = 0; i < k; ++i) out.particles[g].push_back(desc[i].token);
  }
  return out;
}

std::string RoleName(CohortRole role) {
  switch (role) {
    case CohortRole::kTargetV1: return "v1";
    case CohortRole::kTargetV2: return "v2";
    case CohortRole::kTargetV3: return "v3";
    case CohortRole::kRandomBaseline: return "random";
    case CohortRole::kUntrainedBaseline: return "untrained";
  }
  return "";
}

CohortRole ParseRole(std::string_view name) {
  for (auto r : {CohortRole::kTargetV1, CohortRole::kTargetV2, CohortRole::kTargetV3, CohortRole::kRandomBaseline,
                 CohortRole::kUntrainedBaseline}) {
    if (RoleName(r) == name) return r;
  }
  throw FormatError("unknown cohort role '" + std::string(name) + "'");
}

std::string CohortTokenName(CohortRole role, std::size_t index) {
  const std::string n = std::to_string(index);
  switch (role) {
    case CohortRole::kTargetV1: return "[mod_v1_" + n + "]";
    case CohortRole::kTargetV2: return "[mod_v2_" + n + "]";
    case CohortRole::kTargetV3: return "[mod_v3_" + n + "]";
    case CohortRole::kRandomBaseline: return "[rnd_" + n + "]";
    case CohortRole::kUntrainedBaseline: return "[unt_" + n + "]";
  }
  return "";
}

std::array<TokenCohort, 5> create_cohorts(LanguageModel& model, std::uint64_t seed, std::size_t cohort_size) {
  std::array<TokenCohort, 5> cohorts;
  std::vector<std::string> all;
  for (int r = 0; r < 5; ++r) {
    cohorts[r].role = static_cast<CohortRole>(r);
    for (std::size_t i = 0; i < cohort_size; ++i) {
      cohorts[r].names.push_back(CohortTokenName(cohorts[r].role, i));
      all.push_back(cohorts[r].names.back());
    }
  }
  const auto ids = model.add_new_tokens(all, seed);
  for (int r = 0; r < 5; ++r) {
    cohorts[r].ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(r * cohort_size),
                          ids.begin() + static_cast<std::ptrdiff_t>((r + 1) * cohort_size));
  }
  return cohorts;
}

std::vector<TrainingExample> build_training_dataset(std::span<const TemplateSentence> sentences,
                                                    const GroupParticles& particles,
                                                    const std::array<TokenCohort, 5>& cohorts, std::uint64_t seed) {
  std::set<std::string> pooled_set;
  for (const auto& p : particles.particles) pooled_set.insert(p.begin(), p.end());
  const std::vector<std::string> pooled(pooled_set.begin(), pooled_set.end());
  for (int g = 0; g < 3; ++g) {
    if (particles.particles[g].empty()) throw ConfigError("group v" + std::to_string(g + 1) + " has no particles");
  }
  std::mt19937_64 rng(seed);
  auto pick = [&rng](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::vector<TrainingExample> out;
  out.reserve(sentences.size() * 6);
  auto add = [&](const TemplateSentence& s, CohortRole role, const std::vector<std::string>& pool) {
    const auto& cohort = cohorts[static_cast<int>(role)];
    TrainingExample ex;
    ex.sentence = s.id;
    ex.role = role;
    ex.particle = pool[pick(pool.size())];
    ex.token_index = pick(cohort.names.size());
    ex.token = cohort.names[ex.token_index];
    ex.text = RenderQaText(s, ex.particle, ex.token);
    out.push_back(std::move(ex));
  };
  for (const auto& s : sentences) {
    for (int g = 0; g < 3; ++g) add(s, static_cast<CohortRole>(g), particles.particles[g]);
  }
  for (const auto& s : sentences) {
    for (int g = 0; g < 3; ++g) add(s, CohortRole::kRandomBaseline, pooled);
  }
  return out;
}

std::vector<std::vector<TokenMeasurement>> measure_cohorts(std::span<const TokenCohort> cohorts,
                                                           std::span<const TemplateSentence> sentences,
                                                           const ParticleInventory& inventory,
                                                           const LanguageModel& model) {
  std::vector<std::string> all;
  for (const auto& c : cohorts) all.insert(all.end(), c.names.begin(), c.names.end());
  const auto pairs = make_polarity_pairs(sentences);
  const auto pol = score_lexicon(all, pairs, model);
  const auto deg = score_modifier_degrees(all, sentences, inventory, model);
  // Both lists are token-sorted; index them back into cohort order.
  auto find_pol = [&](const std::string& t) {
    return *std::lower_bound(pol.begin(), pol.end(), t, [](const auto& a, const std::string& b) { return a.token < b; });
  };
  auto find_deg = [&](const std::string& t) {
    return *std::lower_bound(deg.begin(), deg.end(), t, [](const auto& a, const std::string& b) { return a.token < b; });
  };
  std::vector<std::vector<TokenMeasurement>> out;
  for (const auto& c : cohorts) {
    std::vector<TokenMeasurement> m;
    for (const auto& n : c.names) m.push_back({n, find_pol(n), find_deg(n)});
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<TokenMeasurement> measure_cohort(const TokenCohort& cohort, std::span<const TemplateSentence> sentences,
                                             const ParticleInventory& inventory, const LanguageModel& model) {
  return measure_cohorts(std::span<const TokenCohort>(&cohort, 1), sentences, inventory, model).front();
}

CohortSummary Summarize(const std::string& cohort, std::span<const TokenMeasurement> m) {
  CohortSummary s;
  s.cohort = cohort;
  if (m.empty()) return s;
  // Population statistics: sum first, divide once.
  const double n = static_cast<double>(m.size());
  for (const auto& x : m) {
    s.degree_mean += x.degree.score;
    s.polarity_mean += x.polarity.score;
  }
  s.degree_mean /= n;
  s.polarity_mean /= n;
  for (const auto& x : m) {
    s.degree_std += (x.degree.score - s.degree_mean) * (x.degree.score - s.degree_mean);
    s.polarity_std += (x.polarity.score - s.polarity_mean) * (x.polarity.score - s.polarity_mean);
  }
  s.degree_std = std::sqrt(s.degree_std / n);
  s.polarity_std = std::sqrt(s.polarity_std / n);
  return s;
}

ExperimentReport run_experiment(const ScoredLexicon& lexicon, std::span<const std::string> particle_candidates,
                                const ParticleInventory& inventory, std::span<const TemplateSentence> sentences,
                                LanguageModel& model, const ExperimentConfig& cfg) {
  if (!model.capabilities().trainable) {
    throw CapabilityError("backend '" + model.model_id() + "' is not trainable");
  }
  if (sentences.empty()) throw ConfigError("experiment needs at least one base sentence");
  cfg.finetune.Validate();
  ExperimentReport r;
  r.groups = partition_modifiers(lexicon);
  r.group_particles = mine_group_particles(r.groups, particle_candidates, sentences, model, cfg.particles_per_group);
  r.cohorts = create_cohorts(model, cfg.seed, cfg.cohort_size);
  r.training_set = build_training_dataset(sentences, r.group_particles, r.cohorts, cfg.seed);
  LOG(INFO) << "measuring cohorts before training";
  r.before = measure_cohorts(r.cohorts, sentences, inventory, model);

  std::vector<std::string> texts;
  texts.reserve(r.training_set.size());
  for (const auto& ex : r.training_set) texts.push_back(ex.text);
  r.frozen_digest_before = model.frozen_parameter_digest();
  LOG(INFO) << "fine-tuning embeddings on " << texts.size() << " texts";
  r.training = model.finetune_embeddings(texts, cfg.finetune);
  r.frozen_digest_after = model.frozen_parameter_digest();
  if (r.frozen_digest_after != r.frozen_digest_before) {
    throw Error("non-embedding parameters changed during fine-tuning");
  }
  LOG(INFO) << "measuring cohorts after training";
  r.after = measure_cohorts(r.cohorts, sentences, inventory, model);
  for (int c = 0; c < 5; ++c) {
    const std::string name = RoleName(r.cohorts[c].role);
    r.summary_before.push_back(Summarize(name, r.before[c]));
    r.summary_after.push_back(Summarize(name, r.after[c]));
  }
  return r;
}

nlohmann::json CohortsToJson(const ExperimentReport& r) {
  nlohmann::json j;
  j["groups"] = nlohmann::json::array();
  for (int g = 0; g < 3; ++g) {
    nlohmann::json scores = nlohmann::json::object();
    for (const auto& s : r.group_particles.scores[g]) scores[s.token] = ToJson(s);
    j["groups"].push_back({{"label", r.groups[g].label},
                           {"lower", r.groups[g].lower},
                           {"upper", r.groups[g].upper},
                           {"members", r.groups[g].members},
                           {"particles", r.group_particles.particles[g]},
                           {"particle_scores", scores}});
  }
  j["cohorts"] = nlohmann::json::array();
  for (const auto& c : r.cohorts) {
    j["cohorts"].push_back({{"role", RoleName(c.role)}, {"tokens", c.names}, {"ids", c.ids}});
  }
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : r.training.epochs) {
    epochs.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"validation_loss", e.validation_loss}});
  }
  j["training"] = {{"train_examples", r.training.train_examples},
                   {"validation_examples", r.training.validation_examples},
                   {"optimizer_steps", r.training.optimizer_steps},
                   {"epochs", epochs},
                   {"frozen_digest_before", r.frozen_digest_before},
                   {"frozen_digest_after", r.frozen_digest_after}};
  return j;
}

nlohmann::json MeasurementsToJson(const std::array<TokenCohort, 5>& cohorts,
                                  const std::vector<std::vector<TokenMeasurement>>& m) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t c = 0; c < m.size(); ++c) {
    nlohmann::json tokens = nlohmann::json::array();
    for (const auto& x : m[c]) {
      tokens.push_back({{"token", x.token}, {"polarity", ToJson(x.polarity)}, {"degree", ToJson(x.degree)}});
    }
    j[RoleName(cohorts[c].role)] = tokens;
  }
  return j;
}

std::vector<std::pair<std::string, std::vector<TokenMeasurement>>> MeasurementsFromJson(const nlohmann::json& j) {
  std::vector<std::pair<std::string, std::vector<TokenMeasurement>>> out;
  for (auto role : {CohortRole::kTargetV1, CohortRole::kTargetV2, CohortRole::kTargetV3, CohortRole::kRandomBaseline,
                    CohortRole::kUntrainedBaseline}) {
    const std::string name = RoleName(role);
    if (!j.contains(name)) continue;
    std::vector<TokenMeasurement> m;
    for (const auto& t : j.at(name)) {
      const auto tok = t.at("token").get<std::string>();
      m.push_back({tok, PolarityScoreFromJson(tok, t.at("polarity")), DegreeScoreFromJson(tok, t.at("degree"))});
    }
    out.emplace_back(name, std::move(m));
  }
  return out;
}

void WriteTrainingSet(const std::filesystem::path& path, std::span<const TrainingExample> examples) {
  TsvTable t;
  t.header = {"sentence", "role", "particle", "token_index", "token", "text"};
  for (const auto& e : examples) {
    t.rows.push_back({std::to_string(e.sentence), RoleName(e.role), e.particle, std::to_string(e.token_index), e.token,
                      e.text});
  }
  WriteTsv(path, t);
}

void WriteSummaryTable(const std::filesystem::path& path, std::span<const CohortSummary> before,
                       std::span<const CohortSummary> after) {
  TsvTable t;
  t.header = {"cohort",          "degree_mean_before", "degree_std_before",  "polarity_mean_before",
              "polarity_std_before", "degree_mean_after",  "degree_std_after",   "polarity_mean_after",
              "polarity_std_after"};
  for (std::size_t i = 0; i < before.size(); ++i) {
    const auto& b = before[i];
    const auto& a = after[i];
    t.rows.push_back({b.cohort, FormatDouble(b.degree_mean), FormatDouble(b.degree_std), FormatDouble(b.polarity_mean),
                      FormatDouble(b.polarity_std), FormatDouble(a.degree_mean), FormatDouble(a.degree_std),
                      FormatDouble(a.polarity_mean), FormatDouble(a.polarity_std)});
  }
  WriteTsv(path, t);
}

}  // namespace artlang
