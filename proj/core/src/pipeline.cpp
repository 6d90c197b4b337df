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
#include "artlang/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>

#include <glog/logging.h>

#include "artlang/corpus.hpp"
#include "artlang/degree.hpp"
#include "artlang/error.hpp"
#include "artlang/experiment.hpp"
#include "artlang/hashing.hpp"
#include "artlang/io.hpp"
#include "artlang/model_loader.hpp"
#include "artlang/polarity.hpp"
#include "artlang/probe.hpp"
#include "artlang/report.hpp"
#include "artlang/score_cache.hpp"

namespace artlang {
namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

json PipelineConfig::ToJson() const {
  const auto& f = finetune;
  return {
      {"masked_model", masked_model},
      {"causal_model", causal_model},
      {"tagger_lexicon", tagger_lexicon},
      {"corpus_path", corpus_path},
      {"keep_list", keep_list},
      {"curation_allow_missing", curation_allow_missing},
      {"artifact_dir", artifact_dir},
      {"cache_dir", cache_dir},
      {"scale", scale},
      {"n_nouns", n_nouns},
      {"n_adjs", n_adjs},
      {"n_gradable", n_gradable},
      {"keep", keep},
      {"gradability_seeds", gradability_seeds},
      {"polarity_pairs", polarity_pairs},
      {"polarity_topk", polarity_topk},
      {"polarity_min_count", polarity_min_count},
      {"seeds_low", seeds_low},
      {"seeds_high", seeds_high},
      {"particle_topk", particle_topk},
      {"particle_min_count", particle_min_count},
      {"particles_k", particles_k},
      {"probe_task", probe_task},
      {"probe_folds", probe_folds},
      {"probe_seed", probe_seed},
      {"probe_lambda", probe_lambda},
      {"probe_min_folds", probe_min_folds},
      {"probe_sweep", probe_sweep},
      {"particles_per_group", particles_per_group},
      {"cohort_size", cohort_size},
      {"experiment_seed", experiment_seed},
      {"finetune",
       {{"learning_rate", f.learning_rate},
        {"batch_size", f.batch_size},
        {"epochs", f.epochs},
        {"decoupled_weight_decay", f.decoupled_weight_decay},
        {"weight_decay", f.weight_decay},
        {"trainable_scope", "embedding_layer_only"},
        {"mask_fraction", f.mask_fraction},
        {"validation_fraction", f.validation_fraction},
        {"seed", f.seed},
        {"linear_schedule", f.linear_schedule},
        {"dropout", f.dropout},
        {"adam_beta1", f.adam_beta1},
        {"adam_beta2", f.adam_beta2},
        {"adam_epsilon", f.adam_epsilon}}},
  };
}

namespace {

template <typename T>
void Take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void RejectUnknown(const json& j, const json& reference, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!reference.contains(it.key())) throw ConfigError("unknown config key '" + where + it.key() + "'");
  }
}

}  // namespace

PipelineConfig PipelineConfig::FromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig c;
  const json ref = c.ToJson();
  RejectUnknown(j, ref, "");
  Take(j, "masked_model", c.masked_model);
  Take(j, "causal_model", c.causal_model);
  Take(j, "tagger_lexicon", c.tagger_lexicon);
  Take(j, "corpus_path", c.corpus_path);
  Take(j, "keep_list", c.keep_list);
  Take(j, "curation_allow_missing", c.curation_allow_missing);
  Take(j, "artifact_dir", c.artifact_dir);
  Take(j, "cache_dir", c.cache_dir);
  Take(j, "scale", c.scale);
  Take(j, "n_nouns", c.n_nouns);
  Take(j, "n_adjs", c.n_adjs);
  Take(j, "n_gradable", c.n_gradable);
  Take(j, "keep", c.keep);
  Take(j, "gradability_seeds", c.gradability_seeds);
  Take(j, "polarity_pairs", c.polarity_pairs);
  Take(j, "polarity_topk", c.polarity_topk);
  Take(j, "polarity_min_count", c.polarity_min_count);
  Take(j, "seeds_low", c.seeds_low);
  Take(j, "seeds_high", c.seeds_high);
  Take(j, "particle_topk", c.particle_topk);
  Take(j, "particle_min_count", c.particle_min_count);
  Take(j, "particles_k", c.particles_k);
  Take(j, "probe_task", c.probe_task);
  Take(j, "probe_folds", c.probe_folds);
  Take(j, "probe_seed", c.probe_seed);
  Take(j, "probe_lambda", c.probe_lambda);
  Take(j, "probe_min_folds", c.probe_min_folds);
  Take(j, "probe_sweep", c.probe_sweep);
  Take(j, "particles_per_group", c.particles_per_group);
  Take(j, "cohort_size", c.cohort_size);
  Take(j, "experiment_seed", c.experiment_seed);
  if (j.contains("finetune")) {
    const json& f = j.at("finetune");
    if (!f.is_object()) throw ConfigError("config key 'finetune' must be an object");
    RejectUnknown(f, ref.at("finetune"), "finetune.");
    auto& t = c.finetune;
    Take(f, "learning_rate", t.learning_rate);
    Take(f, "batch_size", t.batch_size);
    Take(f, "epochs", t.epochs);
    Take(f, "decoupled_weight_decay", t.decoupled_weight_decay);
    Take(f, "weight_decay", t.weight_decay);
    Take(f, "mask_fraction", t.mask_fraction);
    Take(f, "validation_fraction", t.validation_fraction);
    Take(f, "seed", t.seed);
    Take(f, "linear_schedule", t.linear_schedule);
    Take(f, "dropout", t.dropout);
    Take(f, "adam_beta1", t.adam_beta1);
    Take(f, "adam_beta2", t.adam_beta2);
    Take(f, "adam_epsilon", t.adam_epsilon);
    if (f.contains("trainable_scope") && f.at("trainable_scope") != "embedding_layer_only") {
      throw ConfigError("finetune.trainable_scope must be 'embedding_layer_only'");
    }
  }
  c.Validate();
  return c;
}

PipelineConfig PipelineConfig::FromFile(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  try {
    return FromJson(json::parse(ReadTextFile(path)));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void PipelineConfig::ApplyScale(const std::string& s) {
  if (s == "full") {
    scale = s;
    return;
  }
  if (s != "desk") throw ConfigError("unknown scale '" + s + "' (expected full or desk)");
  scale = s;
  n_nouns = std::min<std::size_t>(n_nouns, 100);
  n_gradable = std::min<std::size_t>(n_gradable, 20);
  keep = std::min<std::size_t>(keep, 500);
  finetune.epochs = std::min(finetune.epochs, 1);
}

void PipelineConfig::Validate() const {
  if (scale != "full" && scale != "desk") throw ConfigError("scale must be 'full' or 'desk'");
  if (probe_task != "polarity" && probe_task != "degree" && probe_task != "both") {
    throw ConfigError("probe_task must be polarity, degree or both");
  }
  if (probe_folds < 2) throw ConfigError("probe_folds must be >= 2");
  if (probe_min_folds < 1 || probe_min_folds > probe_folds) {
    throw ConfigError("probe_min_folds must lie in [1, probe_folds]");
  }
  if (probe_lambda < 0.0) throw ConfigError("probe_lambda must be >= 0");
  if (polarity_topk == 0 || particle_topk == 0) throw ConfigError("top-k values must be >= 1");
  if (seeds_low.empty() || seeds_high.empty()) throw ConfigError("seed modifier lists must be non-empty");
  if (cohort_size == 0) throw ConfigError("cohort_size must be >= 1");
  if (keep == 0) throw ConfigError("keep must be >= 1");
  finetune.Validate();
}

fs::path PipelineConfig::ResolvedCacheDir() const {
  if (const char* env = std::getenv("ARTLANG_CACHE_DIR"); env && *env) return env;
  return cache_dir;
}

// ---------------------------------------------------------------------------
// Stage bookkeeping

const std::vector<std::string>& StageNames() {
  static const std::vector<std::string> names{"build-corpus", "score-polarity", "mine-particles", "score-degree",
                                              "curate",       "probe",          "experiment",     "report"};
  return names;
}

json StageArtifact::ToJson() const {
  return {{"stage", stage}, {"config_hash", config_hash}, {"inputs", inputs}, {"outputs", outputs},
          {"timestamp", timestamp}};
}

namespace {

const std::map<std::string, std::string>& Producers() {
  static const std::map<std::string, std::string> m{
      {"base_sentences.tsv", "build-corpus"},   {"gradable_adjectives.tsv", "build-corpus"},
      {"polarity_pairs.tsv", "score-polarity"}, {"polarity_scores.json", "score-polarity"},
      {"particles.json", "mine-particles"},     {"degree_scores.json", "score-degree"},
      {"lexicon.json", "curate"},               {"probe_report.json", "probe"},
      {"cohorts.json", "experiment"},           {"training_set.tsv", "experiment"},
      {"measurements_before.json", "experiment"}, {"measurements_after.json", "experiment"},
      {"summary_table.tsv", "experiment"},
  };
  return m;
}

std::string NowUtc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string HashIfExists(const fs::path& p) { return fs::exists(p) ? Sha256File(p) : "<missing>"; }

Eigen::MatrixXd ToDouble(const Matrix& m) { return m.cast<double>(); }

}  // namespace

struct Pipeline::Impl {
  const PipelineConfig& cfg;
  ModelFactory factory;
  std::unique_ptr<ScoreCache> cache;
  std::unique_ptr<LanguageModel> masked_raw, causal_raw;
  std::unique_ptr<CachedModel> masked, causal;
  const Pipeline* owner;

  Impl(const PipelineConfig& c, ModelFactory f, const Pipeline* o) : cfg(c), factory(std::move(f)), owner(o) {
    if (!factory) factory = [](const std::string& spec) { return LoadModel(spec); };
  }

  ScoreCache& Cache() {
    if (!cache) cache = std::make_unique<ScoreCache>(cfg.ResolvedCacheDir() / "scores.sqlite");
    return *cache;
  }

  LanguageModel& Masked() {
    if (!masked) {
      masked_raw = factory(cfg.masked_model);
      if (!masked_raw->capabilities().masked_scoring) {
        throw CapabilityError("masked_model '" + cfg.masked_model + "' does not support masked scoring");
      }
      masked = std::make_unique<CachedModel>(masked_raw.get(), &Cache());
    }
    return *masked;
  }

  LanguageModel& Causal() {
    if (!causal) {
      causal_raw = factory(cfg.causal_model);
      if (!causal_raw->capabilities().causal_scoring) {
        throw CapabilityError("causal_model '" + cfg.causal_model + "' does not support causal scoring");
      }
      causal = std::make_unique<CachedModel>(causal_raw.get(), &Cache());
    }
    return *causal;
  }

  fs::path A(const std::string& f) const { return owner->ArtifactPath(f); }

  std::vector<TemplateSentence> Base() const { return ReadBaseSentences(A("base_sentences.tsv")); }

  std::vector<SeedPair> SeedPairs() const {
    std::vector<SeedPair> out;
    for (const auto& h : cfg.seeds_high) {
      for (const auto& l : cfg.seeds_low) out.emplace_back(h, l);
    }
    return out;
  }

  void Run(const std::string& stage) {
    if (stage == "build-corpus") return BuildCorpus();
    if (stage == "score-polarity") return ScorePolarity();
    if (stage == "mine-particles") return MineParticles();
    if (stage == "score-degree") return ScoreDegree();
    if (stage == "curate") return Curate();
    if (stage == "probe") return Probe();
    if (stage == "experiment") return Experiment();
    if (stage == "report") return Report();
    throw ConfigError("unknown stage '" + stage + "'");
  }

  void BuildCorpus() {
    auto& mm = Masked();
    const auto tagger = LexiconTagger::FromFile(cfg.tagger_lexicon);
    const auto tagged = tag_vocabulary(mm, tagger);
    const auto sets = select_pos_sets(tagged, cfg.n_nouns, cfg.n_adjs);
    if (sets.nouns.empty() || sets.adjectives.empty()) {
      throw DegenerateInputError("tagger lexicon yields no nouns or no adjectives for the model vocabulary");
    }
    std::ifstream corpus(cfg.corpus_path);
    if (!corpus) throw EnvironmentError("gradability corpus not found: " + cfg.corpus_path);
    GradabilityCounter counter(sets.adjectives, cfg.gradability_seeds);
    counter.AddStream(corpus);
    const auto gradable = rank_gradable(sets.adjectives, counter, cfg.n_gradable);
    std::vector<std::string> adjs;
    for (const auto& g : gradable) adjs.push_back(g.adjective);
    const auto sentences = generate_base_sentences(sets.nouns, adjs);
    LOG(INFO) << "scoring " << sentences.size() << " template sentences for perplexity";
    const auto kept = filter_by_perplexity(sentences, Causal(), cfg.keep);
    WriteGradable(A("gradable_adjectives.tsv"), gradable);
    WriteBaseSentences(A("base_sentences.tsv"), kept);
  }

  void ScorePolarity() {
    auto& mm = Masked();
    auto base = Base();
    if (cfg.polarity_pairs > 0 && cfg.polarity_pairs < base.size()) base.resize(cfg.polarity_pairs);
    const auto pairs = make_polarity_pairs(base);
    const auto cands = mine_modifier_candidates(pairs, mm, cfg.polarity_topk, cfg.polarity_min_count);
    std::vector<std::string> tokens;
    for (const auto& c : cands) tokens.push_back(c.token);
    LOG(INFO) << cands.size() << " modifier candidates; scoring polarity over " << pairs.size() << " pairs";
    const auto scores = score_lexicon(tokens, pairs, mm);
    json cj = json::object();
    for (std::size_t i = 0; i < cands.size(); ++i) {
      json e = ToJson(scores[i]);
      e["positive_count"] = cands[i].positive_count;
      e["negative_count"] = cands[i].negative_count;
      cj[cands[i].token] = e;
    }
    WritePolarityPairs(A("polarity_pairs.tsv"), pairs);
    WriteJsonFile(A("polarity_scores.json"), {{"pairs", pairs.size()},
                                              {"topk", cfg.polarity_topk},
                                              {"min_count", cfg.polarity_min_count},
                                              {"candidates", cj}});
  }

  void MineParticles() {
    auto& mm = Masked();
    const auto base = Base();
    const auto cands =
        mine_particles(base, cfg.seeds_low, cfg.seeds_high, mm, cfg.particle_topk, cfg.particle_min_count);
    std::vector<std::string> tokens;
    json cj = json::object();
    for (const auto& c : cands) {
      tokens.push_back(c.token);
      cj[c.token] = c.count;
    }
    LOG(INFO) << cands.size() << " particle candidates";
    const auto seed_pairs = SeedPairs();
    const auto scores = score_particles(tokens, base, seed_pairs, mm);
    const auto inv = select_top_particles(scores, cfg.particles_k);
    json j = inv.ToJson();
    j["candidates"] = cj;
    j["seed_pairs"] = seed_pairs;
    WriteJsonFile(A("particles.json"), j);
  }

  void ScoreDegree() {
    auto& mm = Masked();
    const auto base = Base();
    const auto inv = ParticleInventory::FromJson(ReadJsonFile(A("particles.json")));
    const auto pol = ReadJsonFile(A("polarity_scores.json")).at("candidates");
    std::vector<std::string> tokens;
    for (auto it = pol.begin(); it != pol.end(); ++it) tokens.push_back(it.key());
    const auto scores = score_modifier_degrees(tokens, base, inv, mm);
    json j = json::object();
    for (const auto& s : scores) j[s.token] = ToJson(s);
    WriteJsonFile(A("degree_scores.json"), {{"high", inv.high}, {"low", inv.low}, {"scores", j}});
  }

  void Curate() {
    const auto pol = ReadJsonFile(A("polarity_scores.json")).at("candidates");
    const auto deg = ReadJsonFile(A("degree_scores.json")).at("scores");
    std::vector<PolarityScore> ps;
    std::vector<DegreeScore> ds;
    for (auto it = pol.begin(); it != pol.end(); ++it) ps.push_back(PolarityScoreFromJson(it.key(), it.value()));
    for (auto it = deg.begin(); it != deg.end(); ++it) ds.push_back(DegreeScoreFromJson(it.key(), it.value()));
    if (!fs::exists(cfg.keep_list)) throw EnvironmentError("keep list not found: " + cfg.keep_list);
    const auto keep = ReadListFile(cfg.keep_list);
    const auto lex = apply_curation(MergeScores(ps, ds), keep, cfg.curation_allow_missing);
    LOG(INFO) << "curated lexicon: " << lex.entries.size() << " of " << ps.size() << " candidates";
    WriteJsonFile(A("lexicon.json"), lex.ToJson());
  }

  void Probe() {
    auto& mm = Masked();
    const auto lex = ScoredLexicon::FromJson(ReadJsonFile(A("lexicon.json")));
    L1LogisticOptions opt;
    opt.lambda = cfg.probe_lambda;
    json out = {{"lambda", cfg.probe_lambda}, {"folds", cfg.probe_folds}, {"seed", cfg.probe_seed},
                {"min_folds", cfg.probe_min_folds}, {"tasks", json::object()}};
    std::vector<CoordinateReport> reports;
    std::vector<ProbeTask> tasks;
    if (cfg.probe_task != "degree") tasks.push_back(ProbeTask::Polarity());
    if (cfg.probe_task != "polarity") tasks.push_back(ProbeTask::Degree());
    for (const auto& task : tasks) {
      const auto labeled = label_lexicon(lex, task);
      const Eigen::MatrixXd x = ToDouble(mm.read_embeddings(labeled.tokens));
      const auto result = fit_l1_probe(x, labeled.labels, cfg.probe_folds, cfg.probe_seed, opt);
      const auto coords = important_coordinates(result, cfg.probe_min_folds, task.Name());
      json t = {{"threshold", task.threshold},
                {"items", labeled.tokens.size()},
                {"positive", std::count(labeled.labels.begin(), labeled.labels.end(), 1)},
                {"excluded", labeled.excluded},
                {"tokens", labeled.tokens},
                {"labels", labeled.labels},
                {"result", ToJson(result)},
                {"coordinates", ToJson(coords)}};
      if (!cfg.probe_sweep.empty()) {
        json sweep = json::array();
        for (const auto& p : sweep_l1_strength(x, labeled.labels, cfg.probe_sweep, cfg.probe_folds, cfg.probe_seed)) {
          sweep.push_back({{"lambda", p.lambda}, {"mean_test_accuracy", p.mean_test_accuracy},
                           {"mean_nonzero", p.mean_nonzero}});
        }
        t["sweep"] = sweep;
      }
      LOG(INFO) << task.Name() << " probe: train " << result.mean_train_accuracy << ", test "
                << result.mean_test_accuracy << ", " << coords.indices.size() << " stable coordinates";
      out["tasks"][task.Name()] = t;
      reports.push_back(coords);
    }
    if (reports.size() == 2) out["overlap"] = ToJson(overlap_report(reports[0], reports[1]));
    WriteJsonFile(A("probe_report.json"), out);
  }

  void Experiment() {
    const auto base = Base();
    const auto lex = ScoredLexicon::FromJson(ReadJsonFile(A("lexicon.json")));
    const auto inv = ParticleInventory::FromJson(ReadJsonFile(A("particles.json")));
    std::vector<std::string> candidates;
    for (const auto& s : inv.scores) candidates.push_back(s.token);
    // The experiment mutates the model, so it runs on a private instance.
    auto fresh = factory(cfg.masked_model);
    CachedModel model(fresh.get(), &Cache());
    ExperimentConfig ecfg;
    ecfg.particles_per_group = cfg.particles_per_group;
    ecfg.cohort_size = cfg.cohort_size;
    ecfg.seed = cfg.experiment_seed;
    ecfg.finetune = cfg.finetune;
    const auto r = run_experiment(lex, candidates, inv, base, model, ecfg);
    WriteJsonFile(A("cohorts.json"), CohortsToJson(r));
    WriteTrainingSet(A("training_set.tsv"), r.training_set);
    WriteJsonFile(A("measurements_before.json"), MeasurementsToJson(r.cohorts, r.before));
    WriteJsonFile(A("measurements_after.json"), MeasurementsToJson(r.cohorts, r.after));
    WriteSummaryTable(A("summary_table.tsv"), r.summary_before, r.summary_after);
  }

  void Report() {
    const auto lex = ScoredLexicon::FromJson(ReadJsonFile(A("lexicon.json")));
    json report = {{"figures", json::array()}, {"gaps", json::array()}};

    // Lexicon scatter with group colours and the fitted parabola.
    std::vector<double> xs, ys;
    TsvTable points;
    points.header = {"token", "degree", "polarity", "group"};
    std::map<std::string, std::string> group_of;
    try {
      for (const auto& g : partition_modifiers(lex)) {
        for (const auto& m : g.members) group_of[m] = g.label;
      }
    } catch (const DegenerateInputError& e) {
      report["gaps"].push_back(std::string("degree groups: ") + e.what());
    }
    ScatterPanel fig1{"Degree and polarity of curated modifiers", {}, std::nullopt};
    const std::vector<std::string> labels{"v1", "v2", "v3", ""};
    for (std::size_t g = 0; g < labels.size(); ++g) {
      ScatterSeries s{labels[g].empty() ? "ungrouped" : labels[g], kCohortColors[g], {}, {}};
      for (const auto& e : lex.entries) {
        if (!e.degree || !e.polarity) continue;
        const auto it = group_of.find(e.token);
        if ((it == group_of.end() ? std::string() : it->second) != labels[g]) continue;
        s.x.push_back(e.degree->score);
        s.y.push_back(e.polarity->score);
      }
      if (!s.x.empty()) fig1.series.push_back(std::move(s));
    }
    for (const auto& e : lex.entries) {
      if (!e.degree || !e.polarity) continue;
      xs.push_back(e.degree->score);
      ys.push_back(e.polarity->score);
      const auto it = group_of.find(e.token);
      points.rows.push_back({e.token, FormatDouble(e.degree->score), FormatDouble(e.polarity->score),
                             it == group_of.end() ? "" : it->second});
    }
    fig1.curve = FitQuadratic(xs, ys);
    json fit = json::object();
    if (fig1.curve) {
      fit = {{"a", fig1.curve->a}, {"b", fig1.curve->b}, {"c", fig1.curve->c}, {"points", xs.size()},
             {"model", "polarity = a*degree^2 + b*degree + c"}};
    } else {
      fit = {{"skipped", "fewer than 3 points or degenerate degrees"}, {"points", xs.size()}};
      report["gaps"].push_back("quadratic fit skipped: fewer than 3 distinct points");
    }
    WriteTsv(A("fig1_lexicon.tsv"), points);
    WriteJsonFile(A("fig1_quadratic_fit.json"), fit);
    const std::vector<ScatterPanel> p1{fig1};
    WriteFileAtomic(A("fig1_lexicon.svg"), RenderScatterSvg(p1));
    report["figures"].push_back("fig1_lexicon.svg");

    const bool have_before = fs::exists(A("measurements_before.json"));
    const bool have_after = fs::exists(A("measurements_after.json"));
    if (!have_before || !have_after) {
      report["gaps"].push_back("cohort figures and summary skipped: measurements missing (run 'experiment')");
    } else {
      const auto before = MeasurementsFromJson(ReadJsonFile(A("measurements_before.json")));
      const auto after = MeasurementsFromJson(ReadJsonFile(A("measurements_after.json")));
      TsvTable cohort_points;
      cohort_points.header = {"cohort", "token", "phase", "degree", "polarity"};
      auto panel = [&](const std::string& title, const auto& data, const std::set<std::string>& which,
                       const std::string& phase) {
        ScatterPanel p{title, {}, std::nullopt};
        std::size_t color = 0;
        for (const auto& [name, ms] : data) {
          const std::size_t c = color++;
          if (!which.count(name)) continue;
          ScatterSeries s{name, kCohortColors[c % kCohortColors.size()], {}, {}};
          for (const auto& m : ms) {
            s.x.push_back(m.degree.score);
            s.y.push_back(m.polarity.score);
            cohort_points.rows.push_back(
                {name, m.token, phase, FormatDouble(m.degree.score), FormatDouble(m.polarity.score)});
          }
          p.series.push_back(std::move(s));
        }
        return p;
      };
      const std::set<std::string> targets{"v1", "v2", "v3"}, baselines{"random", "untrained"};
      const std::vector<ScatterPanel> fig2{panel("Target tokens before training", before, targets, "before"),
                                           panel("Target tokens after training", after, targets, "after")};
      const std::vector<ScatterPanel> fig3{panel("Baselines before training", before, baselines, "before"),
                                           panel("Baselines after training", after, baselines, "after")};
      WriteFileAtomic(A("fig2_targets.svg"), RenderScatterSvg(fig2));
      WriteFileAtomic(A("fig3_baselines.svg"), RenderScatterSvg(fig3));
      WriteTsv(A("fig2_fig3_points.tsv"), cohort_points);
      report["figures"].push_back("fig2_targets.svg");
      report["figures"].push_back("fig3_baselines.svg");

      std::vector<CohortSummary> sb, sa;
      for (std::size_t i = 0; i < before.size() && i < after.size(); ++i) {
        sb.push_back(Summarize(before[i].first, before[i].second));
        sa.push_back(Summarize(after[i].first, after[i].second));
      }
      WriteSummaryTable(A("report_summary_table.tsv"), sb, sa);
      report["summary_table"] = "report_summary_table.tsv";
    }
    WriteJsonFile(A("report.json"), report);
  }
};

Pipeline::Pipeline(PipelineConfig cfg, ModelFactory factory)
    : cfg_(std::move(cfg)), impl_(std::make_unique<Impl>(cfg_, std::move(factory), this)) {
  cfg_.Validate();
}

Pipeline::~Pipeline() = default;

fs::path Pipeline::ArtifactPath(const std::string& file) const { return fs::path(cfg_.artifact_dir) / file; }

fs::path Pipeline::ManifestPath(const std::string& stage) const {
  return fs::path(cfg_.artifact_dir) / "manifests" / (stage + ".json");
}

namespace {

struct StageSpec {
  std::vector<std::string> inputs;           // required upstream artifacts
  std::vector<std::string> optional_inputs;  // upstream artifacts used when present
  std::vector<std::string> outputs;          // always produced
  std::vector<std::string> external;         // config-provided files
  json config;                               // parameters that influence the outputs
};

StageSpec Spec(const std::string& name, const PipelineConfig& c) {
  const json all = c.ToJson();
  auto pick = [&all](std::initializer_list<const char*> keys) {
    json j = json::object();
    for (const char* k : keys) j[k] = all.at(k);
    return j;
  };
  const std::string masked_fp = ModelFingerprint(c.masked_model);
  if (name == "build-corpus") {
    json j = pick({"n_nouns", "n_adjs", "n_gradable", "keep", "gradability_seeds"});
    j["masked"] = masked_fp;
    j["causal"] = ModelFingerprint(c.causal_model);
    return {{}, {}, {"base_sentences.tsv", "gradable_adjectives.tsv"}, {c.tagger_lexicon, c.corpus_path}, j};
  }
  if (name == "score-polarity") {
    json j = pick({"polarity_pairs", "polarity_topk", "polarity_min_count"});
    j["masked"] = masked_fp;
    return {{"base_sentences.tsv"}, {}, {"polarity_pairs.tsv", "polarity_scores.json"}, {}, j};
  }
  if (name == "mine-particles") {
    json j = pick({"seeds_low", "seeds_high", "particle_topk", "particle_min_count", "particles_k"});
    j["masked"] = masked_fp;
    return {{"base_sentences.tsv"}, {}, {"particles.json"}, {}, j};
  }
  if (name == "score-degree") {
    json j = json::object();
    j["masked"] = masked_fp;
    return {{"base_sentences.tsv", "particles.json", "polarity_scores.json"}, {}, {"degree_scores.json"}, {}, j};
  }
  if (name == "curate") {
    return {{"polarity_scores.json", "degree_scores.json"}, {}, {"lexicon.json"}, {c.keep_list},
            pick({"curation_allow_missing"})};
  }
  if (name == "probe") {
    json j = pick({"probe_task", "probe_folds", "probe_seed", "probe_lambda", "probe_min_folds", "probe_sweep"});
    j["masked"] = masked_fp;
    return {{"lexicon.json"}, {}, {"probe_report.json"}, {}, j};
  }
  if (name == "experiment") {
    json j = pick({"particles_per_group", "cohort_size", "experiment_seed", "finetune"});
    j["masked"] = masked_fp;
    return {{"base_sentences.tsv", "lexicon.json", "particles.json"},
            {},
            {"cohorts.json", "training_set.tsv", "measurements_before.json", "measurements_after.json",
             "summary_table.tsv"},
            {},
            j};
  }
  if (name == "report") {
    return {{"lexicon.json"},
            {"measurements_before.json", "measurements_after.json"},
            {"fig1_lexicon.svg", "fig1_lexicon.tsv", "fig1_quadratic_fit.json", "report.json"},
            {},
            json::object()};
  }
  throw ConfigError("unknown stage '" + name + "'");
}

// Files a report run may produce in addition to its fixed outputs.
const std::vector<std::string>& ReportExtras() {
  static const std::vector<std::string> v{"fig2_targets.svg", "fig3_baselines.svg", "fig2_fig3_points.tsv",
                                          "report_summary_table.tsv"};
  return v;
}

}  // namespace

StageArtifact Pipeline::RunStage(const std::string& name, bool force) {
  const StageSpec spec = Spec(name, cfg_);
  for (const auto& in : spec.inputs) {
    if (!fs::exists(ArtifactPath(in))) {
      const std::string producer = Producers().at(in);
      throw PrerequisiteError(producer, "stage '" + name + "' needs " + in + "; run '" + producer + "' first");
    }
  }
  StageArtifact art;
  art.stage = name;
  art.config_hash = Sha256Hex(spec.config.dump());
  for (const auto& in : spec.inputs) art.inputs[in] = Sha256File(ArtifactPath(in));
  for (const auto& in : spec.optional_inputs) art.inputs[in] = HashIfExists(ArtifactPath(in));
  for (const auto& ext : spec.external) art.inputs[ext] = HashIfExists(ext);

  const fs::path manifest = ManifestPath(name);
  if (!force && fs::exists(manifest)) {
    try {
      const json m = ReadJsonFile(manifest);
      bool valid = m.at("config_hash") == art.config_hash &&
                   m.at("inputs").get<std::map<std::string, std::string>>() == art.inputs;
      const auto outs = m.at("outputs").get<std::map<std::string, std::string>>();
      for (const auto& [file, hash] : outs) {
        valid = valid && fs::exists(ArtifactPath(file)) && Sha256File(ArtifactPath(file)) == hash;
      }
      if (valid) {
        art.outputs = outs;
        art.timestamp = m.at("timestamp").get<std::string>();
        art.from_cache = true;
        LOG(INFO) << "stage " << name << ": up to date, served from cache";
        return art;
      }
    } catch (const std::exception& e) {
      LOG(WARNING) << "ignoring unreadable manifest " << manifest << ": " << e.what();
    }
  }

  LOG(INFO) << "stage " << name << ": running";
  if (name == "report") {
    for (const auto& f : ReportExtras()) fs::remove(ArtifactPath(f));
  }
  fs::create_directories(cfg_.artifact_dir);
  impl_->Run(name);
  for (const auto& out : spec.outputs) art.outputs[out] = Sha256File(ArtifactPath(out));
  if (name == "report") {
    for (const auto& f : ReportExtras()) {
      if (fs::exists(ArtifactPath(f))) art.outputs[f] = Sha256File(ArtifactPath(f));
    }
  }
  art.timestamp = NowUtc();
  WriteJsonFile(manifest, art.ToJson());
  if (impl_->cache) {
    LOG(INFO) << "score cache: " << impl_->cache->hits() << " hits, " << impl_->cache->misses() << " misses";
  }
  return art;
}

std::vector<StageArtifact> Pipeline::RunAll(bool force) {
  std::vector<StageArtifact> out;
  for (const auto& s : StageNames()) out.push_back(RunStage(s, force));
  return out;
}

}  // namespace artlang
