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
// artlang: staged command line front end for the pipeline.
//
//   artlang --config cfg.json [--scale desk] [--force] <stage> [stage flags]
//
// Exit codes: 0 success, 2 configuration error, 3 missing prerequisite
// stage, 4 when the backend or its environment cannot serve the request,
// 1 anything else.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <glog/logging.h>

#include "CLI11.hpp"
#include "artlang/error.hpp"
#include "artlang/pipeline.hpp"

namespace {

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPrerequisite = 3;
constexpr int kExitBackend = 4;

// Stage-specific overrides. Unset options leave the config file value alone.
struct Overrides {
  std::optional<std::size_t> n_nouns, n_adjs, n_gradable, keep;
  std::optional<std::size_t> pairs, polarity_min_count, polarity_topk;
  std::optional<std::size_t> particle_min_count, particle_topk, particles_k;
  std::optional<std::string> keep_list;
  std::optional<std::string> probe_task;
  std::optional<std::uint64_t> probe_seed;
  std::optional<double> probe_lambda;
  std::vector<double> probe_sweep;
  std::optional<std::uint64_t> experiment_seed;
  std::optional<int> epochs, batch_size;
  std::optional<double> learning_rate;
};

template <typename T>
void Apply(const std::optional<T>& v, T& field) {
  if (v) field = *v;
}

void ApplyOverrides(const Overrides& o, artlang::PipelineConfig& c) {
  Apply(o.n_nouns, c.n_nouns);
  Apply(o.n_adjs, c.n_adjs);
  Apply(o.n_gradable, c.n_gradable);
  Apply(o.keep, c.keep);
  Apply(o.pairs, c.polarity_pairs);
  Apply(o.polarity_min_count, c.polarity_min_count);
  Apply(o.polarity_topk, c.polarity_topk);
  Apply(o.particle_min_count, c.particle_min_count);
  Apply(o.particle_topk, c.particle_topk);
  Apply(o.particles_k, c.particles_k);
  Apply(o.keep_list, c.keep_list);
  Apply(o.probe_task, c.probe_task);
  Apply(o.probe_seed, c.probe_seed);
  Apply(o.probe_lambda, c.probe_lambda);
  if (!o.probe_sweep.empty()) c.probe_sweep = o.probe_sweep;
  Apply(o.experiment_seed, c.experiment_seed);
  Apply(o.epochs, c.finetune.epochs);
  Apply(o.batch_size, c.finetune.batch_size);
  Apply(o.learning_rate, c.finetune.learning_rate);
}

void PrintArtifact(const artlang::StageArtifact& a) {
  std::cout << a.stage << ": " << (a.from_cache ? "cached" : "ran") << " (config " << a.config_hash.substr(0, 12)
            << ")\n";
  for (const auto& [path, digest] : a.outputs) std::cout << "  " << path << "  " << digest.substr(0, 12) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  FLAGS_logtostderr = true;
  google::InitGoogleLogging(argv[0]);

  CLI::App app{"Artificial language learning pipeline for masked language models"};
  app.require_subcommand(1);
  // Global flags may follow the subcommand too.
  app.fallthrough();

  std::string config_path;
  std::string scale;
  std::string artifact_dir;
  bool force = false;
  bool print_config = false;
  app.add_option("-c,--config", config_path, "JSON configuration file (defaults apply when omitted)");
  app.add_option("--scale", scale, "Run scale")->check(CLI::IsMember({"full", "desk"}));
  app.add_option("--artifact-dir", artifact_dir, "Override the artifact directory");
  app.add_flag("-f,--force", force, "Recompute even when the stage cache is valid");
  app.add_flag("--print-config", print_config, "Print the resolved configuration before running");

  Overrides o;
  auto* build = app.add_subcommand("build-corpus", "Select nouns and gradable adjectives, build base sentences");
  build->add_option("--n-nouns", o.n_nouns);
  build->add_option("--n-adjs", o.n_adjs);
  build->add_option("--n-gradable", o.n_gradable);
  build->add_option("--keep", o.keep, "Base sentences kept after perplexity filtering");

  auto* pol = app.add_subcommand("score-polarity", "Mine modifier candidates and score polarity");
  pol->add_option("--pairs", o.pairs, "Polarity pairs to use (0 = all base sentences)");
  pol->add_option("--min-count", o.polarity_min_count);
  pol->add_option("--topk", o.polarity_topk);

  auto* mine = app.add_subcommand("mine-particles", "Mine answer particles and select high/low sets");
  mine->add_option("--min-count", o.particle_min_count);
  mine->add_option("--topk", o.particle_topk);
  mine->add_option("-k,--k", o.particles_k, "Particles per selected set");

  app.add_subcommand("score-degree", "Score modifier degree from particle contexts");

  auto* curate = app.add_subcommand("curate", "Restrict the lexicon to a curated keep list");
  curate->add_option("--keep-list", o.keep_list, "One token per line; '#' starts a comment");

  auto* probe = app.add_subcommand("probe", "L1 logistic probes on modifier embeddings");
  probe->add_option("--task", o.probe_task)->check(CLI::IsMember({"polarity", "degree", "both"}));
  probe->add_option("--seed", o.probe_seed);
  probe->add_option("--lambda", o.probe_lambda);
  probe->add_option("--sweep", o.probe_sweep, "Penalty strengths for the sparsity sweep")->delimiter(',');

  auto* exp = app.add_subcommand("experiment", "Inject cohorts, fine-tune embeddings, measure");
  exp->add_option("--seed", o.experiment_seed);
  exp->add_option("--epochs", o.epochs);
  exp->add_option("--batch-size", o.batch_size);
  exp->add_option("--lr", o.learning_rate);

  app.add_subcommand("report", "Figures and summary tables from persisted artifacts");
  auto* all = app.add_subcommand("run-all", "Run every stage in order");
  // run-all accepts the union of the stage flags.
  all->add_option("--keep", o.keep);
  all->add_option("--keep-list", o.keep_list);
  all->add_option("--epochs", o.epochs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    artlang::PipelineConfig cfg;
    if (!config_path.empty()) cfg = artlang::PipelineConfig::FromFile(config_path);
    if (!scale.empty()) cfg.ApplyScale(scale);
    ApplyOverrides(o, cfg);
    if (!artifact_dir.empty()) cfg.artifact_dir = artifact_dir;
    cfg.Validate();
    if (print_config) std::cout << cfg.ToJson().dump(2) << "\n";

    artlang::Pipeline pipeline(cfg);
    const std::string stage = app.get_subcommands().front()->get_name();
    if (stage == "run-all") {
      for (const auto& a : pipeline.RunAll(force)) PrintArtifact(a);
    } else {
      PrintArtifact(pipeline.RunStage(stage, force));
    }
    return 0;
  } catch (const artlang::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const artlang::PrerequisiteError& e) {
    std::cerr << "missing prerequisite (run '" << e.stage() << "' first): " << e.what() << "\n";
    return kExitPrerequisite;
  } catch (const artlang::CapabilityError& e) {
    std::cerr << "backend capability error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const artlang::EnvironmentError& e) {
    std::cerr << "environment error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const artlang::FormatError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
}
