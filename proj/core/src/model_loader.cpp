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
#include "artlang/model_loader.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "artlang/bert.hpp"
#include "artlang/error.hpp"
#include "artlang/gpt2.hpp"
#include "artlang/hashing.hpp"
#include "artlang/table_model.hpp"

namespace artlang {
namespace fs = std::filesystem;
namespace {

bool StartsWith(const std::string& s, std::string_view p) { return s.rfind(p, 0) == 0; }

bool IsCheckpointDir(const fs::path& p) {
  return fs::is_directory(p) && fs::exists(p / "config.json") && fs::exists(p / "model.safetensors");
}

fs::path ResolveDir(const std::string& spec) {
  if (fs::is_directory(spec)) return spec;
  fs::path found = FindCheckpoint(spec);
  if (found.empty()) {
    throw EnvironmentError("model '" + spec +
                           "' not found: set ARTLANG_MODEL_DIR to a directory containing '" + spec +
                           "/' with config.json and model.safetensors, or pass a checkpoint path");
  }
  return found;
}

}  // namespace

fs::path FindCheckpoint(const std::string& name) {
  if (const char* dir = std::getenv("ARTLANG_MODEL_DIR")) {
    const fs::path p = fs::path(dir) / name;
    if (IsCheckpointDir(p)) return p;
  }
  fs::path hub;
  if (const char* hf = std::getenv("HF_HOME")) {
    hub = fs::path(hf) / "hub";
  } else if (const char* home = std::getenv("HOME")) {
    hub = fs::path(home) / ".cache" / "huggingface" / "hub";
  }
  if (hub.empty()) return {};
  // "name" maps to "models--name", "org/name" to "models--org--name".
  std::string folder = "models--" + name;
  if (const auto slash = name.find('/'); slash != std::string::npos) {
    folder = "models--" + name.substr(0, slash) + "--" + name.substr(slash + 1);
  }
  const fs::path snaps = hub / folder / "snapshots";
  if (!fs::is_directory(snaps)) return {};
  std::vector<fs::path> candidates;
  for (const auto& e : fs::directory_iterator(snaps)) {
    if (IsCheckpointDir(e.path())) candidates.push_back(e.path());
  }
  if (candidates.empty()) return {};
  std::sort(candidates.begin(), candidates.end());
  return candidates.front();
}

std::unique_ptr<LanguageModel> LoadModel(const std::string& spec) {
  if (StartsWith(spec, "mock:")) {
    return std::make_unique<TableModel>(TableModel::FromFile(spec.substr(5)));
  }
  if (StartsWith(spec, "bert:")) return BertMaskedLM::Load(ResolveDir(spec.substr(5)));
  if (StartsWith(spec, "gpt2:")) return Gpt2Scorer::Load(ResolveDir(spec.substr(5)));
  const fs::path dir = ResolveDir(spec);
  std::ifstream in(dir / "config.json");
  const auto cfg = nlohmann::json::parse(in, nullptr, false);
  const std::string type = cfg.is_object() ? cfg.value("model_type", std::string()) : std::string();
  const std::string id = fs::is_directory(spec) ? dir.filename().string() : spec;
  if (type == "bert") return BertMaskedLM::Load(dir, id);
  if (type == "gpt2") return Gpt2Scorer::Load(dir, id);
  throw CapabilityError("unsupported model_type '" + type + "' in " + (dir / "config.json").string());
}

std::string ModelFingerprint(const std::string& spec) {
  Sha256 h;
  h.Field(spec);
  fs::path target;
  if (StartsWith(spec, "mock:")) {
    target = spec.substr(5);
  } else {
    std::string rest = spec;
    if (StartsWith(spec, "bert:") || StartsWith(spec, "gpt2:")) rest = spec.substr(5);
    target = fs::is_directory(rest) ? fs::path(rest) : FindCheckpoint(rest);
  }
  if (target.empty() || !fs::exists(target)) {
    h.Field("<missing>");
    return h.Digest();
  }
  if (fs::is_regular_file(target)) {
    h.Field(Sha256File(target));
    return h.Digest();
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(target)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const auto size = fs::file_size(f);
    h.Field(f.filename().string()).Field(std::to_string(size));
    if (size < (8u << 20)) h.Field(Sha256File(f));
  }
  return h.Digest();
}

}  // namespace artlang
