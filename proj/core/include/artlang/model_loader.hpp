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
#include <memory>
#include <string>

#include "artlang/language_model.hpp"

namespace artlang {

// Model specifications:
//   mock:<fixture.json>   table-driven backend
//   bert:<dir>            BERT masked LM directory
//   gpt2:<dir>            GPT-2 causal LM directory
//   <dir>                 directory; architecture read from config.json
//   <name>                looked up as $ARTLANG_MODEL_DIR/<name>, then in the
//                         Hugging Face hub cache ($HF_HOME or ~/.cache/huggingface)
// Throws EnvironmentError when nothing can be found.
std::unique_ptr<LanguageModel> LoadModel(const std::string& spec);

// Local checkpoint directory for a model name, or empty when absent.
std::filesystem::path FindCheckpoint(const std::string& name);

// Cheap identity of a model spec: the spec string plus the names, sizes and
// small-file contents of the resolved files. Used for stage cache keys.
std::string ModelFingerprint(const std::string& spec);

}  // namespace artlang
