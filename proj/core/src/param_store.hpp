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
#include <map>
#include <string>
#include <vector>

#include "artlang/error.hpp"
#include "artlang/safetensors.hpp"
#include "transformer_ops.hpp"

namespace artlang::nn {

// Name lookup over a checkpoint's tensors. Every lookup tries the given
// prefixes and the legacy LayerNorm gamma/beta spellings.
class ParamStore {
 public:
  ParamStore(std::map<std::string, Tensor> tensors, std::vector<std::string> prefixes)
      : tensors_(std::move(tensors)), prefixes_(std::move(prefixes)) {}

  static ParamStore Open(const std::filesystem::path& dir, std::vector<std::string> prefixes) {
    const auto file = dir / "model.safetensors";
    if (!std::filesystem::exists(file)) {
      throw EnvironmentError("no model.safetensors in " + dir.string() +
                             " (convert PyTorch .bin checkpoints to safetensors first)");
    }
    return ParamStore(ReadSafetensors(file), std::move(prefixes));
  }

  bool Has(const std::string& name) const { return Find(name) != nullptr; }

  const Tensor& Get(const std::string& name) const {
    if (const Tensor* t = Find(name)) return *t;
    throw FormatError("checkpoint lacks tensor '" + name + "'");
  }

  Matrix GetMatrix(const std::string& name, bool transpose = false) const {
    const Tensor& t = Get(name);
    if (t.shape.size() != 2) throw FormatError("tensor '" + name + "' is not 2-D");
    Eigen::Map<const Matrix> m(t.data.data(), t.shape[0], t.shape[1]);
    if (transpose) return m.transpose();
    return m;
  }

  RowVector GetVector(const std::string& name) const {
    const Tensor& t = Get(name);
    if (t.shape.size() != 1) throw FormatError("tensor '" + name + "' is not 1-D");
    return Eigen::Map<const RowVector>(t.data.data(), t.shape[0]);
  }

  Linear GetLinear(const std::string& prefix, bool conv1d = false) const {
    return Linear{GetMatrix(prefix + ".weight", conv1d), GetVector(prefix + ".bias")};
  }

  LayerNorm GetLayerNorm(const std::string& prefix, float eps) const {
    return LayerNorm{GetVector(prefix + ".weight"), GetVector(prefix + ".bias"), eps};
  }

 private:
  const Tensor* Find(const std::string& name) const {
    std::vector<std::string> spellings{name};
    if (name.ends_with("LayerNorm.weight")) spellings.push_back(name.substr(0, name.size() - 6) + "gamma");
    if (name.ends_with("LayerNorm.bias")) spellings.push_back(name.substr(0, name.size() - 4) + "beta");
    for (const auto& s : spellings) {
      for (const auto& p : prefixes_) {
        if (auto it = tensors_.find(p + s); it != tensors_.end()) return &it->second;
      }
    }
    return nullptr;
  }

  std::map<std::string, Tensor> tensors_;
  std::vector<std::string> prefixes_;
};

}  // namespace artlang::nn
