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
#include <string>
#include <vector>

namespace artlang {

struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<float> data;  // row-major

  std::int64_t numel() const;
};

// Reads every tensor of a .safetensors file, converting F32/F16/BF16/F64 to
// float. Throws FormatError on malformed input.
std::map<std::string, Tensor> ReadSafetensors(const std::filesystem::path& path);

// Writes float32 tensors; the inverse of ReadSafetensors for F32 files.
void WriteSafetensors(const std::filesystem::path& path, const std::map<std::string, Tensor>& tensors);

}  // namespace artlang
