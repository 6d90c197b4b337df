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

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace artlang {

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written artifact.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view content);
std::string ReadTextFile(const std::filesystem::path& path);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
// Pretty-printed with sorted keys and a trailing newline.
void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& value);

// Shortest decimal string that parses back to the same double.
std::string FormatDouble(double value);
double ParseDouble(std::string_view text);

// Tab-separated table with a header row. Fields may not contain tabs or
// newlines.
struct TsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws FormatError when absent.
  std::size_t Column(std::string_view name) const;
  std::string Serialize() const;
};

TsvTable ReadTsv(const std::filesystem::path& path);
void WriteTsv(const std::filesystem::path& path, const TsvTable& table);

// Non-empty lines with '#' comments and surrounding whitespace stripped.
std::vector<std::string> ReadListFile(const std::filesystem::path& path);

}  // namespace artlang
