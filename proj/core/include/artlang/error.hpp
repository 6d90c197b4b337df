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

#include <stdexcept>
#include <string>

namespace artlang {

// Base class for every error raised by the library. The CLI maps the
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed mask query (zero or several mask placeholders).
class QueryError : public Error {
 public:
  using Error::Error;
};

// Token not present in the model vocabulary, or name collision on insertion.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

// Operation not supported by the backend (e.g. fine-tuning a table model).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments or configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage was invoked before the stage producing its inputs.
class PrerequisiteError : public Error {
 public:
  PrerequisiteError(std::string stage, const std::string& what)
      : Error(what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Missing external resource (tagger lexicon, checkpoint file, ...).
class EnvironmentError : public Error {
 public:
  using Error::Error;
};

// Input data that makes the requested computation meaningless, e.g. a probe
// task whose items all fall on one side of the threshold.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Unreadable or inconsistent model/fixture files.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace artlang
