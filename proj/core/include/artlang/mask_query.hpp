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
#include <string>
#include <string_view>

namespace artlang {

inline constexpr std::string_view kMaskPlaceholder = "[MASK]";

// Text with exactly one mask placeholder. Construction validates the
// placeholder count and throws QueryError otherwise.
class MaskQuery {
 public:
  explicit MaskQuery(std::string text);

  const std::string& text() const { return text_; }
  std::size_t mask_offset() const { return mask_offset_; }
  std::string_view prefix() const;
  std::string_view suffix() const;

  // Text with the placeholder replaced by `filler`.
  std::string Fill(std::string_view filler) const;

  friend bool operator==(const MaskQuery& a, const MaskQuery& b) { return a.text_ == b.text_; }

 private:
  std::string text_;
  std::size_t mask_offset_ = 0;
};

std::size_t CountMaskPlaceholders(std::string_view text);

}  // namespace artlang
