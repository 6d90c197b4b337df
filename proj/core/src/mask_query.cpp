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
#include "artlang/mask_query.hpp"

#include "artlang/error.hpp"

namespace artlang {

std::size_t CountMaskPlaceholders(std::string_view text) {
  std::size_t count = 0;
  for (auto pos = text.find(kMaskPlaceholder); pos != std::string_view::npos;
       pos = text.find(kMaskPlaceholder, pos + kMaskPlaceholder.size())) {
    ++count;
  }
  return count;
}

MaskQuery::MaskQuery(std::string text) : text_(std::move(text)) {
  const std::size_t n = CountMaskPlaceholders(text_);
  if (n != 1) {
    throw QueryError("mask query must contain exactly one " + std::string(kMaskPlaceholder) +
                     " placeholder, found " + std::to_string(n) + ": \"" + text_ + "\"");
  }
  mask_offset_ = text_.find(kMaskPlaceholder);
}

std::string_view MaskQuery::prefix() const {
  return std::string_view(text_).substr(0, mask_offset_);
}

std::string_view MaskQuery::suffix() const {
  return std::string_view(text_).substr(mask_offset_ + kMaskPlaceholder.size());
}

std::string MaskQuery::Fill(std::string_view filler) const {
  std::string out(prefix());
  out += filler;
  out += suffix();
  return out;
}

}  // namespace artlang
