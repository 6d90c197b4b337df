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
#include <cstdint>

#include "artlang/language_model.hpp"

namespace artlang {

// Draws `rows` new embedding rows. Coordinate c of every row is sampled from
// N(mean_c, std_c), where mean_c and std_c (population) are taken over the
// rows of `existing`. Values are drawn row by row, column by column, from a
// std::mt19937_64 seeded with `seed` feeding std::normal_distribution<double>.
Matrix SampleEmbeddingRows(const Matrix& existing, std::size_t rows, std::uint64_t seed);

}  // namespace artlang
