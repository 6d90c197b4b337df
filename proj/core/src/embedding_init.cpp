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
#include "artlang/embedding_init.hpp"

#include <cmath>
#include <random>

#include "artlang/error.hpp"

namespace artlang {

Matrix SampleEmbeddingRows(const Matrix& existing, std::size_t rows, std::uint64_t seed) {
  const Eigen::Index width = existing.cols();
  Matrix out(static_cast<Eigen::Index>(rows), width);
  if (rows == 0) return out;
  if (existing.rows() == 0) throw ConfigError("cannot estimate embedding statistics from 0 rows");

  const Eigen::MatrixXd base = existing.cast<double>();
  const Eigen::RowVectorXd mean = base.colwise().mean();
  const Eigen::RowVectorXd stddev =
      ((base.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(base.rows()))
          .sqrt();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < width; ++c) {
      out(r, c) = static_cast<float>(mean(c) + stddev(c) * normal(rng));
    }
  }
  return out;
}

}  // namespace artlang
