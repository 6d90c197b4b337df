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

// Dense building blocks shared by the BERT and GPT-2 implementations.
// Activations are row-major (sequence position x feature).

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "artlang/language_model.hpp"

namespace artlang::nn {

using RowVector = Eigen::RowVectorXf;

struct Linear {
  Matrix weight;  // out x in
  RowVector bias;

  Matrix Forward(const Matrix& x) const {
    Matrix y = x * weight.transpose();
    y.rowwise() += bias;
    return y;
  }
  // Gradient with respect to the input only.
  Matrix BackwardInput(const Matrix& dy) const { return dy * weight; }
};

struct LayerNorm {
  RowVector gamma;
  RowVector beta;
  float eps = 1e-12f;

  struct Cache {
    Matrix normalized;
    Eigen::VectorXf inv_std;
  };

  Matrix Forward(const Matrix& x, Cache* cache = nullptr) const {
    const Eigen::Index h = x.cols();
    Matrix xhat(x.rows(), h);
    Eigen::VectorXf inv(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const float mean = x.row(r).mean();
      const float var = (x.row(r).array() - mean).square().sum() / static_cast<float>(h);
      inv(r) = 1.0f / std::sqrt(var + eps);
      xhat.row(r) = (x.row(r).array() - mean) * inv(r);
    }
    Matrix y = xhat.array().rowwise() * gamma.array();
    y.rowwise() += beta;
    if (cache != nullptr) {
      cache->normalized = std::move(xhat);
      cache->inv_std = std::move(inv);
    }
    return y;
  }

  Matrix BackwardInput(const Matrix& dy, const Cache& c) const {
    const auto h = static_cast<float>(dy.cols());
    Matrix dxhat = dy.array().rowwise() * gamma.array();
    Matrix dx(dy.rows(), dy.cols());
    for (Eigen::Index r = 0; r < dy.rows(); ++r) {
      const float m1 = dxhat.row(r).sum() / h;
      const float m2 = dxhat.row(r).dot(c.normalized.row(r)) / h;
      dx.row(r) = c.inv_std(r) * (dxhat.row(r).array() - m1 - c.normalized.row(r).array() * m2);
    }
    return dx;
  }
};

inline float GeluErf(float x) { return 0.5f * x * (1.0f + std::erf(x * static_cast<float>(M_SQRT1_2))); }

inline float GeluErfGrad(float x) {
  const float cdf = 0.5f * (1.0f + std::erf(x * static_cast<float>(M_SQRT1_2)));
  const float pdf = std::exp(-0.5f * x * x) * static_cast<float>(0.5 * M_2_SQRTPI * M_SQRT1_2);
  return cdf + x * pdf;
}

inline float GeluTanh(float x) {
  constexpr float k = 0.7978845608028654f;  // sqrt(2/pi)
  return 0.5f * x * (1.0f + std::tanh(k * (x + 0.044715f * x * x * x)));
}

inline void SoftmaxRowsInPlace(Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const float mx = m.row(r).maxCoeff();
    m.row(r) = (m.row(r).array() - mx).exp();
    m.row(r) /= m.row(r).sum();
  }
}

// Inverted dropout mask: entries are 0 or 1/(1-p). An empty mask means
// identity (evaluation mode or p == 0).
inline Matrix DropoutMask(Eigen::Index rows, Eigen::Index cols, float p, std::mt19937_64* rng) {
  if (rng == nullptr || p <= 0.0f) return {};
  Matrix m(rows, cols);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  const float keep = 1.0f / (1.0f - p);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(*rng) < p ? 0.0f : keep;
  return m;
}

inline Matrix ApplyMask(const Matrix& x, const Matrix& mask) {
  if (mask.size() == 0) return x;
  return x.cwiseProduct(mask);
}

}  // namespace artlang::nn
