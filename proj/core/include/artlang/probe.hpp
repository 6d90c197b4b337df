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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "artlang/degree.hpp"

namespace artlang {

enum class ProbeTaskName { kPolarity, kDegree };

struct ProbeTask {
  ProbeTaskName name = ProbeTaskName::kPolarity;
  double threshold = 0.5;

  static ProbeTask Polarity() { return {ProbeTaskName::kPolarity, 0.5}; }
  static ProbeTask Degree() { return {ProbeTaskName::kDegree, 0.4}; }
  std::string Name() const { return name == ProbeTaskName::kPolarity ? "polarity" : "degree"; }
};

struct LabeledSet {
  std::vector<std::string> tokens;
  std::vector<int> labels;  // 0 below threshold, 1 above
  std::vector<std::string> excluded;  // exactly at the threshold
};

// Labels lexicon items by the task's score: below the threshold is class 0,
// above is class 1, equal is dropped with a warning. Throws
// DegenerateInputError when only one class remains.
LabeledSet label_lexicon(const ScoredLexicon& lexicon, const ProbeTask& task);

struct L1LogisticOptions {
  // Objective: mean log-loss + lambda * |w|_1, intercept unpenalized.
  // lambda = 1 / (C n) in scikit-learn terms.
  double lambda = 0.01;
  int max_iterations = 20000;
  double tolerance = 1e-9;
};

struct L1LogisticModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  int iterations = 0;
  bool converged = false;

  double Objective(const Eigen::MatrixXd& x, std::span<const int> y, double lambda) const;
  double Accuracy(const Eigen::MatrixXd& x, std::span<const int> y) const;
};

// Accelerated proximal gradient (FISTA with adaptive restart).
L1LogisticModel FitL1Logistic(const Eigen::MatrixXd& x, std::span<const int> y,
                              const L1LogisticOptions& options = {});

// Per-class shuffled round-robin assignment; returns the fold of each item.
std::vector<int> StratifiedFolds(std::span<const int> labels, int folds, std::uint64_t seed);

struct FoldResult {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  std::vector<std::size_t> test_items;
};

struct ProbeResult {
  std::vector<FoldResult> folds;
  double mean_train_accuracy = 0.0;
  double mean_test_accuracy = 0.0;
};

// Stratified k-fold cross-validation of an L1 logistic probe. Requires at
// least `folds` items of each class.
ProbeResult fit_l1_probe(const Eigen::MatrixXd& embeddings, std::span<const int> labels, int folds = 5,
                         std::uint64_t seed = 0, const L1LogisticOptions& options = {});

struct CoordinateReport {
  std::string task;
  int min_folds = 4;
  std::vector<int> indices;  // ascending
};

// Coordinates with a non-zero coefficient in at least `min_folds` folds.
CoordinateReport important_coordinates(const ProbeResult& result, int min_folds = 4, std::string task = {});

struct OverlapReport {
  std::size_t size_a = 0;
  std::size_t size_b = 0;
  std::vector<int> intersection;
};

OverlapReport overlap_report(const CoordinateReport& a, const CoordinateReport& b);

struct SweepPoint {
  double lambda = 0.0;
  double mean_test_accuracy = 0.0;
  double mean_nonzero = 0.0;
};

// Cross-validated accuracy for each regularization strength.
std::vector<SweepPoint> sweep_l1_strength(const Eigen::MatrixXd& embeddings, std::span<const int> labels,
                                          std::span<const double> lambdas, int folds, std::uint64_t seed);

nlohmann::json ToJson(const ProbeResult& r);
nlohmann::json ToJson(const CoordinateReport& r);
nlohmann::json ToJson(const OverlapReport& r);

}  // namespace artlang
