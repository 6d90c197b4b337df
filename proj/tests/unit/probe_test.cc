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
#include <cmath>
#include <random>
#include <set>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "artlang/error.hpp"
#include "artlang/probe.hpp"
#include "support/oracles.hpp"
#include "support/test_support.hpp"

namespace artlang {
namespace {

using ::testing::ElementsAre;
using nlohmann::json;

struct Reference {
  Eigen::MatrixXd x;
  std::vector<int> y;
  json cases;
};

Reference LoadReference() {
  const json j = testing::LoadJson(testing::FixtureDir() / "l1_reference.json");
  Reference r;
  const auto rows = j.at("X").get<std::vector<std::vector<double>>>();
  r.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      r.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  r.y = j.at("y").get<std::vector<int>>();
  r.cases = j.at("cases");
  return r;
}

// Gradient of the mean log-loss with respect to the weights.
Eigen::VectorXd LossGradient(const Eigen::MatrixXd& x, const std::vector<int>& y, const L1LogisticModel& m) {
  Eigen::VectorXd r(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double z = x.row(i).dot(m.weights) + m.intercept;
    r(i) = 1.0 / (1.0 + std::exp(-z)) - y[static_cast<std::size_t>(i)];
  }
  return x.transpose() * r / static_cast<double>(x.rows());
}

TEST(L1LogisticTest, MatchesIndependentSolver) {
  const auto ref = LoadReference();
  for (const auto& c : ref.cases) {
    L1LogisticOptions opt;
    opt.lambda = c.at("lambda").get<double>();
    const auto m = FitL1Logistic(ref.x, ref.y, opt);
    EXPECT_TRUE(m.converged) << opt.lambda;
    const double want = c.at("objective").get<double>();
    const double got = m.Objective(ref.x, ref.y, opt.lambda);
    EXPECT_NEAR(got, want, 1e-6 * std::abs(want)) << opt.lambda;
    const auto coef = c.at("coef").get<std::vector<double>>();
    for (std::size_t k = 0; k < coef.size(); ++k) {
      EXPECT_NEAR(m.weights(static_cast<Eigen::Index>(k)), coef[k], 2e-3) << opt.lambda << " coef " << k;
      EXPECT_EQ(m.weights(static_cast<Eigen::Index>(k)) == 0.0, std::abs(coef[k]) < 1e-8)
          << opt.lambda << " support " << k;
    }
    EXPECT_NEAR(m.intercept, c.at("intercept").get<double>(), 2e-3);
  }
}

TEST(L1LogisticTest, SatisfiesOptimalityConditions) {
  const auto ref = LoadReference();
  for (double lambda : {0.005, 0.03, 0.1}) {
    L1LogisticOptions opt;
    opt.lambda = lambda;
    const auto m = FitL1Logistic(ref.x, ref.y, opt);
    const Eigen::VectorXd g = LossGradient(ref.x, ref.y, m);
    for (Eigen::Index k = 0; k < g.size(); ++k) {
      if (m.weights(k) == 0.0) {
        EXPECT_LE(std::abs(g(k)), lambda + 1e-6) << lambda << " " << k;
      } else {
        EXPECT_NEAR(g(k), -lambda * (m.weights(k) > 0 ? 1.0 : -1.0), 1e-6) << lambda << " " << k;
      }
    }
  }
}

TEST(L1LogisticTest, LargePenaltyZeroesEveryWeight) {
  const auto ref = LoadReference();
  L1LogisticOptions opt;
  opt.lambda = 10.0;
  EXPECT_EQ(FitL1Logistic(ref.x, ref.y, opt).weights.count(), 0);
}

TEST(LabelTest, ThresholdRuleAndExclusions) {
  ScoredLexicon lex;
  lex.entries.push_back({"a", PolarityScore{"a", 0.5, 1, 2}, DegreeScore{"a", 0.2, 1, 5}});
  lex.entries.push_back({"b", PolarityScore{"b", 1.0, 2, 2}, DegreeScore{"b", 0.7, 7, 10}});
  lex.entries.push_back({"c", PolarityScore{"c", 0.0, 0, 2}, DegreeScore{"c", 0.4, 2, 5}});
  const auto deg = label_lexicon(lex, ProbeTask::Degree());
  EXPECT_THAT(deg.tokens, ElementsAre("a", "b"));
  EXPECT_THAT(deg.labels, ElementsAre(0, 1));
  EXPECT_THAT(deg.excluded, ElementsAre("c"));
  const auto pol = label_lexicon(lex, ProbeTask::Polarity());
  EXPECT_THAT(pol.tokens, ElementsAre("b", "c"));
  EXPECT_THAT(pol.labels, ElementsAre(1, 0));
  ScoredLexicon one;
  one.entries.push_back(lex.entries[1]);
  EXPECT_THROW(label_lexicon(one, ProbeTask::Degree()), DegenerateInputError);
}

TEST(FoldTest, StratifiedAndDeterministic) {
  std::vector<int> labels;
  for (int i = 0; i < 23; ++i) labels.push_back(i % 3 == 0 ? 1 : 0);
  const auto a = StratifiedFolds(labels, 5, 9);
  EXPECT_EQ(a, StratifiedFolds(labels, 5, 9));
  EXPECT_NE(a, StratifiedFolds(labels, 5, 10));
  for (int cls : {0, 1}) {
    std::vector<int> per(5, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) per[static_cast<std::size_t>(a[i])]++;
    }
    EXPECT_LE(*std::max_element(per.begin(), per.end()) - *std::min_element(per.begin(), per.end()), 1);
  }
}

TEST(ProbeTest, SeparableCloudsGivePerfectTrainingAccuracy) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 0.3);
  Eigen::MatrixXd x(40, 6);
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    y.push_back(i % 2);
    for (int k = 0; k < 6; ++k) x(i, k) = noise(rng) + (k == 2 ? (i % 2 ? 3.0 : -3.0) : 0.0);
  }
  const auto r = fit_l1_probe(x, y, 5, 0);
  ASSERT_EQ(r.folds.size(), 5u);
  for (const auto& f : r.folds) {
    EXPECT_EQ(f.train_accuracy, 1.0);
    EXPECT_NE(f.coefficients(2), 0.0);
  }
  EXPECT_EQ(r.mean_train_accuracy, 1.0);
  std::set<std::size_t> seen;
  for (const auto& f : r.folds) seen.insert(f.test_items.begin(), f.test_items.end());
  EXPECT_EQ(seen.size(), 40u);
}

TEST(ProbeTest, RejectsClassesSmallerThanFoldCount) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(10, 3);
  std::vector<int> y{1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_THROW(fit_l1_probe(x, y, 5, 0), DegenerateInputError);
}

TEST(CoordinateTest, CountRule) {
  ProbeResult r;
  std::vector<std::vector<double>> raw;
  for (int f = 0; f < 5; ++f) {
    FoldResult fr;
    fr.coefficients = Eigen::VectorXd::Zero(10);
    if (f < 4) fr.coefficients(7) = 0.5;
    if (f < 3) fr.coefficients(3) = -0.2;
    raw.emplace_back(fr.coefficients.data(), fr.coefficients.data() + 10);
    r.folds.push_back(fr);
  }
  const auto rep = important_coordinates(r, 4, "degree");
  EXPECT_THAT(rep.indices, ElementsAre(7));
  const auto want = oracle::StableCoordinates(raw, 4);
  EXPECT_EQ(std::set<int>(rep.indices.begin(), rep.indices.end()), want);
  EXPECT_THAT(important_coordinates(r, 3).indices, ElementsAre(3, 7));
}

TEST(CoordinateTest, Overlap) {
  CoordinateReport a{"polarity", 4, {1, 2, 3}}, b{"degree", 4, {3, 4}};
  const auto o = overlap_report(a, b);
  EXPECT_THAT(o.intersection, ElementsAre(3));
  EXPECT_EQ(o.size_a, 3u);
  EXPECT_EQ(o.size_b, 2u);
  EXPECT_TRUE(overlap_report(a, CoordinateReport{"x", 4, {}}).intersection.empty());
}

TEST(SweepTest, StrongerPenaltyIsSparser) {
  const auto ref = LoadReference();
  const std::vector<double> lambdas{0.001, 0.05, 1.0};
  const auto s = sweep_l1_strength(ref.x, ref.y, lambdas, 3, 0);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_GE(s[0].mean_nonzero, s[1].mean_nonzero);
  EXPECT_GE(s[1].mean_nonzero, s[2].mean_nonzero);
  EXPECT_EQ(s[2].mean_nonzero, 0.0);
}

}  // namespace
}  // namespace artlang
