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
#include "artlang/probe.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <glog/logging.h>

#include "artlang/error.hpp"

namespace artlang {

LabeledSet label_lexicon(const ScoredLexicon& lexicon, const ProbeTask& task) {
  LabeledSet out;
  for (const auto& e : lexicon.entries) {
    double score = 0.0;
    if (task.name == ProbeTaskName::kPolarity) {
      if (!e.polarity) throw ConfigError("lexicon entry '" + e.token + "' has no polarity score");
      score = e.polarity->score;
    } else {
      if (!e.degree) throw ConfigError("lexicon entry '" + e.token + "' has no degree score");
      score = e.degree->score;
    }
    if (score == task.threshold) {
      out.excluded.push_back(e.token);
      continue;
    }
    out.tokens.push_back(e.token);
    out.labels.push_back(score > task.threshold ? 1 : 0);
  }
  if (!out.excluded.empty()) {
    LOG(WARNING) << task.Name() << " probe: " << out.excluded.size() << " item(s) exactly at threshold "
                 << task.threshold << " excluded";
  }
  const auto ones = std::count(out.labels.begin(), out.labels.end(), 1);
  if (ones == 0 || ones == static_cast<long>(out.labels.size())) {
    throw DegenerateInputError(task.Name() + " probe: all " + std::to_string(out.labels.size()) +
                               " labeled items fall on one side of the threshold");
  }
  return out;
}

namespace {

// Numerically stable log(1 + exp(-m)).
double LogLoss(double margin) { return margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin)); }

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double SoftThreshold(double v, double t) { return v > t ? v - t : (v < -t ? v + t : 0.0); }

// Smooth part value and gradient at (w, b).
double SmoothLoss(const Eigen::MatrixXd& x, const Eigen::VectorXd& sgn, const Eigen::VectorXd& w, double b,
                  Eigen::VectorXd* gw, double* gb) {
  const Eigen::Index n = x.rows();
  const Eigen::VectorXd z = (x * w).array() + b;
  double loss = 0.0;
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = sgn(i) * z(i);
    loss += LogLoss(m);
    r(i) = -sgn(i) * Sigmoid(-m);
  }
  if (gw) {
    *gw = x.transpose() * r / static_cast<double>(n);
    *gb = r.sum() / static_cast<double>(n);
  }
  return loss / static_cast<double>(n);
}

}  // namespace

double L1LogisticModel::Objective(const Eigen::MatrixXd& x, std::span<const int> y, double lambda) const {
  Eigen::VectorXd sgn(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) sgn(i) = y[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
  return SmoothLoss(x, sgn, weights, intercept, nullptr, nullptr) + lambda * weights.lpNorm<1>();
}

double L1LogisticModel::Accuracy(const Eigen::MatrixXd& x, std::span<const int> y) const {
  if (x.rows() == 0) return 0.0;
  const Eigen::VectorXd z = (x * weights).array() + intercept;
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    correct += (z(i) > 0.0 ? 1 : 0) == y[static_cast<std::size_t>(i)] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(x.rows());
}

L1LogisticModel FitL1Logistic(const Eigen::MatrixXd& x, std::span<const int> y, const L1LogisticOptions& opt) {
  const Eigen::Index n = x.rows(), d = x.cols();
  if (n == 0 || static_cast<std::size_t>(n) != y.size()) throw ConfigError("probe: data and labels differ in size");
  if (opt.lambda < 0.0) throw ConfigError("probe: lambda must be >= 0");
  Eigen::VectorXd sgn(n);
  for (Eigen::Index i = 0; i < n; ++i) sgn(i) = y[static_cast<std::size_t>(i)] ? 1.0 : -1.0;

  // Lipschitz constant of the mean log-loss gradient: ||[X 1]||_2^2 / (4n).
  Eigen::MatrixXd xa(n, d + 1);
  xa << x, Eigen::VectorXd::Ones(n);
  const Eigen::MatrixXd gram = n <= d ? Eigen::MatrixXd(xa * xa.transpose()) : Eigen::MatrixXd(xa.transpose() * xa);
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  const double step = 4.0 * static_cast<double>(n) / std::max(top, 1e-12);

  L1LogisticModel m;
  m.weights = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd w = m.weights, w_prev = w, vw = w, gw;
  double b = 0.0, b_prev = 0.0, vb = 0.0, gb = 0.0;
  double t = 1.0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    SmoothLoss(x, sgn, vw, vb, &gw, &gb);
    w_prev = w;
    b_prev = b;
    w = vw - step * gw;
    for (Eigen::Index j = 0; j < d; ++j) w(j) = SoftThreshold(w(j), step * opt.lambda);
    b = vb - step * gb;

    // Adaptive restart when the momentum direction opposes the update.
    const double dir = (vw - w).dot(w - w_prev) + (vb - b) * (b - b_prev);
    if (dir > 0.0) t = 1.0;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    vw = w + beta * (w - w_prev);
    vb = b + beta * (b - b_prev);
    t = t_next;

    const double change = std::max((w - w_prev).lpNorm<Eigen::Infinity>(), std::abs(b - b_prev));
    const double scale = std::max({1.0, w.lpNorm<Eigen::Infinity>(), std::abs(b)});
    m.iterations = it;
    if (change <= opt.tolerance * scale) {
      m.converged = true;
      break;
    }
  }
  if (!m.converged) LOG(WARNING) << "L1 logistic regression hit the iteration limit (" << opt.max_iterations << ")";
  m.weights = w;
  m.intercept = b;
  return m;
}

std::vector<int> StratifiedFolds(std::span<const int> labels, int folds, std::uint64_t seed) {
  std::vector<int> out(labels.size(), -1);
  std::mt19937_64 rng(seed);
  for (int cls : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
  }
  return out;
}

ProbeResult fit_l1_probe(const Eigen::MatrixXd& embeddings, std::span<const int> labels, int folds,
                         std::uint64_t seed, const L1LogisticOptions& options) {
  if (folds < 2) throw ConfigError("probe: need at least 2 folds");
  if (static_cast<std::size_t>(embeddings.rows()) != labels.size()) {
    throw ConfigError("probe: embeddings and labels differ in size");
  }
  for (int cls : {0, 1}) {
    const auto c = std::count(labels.begin(), labels.end(), cls);
    if (c < folds) {
      throw DegenerateInputError("probe: class " + std::to_string(cls) + " has " + std::to_string(c) +
                                 " members, fewer than " + std::to_string(folds) + " folds");
    }
  }
  const auto assign = StratifiedFolds(labels, folds, seed);
  ProbeResult res;
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> tr, te;
    std::vector<int> ytr, yte;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      (assign[i] == f ? te : tr).push_back(static_cast<Eigen::Index>(i));
      (assign[i] == f ? yte : ytr).push_back(labels[i]);
    }
    const Eigen::MatrixXd xtr = embeddings(tr, Eigen::all);
    const Eigen::MatrixXd xte = embeddings(te, Eigen::all);
    const auto model = FitL1Logistic(xtr, ytr, options);
    FoldResult fr;
    fr.train_accuracy = model.Accuracy(xtr, ytr);
    fr.test_accuracy = model.Accuracy(xte, yte);
    fr.coefficients = model.weights;
    fr.intercept = model.intercept;
    for (auto i : te) fr.test_items.push_back(static_cast<std::size_t>(i));
    res.mean_train_accuracy += fr.train_accuracy / folds;
    res.mean_test_accuracy += fr.test_accuracy / folds;
    res.folds.push_back(std::move(fr));
  }
  return res;
}

CoordinateReport important_coordinates(const ProbeResult& result, int min_folds, std::string task) {
  CoordinateReport rep;
  rep.task = std::move(task);
  rep.min_folds = min_folds;
  if (result.folds.empty()) return rep;
  const Eigen::Index d = result.folds.front().coefficients.size();
  for (Eigen::Index j = 0; j < d; ++j) {
    int nonzero = 0;
    for (const auto& f : result.folds) nonzero += f.coefficients(j) != 0.0 ? 1 : 0;
    if (nonzero >= min_folds) rep.indices.push_back(static_cast<int>(j));
  }
  return rep;
}

OverlapReport overlap_report(const CoordinateReport& a, const CoordinateReport& b) {
  OverlapReport r;
  r.size_a = a.indices.size();
  r.size_b = b.indices.size();
  std::vector<int> sa = a.indices, sb = b.indices;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(r.intersection));
  return r;
}

std::vector<SweepPoint> sweep_l1_strength(const Eigen::MatrixXd& embeddings, std::span<const int> labels,
                                          std::span<const double> lambdas, int folds, std::uint64_t seed) {
  std::vector<SweepPoint> out;
  for (double lam : lambdas) {
    L1LogisticOptions opt;
    opt.lambda = lam;
    const auto r = fit_l1_probe(embeddings, labels, folds, seed, opt);
    double nz = 0.0;
    for (const auto& f : r.folds) nz += static_cast<double>((f.coefficients.array() != 0.0).count()) / folds;
    out.push_back({lam, r.mean_test_accuracy, nz});
  }
  return out;
}

nlohmann::json ToJson(const ProbeResult& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    std::vector<int> nz;
    for (Eigen::Index j = 0; j < f.coefficients.size(); ++j) {
      if (f.coefficients(j) != 0.0) nz.push_back(static_cast<int>(j));
    }
    folds.push_back({{"train_accuracy", f.train_accuracy},
                     {"test_accuracy", f.test_accuracy},
                     {"intercept", f.intercept},
                     {"nonzero_coordinates", nz},
                     {"coefficients", std::vector<double>(f.coefficients.data(), f.coefficients.data() + f.coefficients.size())},
                     {"test_items", f.test_items}});
  }
  return {{"mean_train_accuracy", r.mean_train_accuracy}, {"mean_test_accuracy", r.mean_test_accuracy}, {"folds", folds}};
}

nlohmann::json ToJson(const CoordinateReport& r) {
  return {{"task", r.task}, {"min_folds", r.min_folds}, {"indices", r.indices}, {"count", r.indices.size()}};
}

nlohmann::json ToJson(const OverlapReport& r) {
  return {{"size_a", r.size_a}, {"size_b", r.size_b}, {"intersection", r.intersection},
          {"intersection_size", r.intersection.size()}};
}

}  // namespace artlang
