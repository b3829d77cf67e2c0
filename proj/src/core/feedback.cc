// Copyright 2026 The tram Authors.
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

#include "core/feedback.h"

#include <algorithm>
#include <cmath>

#include "core/checks.h"

namespace tram {

LossMatrix LossMatrix::RankOne(std::vector<double> loss,
                               std::vector<double> mu) {
  TRAM_CHECK_EQ(loss.size(), mu.size());
  LossMatrix m;
  m.kind_ = Kind::kRankOne;
  m.dim_ = static_cast<int>(loss.size());
  m.loss_ = std::move(loss);
  m.mu_ = std::move(mu);
  for (double v : m.loss_) TRAM_CHECK(v >= 0.0);
  for (double v : m.mu_) TRAM_CHECK(v >= 0.0);
  return m;
}

LossMatrix LossMatrix::Sparse(int dim) {
  LossMatrix m;
  m.kind_ = Kind::kSparse;
  m.dim_ = dim;
  m.cols_.assign(dim, {});
  return m;
}

void LossMatrix::AddColumnEntry(int col, int row, double value) {
  TRAM_CHECK(kind_ == Kind::kSparse);
  TRAM_CHECK(value >= 0.0);
  if (value != 0.0) cols_[col].push_back({row, value});
}

double LossMatrix::At(int row, int col) const {
  if (kind_ == Kind::kRankOne) return loss_[row] * mu_[col];
  double v = 0.0;
  for (const auto& [r, val] : cols_[col]) {
    if (r == row) v += val;
  }
  return v;
}

double LossMatrix::UntriggeredInner(const GameTree& tree, int q) const {
  double total = 0.0;
  if (kind_ == Kind::kRankOne) {
    for (int p = 0; p < dim_; ++p) total += loss_[p] * mu_[p];
    for (int p : tree.subtree_pairs[q]) total -= loss_[p] * mu_[p];
    return total;
  }
  for (int c = 0; c < dim_; ++c) {
    for (const auto& [r, val] : cols_[c]) {
      if (r == c) total += val;
    }
  }
  for (int p : tree.subtree_pairs[q]) total -= At(p, p);
  return total;
}

void LossMatrix::AddTo(Eigen::MatrixXd* accum) const {
  if (kind_ == Kind::kRankOne) {
    Eigen::Map<const Eigen::VectorXd> l(loss_.data(), dim_);
    Eigen::Map<const Eigen::VectorXd> m(mu_.data(), dim_);
    accum->noalias() += l * m.transpose();
    return;
  }
  for (int c = 0; c < dim_; ++c) {
    for (const auto& [r, val] : cols_[c]) (*accum)(r, c) += val;
  }
}

Eigen::MatrixXd LossMatrix::Dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim_, dim_);
  AddTo(&out);
  return out;
}

std::vector<std::pair<int, double>> LossMatrix::Column(int col) const {
  if (kind_ == Kind::kSparse) return cols_[col];
  std::vector<std::pair<int, double>> out;
  if (mu_[col] == 0.0) return out;
  for (int p = 0; p < dim_; ++p) {
    if (loss_[p] != 0.0) out.push_back({p, loss_[p] * mu_[col]});
  }
  return out;
}

std::vector<double> EnvReach(const GameTree& tree,
                             const EpisodeEnvironment& env) {
  std::vector<double> reach(tree.num_infosets, 0.0);
  for (int x : tree.layers[0]) reach[x] = env.initial[x];
  for (int h = 0; h + 1 < tree.horizon; ++h) {
    for (int x : tree.layers[h]) {
      for (int a = 0; a < tree.num_actions; ++a) {
        int q = tree.pair_index(x, a);
        for (size_t ci = 0; ci < tree.children[q].size(); ++ci) {
          reach[tree.children[q][ci]] = reach[x] * env.transition[q][ci];
        }
      }
    }
  }
  return reach;
}

std::vector<double> ExpectedLoss(const GameTree& tree,
                                 const EpisodeEnvironment& env) {
  std::vector<double> reach = EnvReach(tree, env);
  std::vector<double> loss(tree.num_pairs(), 0.0);
  for (int x = 0; x < tree.num_infosets; ++x) {
    for (int a = 0; a < tree.num_actions; ++a) {
      int q = tree.pair_index(x, a);
      loss[q] = reach[x] * (1.0 - env.mean_reward[q]);
    }
  }
  return loss;
}

Trajectory SampleTrajectory(const GameTree& tree,
                            const EpisodeEnvironment& env,
                            const std::vector<double>& behavioral, Rng& rng) {
  Trajectory traj;
  std::vector<double> init;
  init.reserve(tree.layers[0].size());
  for (int x : tree.layers[0]) init.push_back(env.initial[x]);
  int x = tree.layers[0][rng.SampleIndex(init)];
  for (int h = 0; h < tree.horizon; ++h) {
    std::vector<double> probs(tree.num_actions);
    for (int a = 0; a < tree.num_actions; ++a) {
      probs[a] = behavioral[tree.pair_index(x, a)];
    }
    int a = rng.SampleIndex(probs);
    int q = tree.pair_index(x, a);
    double r = env.SampleReward(q, rng);
    traj.steps.push_back({x, a, r});
    if (h + 1 < tree.horizon) {
      TRAM_CHECK_MSG(!tree.children[q].empty(),
                     "trajectory hit a childless pair before the last layer");
      x = tree.children[q][rng.SampleIndex(env.transition[q])];
    }
  }
  return traj;
}

std::vector<std::pair<int, double>> IxEstimator(
    const GameTree& tree, const Trajectory& traj,
    const std::vector<double>& mu_seq, double gamma) {
  TRAM_CHECK(gamma >= 0.0);
  std::vector<std::pair<int, double>> out;
  double inner = 0.0;
  for (const auto& step : traj.steps) {
    int q = tree.pair_index(step.infoset, step.action);
    double denom = mu_seq[q] + gamma;
    // Visited implies positive reach on-policy; guarded anyway.
    TRAM_CHECK_MSG(denom > 0.0,
                   "IX estimator hit a visited pair with zero reach");
    double v = (1.0 - step.reward) / denom;
    inner += mu_seq[q] * v;
    if (v != 0.0) out.push_back({q, v});
  }
  // <mu, estimator> <= H holds almost surely; asserted per episode.
  TRAM_CHECK_MSG(inner <= tree.horizon + 1e-9,
                 "estimator inner product exceeds the horizon");
  return out;
}

AdaptiveFamily AdaptiveEstimator(const GameTree& tree, const Trajectory& traj,
                                 const std::vector<double>& mu_seq,
                                 const TriggerProfile& profile,
                                 const BalancedWeights& weights, double gamma) {
  TRAM_CHECK(gamma >= 0.0);
  AdaptiveFamily family;
  family.per_trigger.assign(tree.num_pairs(), {});

  // Path pairs of the visited trajectory, layer by layer.
  std::vector<int> visited;
  for (const auto& step : traj.steps) {
    visited.push_back(tree.pair_index(step.infoset, step.action));
  }

  for (int q = 0; q < tree.num_pairs(); ++q) {
    int g_root = tree.pair_infoset(q);
    auto& out = family.per_trigger[q];
    for (size_t h = 0; h < traj.steps.size(); ++h) {
      int p = visited[h];
      int x = traj.steps[h].infoset;
      double numer = 1.0 - traj.steps[h].reward;
      if (numer == 0.0) continue;
      double bonus = weights.FullReach(x);
      if (tree.InInfosetSubtree(x, g_root)) {
        // Sequence form of m_q from the trigger root down to (x, a).
        double mprod = 1.0;
        int cur = p;
        while (true) {
          mprod *= profile.m[q][cur];
          int cx = tree.pair_infoset(cur);
          if (cx == g_root) break;
          cur = tree.parent_pair[cx];
        }
        bonus += mu_seq[q] * mprod;
      }
      double denom = mu_seq[p] + gamma * bonus;
      TRAM_CHECK_MSG(denom > 0.0,
                     "adaptive estimator hit a visited pair with zero reach");
      out.push_back({p, numer / denom});
    }
    double inner = 0.0;
    for (const auto& [p, v] : out) inner += mu_seq[p] * v;
    TRAM_CHECK_MSG(inner <= tree.horizon + 1e-9,
                   "estimator inner product exceeds the horizon");
  }
  return family;
}

LossMatrix AssembleMatrix(const std::vector<double>& loss,
                          const std::vector<double>& mu_seq) {
  return LossMatrix::RankOne(loss, mu_seq);
}

LossMatrix AssembleAdaptiveMatrix(const GameTree& tree,
                                  const AdaptiveFamily& family,
                                  const std::vector<double>& mu_seq) {
  LossMatrix m = LossMatrix::Sparse(tree.num_pairs());
  for (int q = 0; q < tree.num_pairs(); ++q) {
    if (mu_seq[q] == 0.0) continue;
    for (const auto& [p, v] : family.per_trigger[q]) {
      m.AddColumnEntry(q, p, mu_seq[q] * v);
    }
  }
  return m;
}

std::vector<double> SparseToDense(
    int dim, const std::vector<std::pair<int, double>>& v) {
  std::vector<double> out(dim, 0.0);
  for (const auto& [p, val] : v) out[p] += val;
  return out;
}

}  // namespace tram
