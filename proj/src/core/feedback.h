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

#ifndef TRAM_CORE_FEEDBACK_H_
#define TRAM_CORE_FEEDBACK_H_

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "core/game_tree.h"
#include "core/trigger.h"

namespace tram {

// Nonnegative XA x XA loss matrix in one of two structured forms: rank-one
// ell mu^T (full feedback) or column-assembled sparse (bandit estimators).
class LossMatrix {
 public:
  enum class Kind { kRankOne, kSparse };

  static LossMatrix RankOne(std::vector<double> loss, std::vector<double> mu);
  static LossMatrix Sparse(int dim);

  void AddColumnEntry(int col, int row, double value);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double At(int row, int col) const;
  double Diag(int p) const { return At(p, p); }
  // trace(M) - sum_{p >= q} M(p, p).
  double UntriggeredInner(const GameTree& tree, int q) const;
  void AddTo(Eigen::MatrixXd* accum) const;
  Eigen::MatrixXd Dense() const;

  const std::vector<double>& rank_one_loss() const { return loss_; }
  const std::vector<double>& rank_one_mu() const { return mu_; }
  // Entries of one column as (row, value) pairs.
  std::vector<std::pair<int, double>> Column(int col) const;

 private:
  Kind kind_ = Kind::kRankOne;
  int dim_ = 0;
  std::vector<double> loss_, mu_;  // rank-one
  std::vector<std::vector<std::pair<int, double>>> cols_;  // sparse
};

// Exact expected loss of the episode: ell_h(x, a) = p(x) (1 - Rbar(x, a)),
// with p(x) the environment reach probability of x.
std::vector<double> ExpectedLoss(const GameTree& tree,
                                 const EpisodeEnvironment& env);

// Environment reach probabilities p(x) (policy-independent part).
std::vector<double> EnvReach(const GameTree& tree,
                             const EpisodeEnvironment& env);

Trajectory SampleTrajectory(const GameTree& tree,
                            const EpisodeEnvironment& env,
                            const std::vector<double>& behavioral, Rng& rng);

// Sparse importance-weighted estimator with IX bonus gamma:
// ell~(x, a) = 1{visited} (1 - r) / (mu_{1:h}(x, a) + gamma).
std::vector<std::pair<int, double>> IxEstimator(
    const GameTree& tree, const Trajectory& traj,
    const std::vector<double>& mu_seq, double gamma);

// Adaptive per-trigger estimator family: the denominator of member (x_g, a_g)
// also carries the balanced reach and the trigger's own subtree reach.
struct AdaptiveFamily {
  // [q] -> sparse entries of ell~^{t, q}.
  std::vector<std::vector<std::pair<int, double>>> per_trigger;
};

AdaptiveFamily AdaptiveEstimator(const GameTree& tree, const Trajectory& traj,
                                 const std::vector<double>& mu_seq,
                                 const TriggerProfile& profile,
                                 const BalancedWeights& weights, double gamma);

LossMatrix AssembleMatrix(const std::vector<double>& loss,
                          const std::vector<double>& mu_seq);
LossMatrix AssembleAdaptiveMatrix(const GameTree& tree,
                                  const AdaptiveFamily& family,
                                  const std::vector<double>& mu_seq);

std::vector<double> SparseToDense(int dim,
                                  const std::vector<std::pair<int, double>>& v);

}  // namespace tram

#endif  // TRAM_CORE_FEEDBACK_H_
