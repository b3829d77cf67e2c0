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
//
// Log-partition functions over trigger-modification and policy vertex sets,
// their recursive gradients, dilated regularizers, and brute-force oracles.

#ifndef TRAM_CORE_PARTITION_H_
#define TRAM_CORE_PARTITION_H_

#include <vector>

#include <Eigen/Dense>

#include "core/game_tree.h"
#include "core/trigger.h"

namespace tram {

struct TriggerGradient {
  double value = 0.0;                 // F(M)
  TriggerProfile profile;             // -grad F(M) = phi(lambda, m)
  std::vector<std::vector<double>> f; // [q][infoset] recursion values
};

// F(M) = log sum_{q} exp{ -<I - E_{>=q}, M> + F_{q, x_g}(M) }, with the
// per-trigger values computed bottom-up by log-sum-exp; the gradient drops
// out of the same pass as (lambda, m).
TriggerGradient LogPartitionTrigger(const GameTree& tree,
                                    const Eigen::MatrixXd& M);

// Balanced variant: inner log-sum-exps are tempered by the balanced
// exploration reach mu^{*,h}_{g:h}, the outer one by 1/(XA).
TriggerGradient LogPartitionBalanced(const GameTree& tree,
                                     const Eigen::MatrixXd& M,
                                     const BalancedWeights& weights);

struct VertexGradient {
  double value = 0.0;
  std::vector<double> behavioral;  // [pair]
  SequencePolicy policy;           // -grad F(loss)
  std::vector<double> f;           // [infoset]
};

// F(loss) = log sum_{v in V} exp{-<v, loss>} over all deterministic
// sequence-form policies.
VertexGradient LogPartitionVertex(const GameTree& tree,
                                  const std::vector<double>& loss);

// Kernel K_{x}(b, 1) = sum_{v in V^x} prod_{(x',a') in v} b(x', a'),
// evaluated by the bottom-up product recursion. Switches to log-space when
// an intermediate would overflow.
double KernelEval(const GameTree& tree, const std::vector<double>& b,
                  int root_infoset);

// Dilated (negative) entropy of a subtree policy and the matching KL.
double DilatedEntropy(const GameTree& tree, const SequencePolicy& mu);
double DilatedKl(const GameTree& tree, const SequencePolicy& mu,
                 const SequencePolicy& nu);

// Balanced versions divide each term by the balanced reach from the root.
double BalancedDilatedEntropy(const GameTree& tree, const SequencePolicy& mu,
                              const BalancedWeights& weights);
double BalancedDilatedKl(const GameTree& tree, const SequencePolicy& mu,
                         const SequencePolicy& nu,
                         const BalancedWeights& weights);

// Trigger dilated regularizers over (lambda, m).
double TriggerDilatedEntropy(const GameTree& tree,
                             const TriggerProfile& profile);
double TriggerDilatedKl(const GameTree& tree, const TriggerProfile& p,
                        const TriggerProfile& q);
double BalancedTriggerDilatedEntropy(const GameTree& tree,
                                     const TriggerProfile& profile,
                                     const BalancedWeights& weights);
double BalancedTriggerDilatedKl(const GameTree& tree, const TriggerProfile& p,
                                const TriggerProfile& q,
                                const BalancedWeights& weights);

// Brute-force oracles: direct log-sum-exp over an explicit vertex list plus
// the softmax-weighted vertex average. These stay independent of the
// recursive implementations above.
struct BruteForceTriggerResult {
  double value = 0.0;
  Eigen::MatrixXd neg_grad;                // sum_phi p_phi phi (optional)
  std::vector<double> lambda;              // per trigger pair
  std::vector<std::vector<double>> m_seq;  // [q] -> weighted vertex average
};

BruteForceTriggerResult BruteForceLogPartitionTrigger(
    const GameTree& tree, const std::vector<TriggerVertex>& vertices,
    const Eigen::MatrixXd& M, bool with_matrix = true);

struct BruteForceVertexResult {
  double value = 0.0;
  std::vector<double> neg_grad;
};

BruteForceVertexResult BruteForceLogPartitionVertex(
    const std::vector<std::vector<double>>& vertices,
    const std::vector<double>& loss);

}  // namespace tram

#endif  // TRAM_CORE_PARTITION_H_
