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

#ifndef TRAM_CORE_TRIGGER_H_
#define TRAM_CORE_TRIGGER_H_

#include <vector>

#include <Eigen/Dense>

#include "core/game_tree.h"

namespace tram {

// A deterministic trigger modification: when sequence (x_g, a_g) would be
// played, replace the subtree policy at x_g by a deterministic one.
struct TriggerVertex {
  int trigger_pair = -1;
  std::vector<double> policy;  // 0/1 sequence form, zero outside subtree
};

// phi(lambda, m): a distribution over trigger pairs plus one subtree policy
// per trigger, stored in behavioral form (uniform placeholders outside the
// trigger's subtree).
struct TriggerProfile {
  std::vector<double> lambda;                 // [pair]
  std::vector<std::vector<double>> m;         // [pair][pair] behavioral

  void Check(const GameTree& tree, double tol = 1e-10) const;
  // Sequence form of m[q] over the subtree rooted at x_g(q), zero elsewhere.
  std::vector<double> MSeq(const GameTree& tree, int q) const;
};

// Deterministic sequence-form policies of the whole tree (the vertex set V).
// Unreached subtrees are zeroed, so the enumeration has no duplicates.
std::vector<std::vector<double>> EnumeratePolicies(const GameTree& tree,
                                                   long cap = 1000000);
// V^{x}: deterministic subtree policies rooted at `root`.
std::vector<std::vector<double>> EnumerateSubtreePolicies(const GameTree& tree,
                                                          int root,
                                                          long cap = 1000000);
// Phi_0^Tr, ordered by (trigger pair, subtree vertex).
std::vector<TriggerVertex> EnumerateTriggerVertices(const GameTree& tree,
                                                    long cap = 1000000);

// (I - E_{>= q}) mu + m * mu(q), matrix-free.
std::vector<double> ApplyTriggerVertex(const GameTree& tree,
                                       const TriggerVertex& vertex,
                                       const std::vector<double>& mu);

// phi(lambda, m) * v, matrix-free.
std::vector<double> ProfileApply(const GameTree& tree,
                                 const TriggerProfile& profile,
                                 const std::vector<double>& v);

// Dense materializations, used by oracles and tests.
Eigen::MatrixXd TriggerVertexMatrix(const GameTree& tree,
                                    const TriggerVertex& vertex);
Eigen::MatrixXd ProfileMatrix(const GameTree& tree,
                              const TriggerProfile& profile);

// <I - E_{>= q}, M> for a dense matrix.
double UntriggeredInner(const GameTree& tree, const Eigen::MatrixXd& M, int q);
// <phi(lambda, m), M>.
double ProfileInner(const GameTree& tree, const TriggerProfile& profile,
                    const Eigen::MatrixXd& M);

struct FixedPointResult {
  std::vector<double> mu;
  double residual = 0.0;  // || phi mu - mu ||_inf
};

// Solves phi(lambda, m) mu = mu over the sequence-form polytope. Layer-wise
// direct solve, with a dense least-squares pass and averaged iteration as
// fallbacks; errors out if no route reaches the residual target.
FixedPointResult FixedPoint(const GameTree& tree, const TriggerProfile& profile,
                            double tol = 1e-10);

struct BestTriggerResult {
  TriggerVertex vertex;
  double value = 0.0;  // min over Phi_0 of sum_t <phi mu^t, ell^t>
};

// Exact best trigger response. `cumulative` holds, in column q, the vector
// sum_t mu^t(q) ell^t (only the subtree entries are read), and
// `untriggered[q]` = sum_t <(I - E_{>= q}) mu^t, ell^t>. Ties in the subtree
// DP go to the lowest action index.
BestTriggerResult BestTriggerResponse(const GameTree& tree,
                                      const Eigen::MatrixXd& cumulative,
                                      const std::vector<double>& untriggered);

// Best fixed deterministic policy against a cumulative loss vector:
// min_{v in V} <v, loss>, by the same DP with min in place of log-sum-exp.
double BestVertexValue(const GameTree& tree, const std::vector<double>& loss);

// The argmin policy of the DP above, as a deterministic behavioral vector
// defined at every infoset (lowest action index on ties).
std::vector<double> BestVertexBehavioral(const GameTree& tree,
                                         const std::vector<double>& loss);

}  // namespace tram

#endif  // TRAM_CORE_TRIGGER_H_
