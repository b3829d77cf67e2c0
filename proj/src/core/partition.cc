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

#include "core/partition.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/checks.h"

namespace tram {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogSumExp(const std::vector<double>& z) {
  double hi = kNegInf;
  for (double v : z) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

void CheckFinite(const Eigen::MatrixXd& M) {
  TRAM_CHECK_MSG(!M.hasNaN(), "loss matrix contains NaN");
}

// sum_i p_i log p_i with 0 log 0 := 0.
double NegEntropy(const std::vector<double>& dist) {
  double total = 0.0;
  for (double p : dist) {
    if (p > 0.0) total += p * std::log(p);
  }
  return total;
}

}  // namespace

TriggerGradient LogPartitionTrigger(const GameTree& tree,
                                    const Eigen::MatrixXd& M) {
  CheckFinite(M);
  const int A = tree.num_actions;
  const int P = tree.num_pairs();

  TriggerGradient out;
  out.f.assign(P, std::vector<double>(tree.num_infosets, 0.0));
  out.profile.lambda.assign(P, 0.0);
  out.profile.m.assign(P, std::vector<double>(P, 1.0 / A));

  std::vector<double> outer(P);
  std::vector<double> z(A);
  for (int q = 0; q < P; ++q) {
    int root = tree.pair_infoset(q);
    const auto& subtree = tree.subtree_infosets[root];
    auto& f = out.f[q];
    auto& m = out.profile.m[q];
    for (auto it = subtree.rbegin(); it != subtree.rend(); ++it) {
      int x = *it;
      for (int a = 0; a < A; ++a) {
        int p = tree.pair_index(x, a);
        double acc = -M(p, q);
        for (int c : tree.children[p]) acc += f[c];
        z[a] = acc;
      }
      f[x] = LogSumExp(z);
      for (int a = 0; a < A; ++a) {
        m[tree.pair_index(x, a)] = std::exp(z[a] - f[x]);
      }
    }
    outer[q] = -UntriggeredInner(tree, M, q) + f[root];
  }
  out.value = LogSumExp(outer);
  for (int q = 0; q < P; ++q) {
    out.profile.lambda[q] = std::exp(outer[q] - out.value);
  }
  return out;
}

TriggerGradient LogPartitionBalanced(const GameTree& tree,
                                     const Eigen::MatrixXd& M,
                                     const BalancedWeights& weights) {
  CheckFinite(M);
  const int A = tree.num_actions;
  const int P = tree.num_pairs();

  TriggerGradient out;
  out.f.assign(P, std::vector<double>(tree.num_infosets, 0.0));
  out.profile.lambda.assign(P, 0.0);
  out.profile.m.assign(P, std::vector<double>(P, 1.0 / A));

  std::vector<double> outer(P);
  std::vector<double> z(A);
  for (int q = 0; q < P; ++q) {
    int root = tree.pair_infoset(q);
    const auto& subtree = tree.subtree_infosets[root];
    auto& f = out.f[q];
    auto& m = out.profile.m[q];
    for (auto it = subtree.rbegin(); it != subtree.rend(); ++it) {
      int x = *it;
      double w = weights.SubtreeReach(root, x);
      for (int a = 0; a < A; ++a) {
        int p = tree.pair_index(x, a);
        double acc = -M(p, q);
        for (int c : tree.children[p]) acc += f[c];
        z[a] = w * acc;
      }
      double lse = LogSumExp(z);
      f[x] = lse / w;
      for (int a = 0; a < A; ++a) {
        m[tree.pair_index(x, a)] = std::exp(z[a] - lse);
      }
    }
    outer[q] = (-UntriggeredInner(tree, M, q) + f[root]) / P;
  }
  double lse = LogSumExp(outer);
  out.value = P * lse;
  for (int q = 0; q < P; ++q) {
    out.profile.lambda[q] = std::exp(outer[q] - lse);
  }
  return out;
}

VertexGradient LogPartitionVertex(const GameTree& tree,
                                  const std::vector<double>& loss) {
  const int A = tree.num_actions;
  VertexGradient out;
  out.f.assign(tree.num_infosets, 0.0);
  out.behavioral.assign(tree.num_pairs(), 0.0);
  std::vector<double> z(A);
  for (int h = tree.horizon - 1; h >= 0; --h) {
    for (int x : tree.layers[h]) {
      for (int a = 0; a < A; ++a) {
        int p = tree.pair_index(x, a);
        TRAM_CHECK_MSG(!std::isnan(loss[p]), "loss vector contains NaN");
        double acc = -loss[p];
        for (int c : tree.children[p]) acc += out.f[c];
        z[a] = acc;
      }
      out.f[x] = LogSumExp(z);
      for (int a = 0; a < A; ++a) {
        out.behavioral[tree.pair_index(x, a)] = std::exp(z[a] - out.f[x]);
      }
    }
  }
  out.value = 0.0;
  for (int x : tree.layers[0]) out.value += out.f[x];
  out.policy = BehavioralToSeq(tree, out.behavioral);
  return out;
}

namespace {

// Linear-space product recursion; reports overflow through the flag.
double KernelLinear(const GameTree& tree, const std::vector<double>& b, int x,
                    bool* overflow) {
  double total = 0.0;
  for (int a = 0; a < tree.num_actions; ++a) {
    int p = tree.pair_index(x, a);
    double term = b[p];
    for (int c : tree.children[p]) {
      term *= KernelLinear(tree, b, c, overflow);
    }
    total += term;
  }
  if (total > 1e290) *overflow = true;
  return total;
}

double KernelLog(const GameTree& tree, const std::vector<double>& b, int x) {
  std::vector<double> z(tree.num_actions);
  for (int a = 0; a < tree.num_actions; ++a) {
    int p = tree.pair_index(x, a);
    double acc = std::log(b[p]);
    for (int c : tree.children[p]) acc += KernelLog(tree, b, c);
    z[a] = acc;
  }
  return LogSumExp(z);
}

}  // namespace

double KernelEval(const GameTree& tree, const std::vector<double>& b,
                  int root_infoset) {
  for (double v : b) {
    TRAM_CHECK_MSG(v > 0.0, "kernel argument must be entrywise positive");
  }
  bool overflow = false;
  double value = KernelLinear(tree, b, root_infoset, &overflow);
  if (overflow || !std::isfinite(value)) {
    return std::exp(KernelLog(tree, b, root_infoset));
  }
  return value;
}

double DilatedEntropy(const GameTree& tree, const SequencePolicy& mu) {
  std::vector<double> behavioral = SeqToBehavioral(tree, mu);
  double total = 0.0;
  for (int q = 0; q < tree.num_pairs(); ++q) {
    if (mu.values[q] <= 0.0) continue;
    total += mu.values[q] * std::log(behavioral[q]);
  }
  return total;
}

double DilatedKl(const GameTree& tree, const SequencePolicy& mu,
                 const SequencePolicy& nu) {
  std::vector<double> bm = SeqToBehavioral(tree, mu);
  std::vector<double> bn = SeqToBehavioral(tree, nu);
  double total = 0.0;
  for (int q = 0; q < tree.num_pairs(); ++q) {
    if (mu.values[q] <= 0.0) continue;
    TRAM_CHECK_MSG(bn[q] > 0.0,
                   "dilated KL reference assigns zero probability on the "
                   "support of mu");
    total += mu.values[q] * std::log(bm[q] / bn[q]);
  }
  return total;
}

double BalancedDilatedEntropy(const GameTree& tree, const SequencePolicy& mu,
                              const BalancedWeights& weights) {
  TRAM_CHECK(mu.root >= 0);
  std::vector<double> behavioral = SeqToBehavioral(tree, mu);
  double total = 0.0;
  for (int x : tree.subtree_infosets[mu.root]) {
    double w = weights.SubtreeReach(mu.root, x);
    for (int a = 0; a < tree.num_actions; ++a) {
      int q = tree.pair_index(x, a);
      if (mu.values[q] <= 0.0) continue;
      total += mu.values[q] / w * std::log(behavioral[q]);
    }
  }
  return total;
}

double BalancedDilatedKl(const GameTree& tree, const SequencePolicy& mu,
                         const SequencePolicy& nu,
                         const BalancedWeights& weights) {
  TRAM_CHECK(mu.root >= 0);
  std::vector<double> bm = SeqToBehavioral(tree, mu);
  std::vector<double> bn = SeqToBehavioral(tree, nu);
  double total = 0.0;
  for (int x : tree.subtree_infosets[mu.root]) {
    double w = weights.SubtreeReach(mu.root, x);
    for (int a = 0; a < tree.num_actions; ++a) {
      int q = tree.pair_index(x, a);
      if (mu.values[q] <= 0.0) continue;
      TRAM_CHECK_MSG(bn[q] > 0.0, "balanced dilated KL reference vanishes");
      total += mu.values[q] / w * std::log(bm[q] / bn[q]);
    }
  }
  return total;
}

namespace {

SequencePolicy SubtreeSeq(const GameTree& tree, const TriggerProfile& profile,
                          int q) {
  SequencePolicy sp;
  sp.root = tree.pair_infoset(q);
  sp.values = profile.MSeq(tree, q);
  return sp;
}

}  // namespace

double TriggerDilatedEntropy(const GameTree& tree,
                             const TriggerProfile& profile) {
  double total = NegEntropy(profile.lambda);
  for (int q = 0; q < tree.num_pairs(); ++q) {
    if (profile.lambda[q] <= 0.0) continue;
    total += profile.lambda[q] * DilatedEntropy(tree, SubtreeSeq(tree, profile, q));
  }
  return total;
}

double TriggerDilatedKl(const GameTree& tree, const TriggerProfile& p,
                        const TriggerProfile& q) {
  double total = 0.0;
  for (size_t i = 0; i < p.lambda.size(); ++i) {
    if (p.lambda[i] <= 0.0) continue;
    TRAM_CHECK_MSG(q.lambda[i] > 0.0, "KL reference lambda vanishes");
    total += p.lambda[i] * std::log(p.lambda[i] / q.lambda[i]);
  }
  for (int t = 0; t < tree.num_pairs(); ++t) {
    if (p.lambda[t] <= 0.0) continue;
    total += p.lambda[t] * DilatedKl(tree, SubtreeSeq(tree, p, t),
                                     SubtreeSeq(tree, q, t));
  }
  return total;
}

double BalancedTriggerDilatedEntropy(const GameTree& tree,
                                     const TriggerProfile& profile,
                                     const BalancedWeights& weights) {
  double total = tree.num_pairs() * NegEntropy(profile.lambda);
  for (int q = 0; q < tree.num_pairs(); ++q) {
    if (profile.lambda[q] <= 0.0) continue;
    total += profile.lambda[q] *
             BalancedDilatedEntropy(tree, SubtreeSeq(tree, profile, q), weights);
  }
  return total;
}

double BalancedTriggerDilatedKl(const GameTree& tree, const TriggerProfile& p,
                                const TriggerProfile& q,
                                const BalancedWeights& weights) {
  double total = 0.0;
  for (size_t i = 0; i < p.lambda.size(); ++i) {
    if (p.lambda[i] <= 0.0) continue;
    TRAM_CHECK_MSG(q.lambda[i] > 0.0, "KL reference lambda vanishes");
    total += p.lambda[i] * std::log(p.lambda[i] / q.lambda[i]);
  }
  total *= tree.num_pairs();
  for (int t = 0; t < tree.num_pairs(); ++t) {
    if (p.lambda[t] <= 0.0) continue;
    total += p.lambda[t] * BalancedDilatedKl(tree, SubtreeSeq(tree, p, t),
                                             SubtreeSeq(tree, q, t), weights);
  }
  return total;
}

BruteForceTriggerResult BruteForceLogPartitionTrigger(
    const GameTree& tree, const std::vector<TriggerVertex>& vertices,
    const Eigen::MatrixXd& M, bool with_matrix) {
  CheckFinite(M);
  const int P = tree.num_pairs();
  std::vector<double> exponents(vertices.size());
  for (size_t i = 0; i < vertices.size(); ++i) {
    const TriggerVertex& v = vertices[i];
    double inner = UntriggeredInner(tree, M, v.trigger_pair);
    int root = tree.pair_infoset(v.trigger_pair);
    for (int x : tree.subtree_infosets[root]) {
      for (int a = 0; a < tree.num_actions; ++a) {
        int p = tree.pair_index(x, a);
        if (v.policy[p] != 0.0) inner += v.policy[p] * M(p, v.trigger_pair);
      }
    }
    exponents[i] = -inner;
  }
  BruteForceTriggerResult out;
  out.value = LogSumExp(exponents);
  if (with_matrix) out.neg_grad = Eigen::MatrixXd::Zero(P, P);
  out.lambda.assign(P, 0.0);
  out.m_seq.assign(P, std::vector<double>(P, 0.0));
  for (size_t i = 0; i < vertices.size(); ++i) {
    double w = std::exp(exponents[i] - out.value);
    if (with_matrix) out.neg_grad += w * TriggerVertexMatrix(tree, vertices[i]);
    int q = vertices[i].trigger_pair;
    out.lambda[q] += w;
    for (int x : tree.subtree_infosets[tree.pair_infoset(q)]) {
      for (int a = 0; a < tree.num_actions; ++a) {
        int p = tree.pair_index(x, a);
        out.m_seq[q][p] += w * vertices[i].policy[p];
      }
    }
  }
  for (int q = 0; q < P; ++q) {
    if (out.lambda[q] <= 0.0) continue;
    for (double& v : out.m_seq[q]) v /= out.lambda[q];
  }
  return out;
}

BruteForceVertexResult BruteForceLogPartitionVertex(
    const std::vector<std::vector<double>>& vertices,
    const std::vector<double>& loss) {
  TRAM_CHECK(!vertices.empty());
  std::vector<double> exponents(vertices.size());
  for (size_t i = 0; i < vertices.size(); ++i) {
    double inner = 0.0;
    for (size_t p = 0; p < loss.size(); ++p) {
      inner += vertices[i][p] * loss[p];
    }
    exponents[i] = -inner;
  }
  BruteForceVertexResult out;
  out.value = LogSumExp(exponents);
  out.neg_grad.assign(loss.size(), 0.0);
  for (size_t i = 0; i < vertices.size(); ++i) {
    double w = std::exp(exponents[i] - out.value);
    for (size_t p = 0; p < loss.size(); ++p) {
      out.neg_grad[p] += w * vertices[i][p];
    }
  }
  return out;
}

}  // namespace tram
