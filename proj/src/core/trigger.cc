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

#include "core/trigger.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/checks.h"

namespace tram {

void TriggerProfile::Check(const GameTree& tree, double tol) const {
  TRAM_CHECK_EQ(static_cast<int>(lambda.size()), tree.num_pairs());
  double sum = 0.0;
  for (double l : lambda) {
    TRAM_CHECK_MSG(l >= -tol, "lambda has a negative entry");
    sum += l;
  }
  TRAM_CHECK_MSG(std::abs(sum - 1.0) <= 1e-12, "lambda does not sum to 1");
  for (int q = 0; q < tree.num_pairs(); ++q) {
    int root = tree.pair_infoset(q);
    for (int x : tree.subtree_infosets[root]) {
      double s = 0.0;
      for (int a = 0; a < tree.num_actions; ++a) {
        double p = m[q][tree.pair_index(x, a)];
        TRAM_CHECK_MSG(p >= -tol, "m has a negative entry");
        s += p;
      }
      TRAM_CHECK_MSG(std::abs(s - 1.0) <= 1e-10,
                     "m action distribution off the simplex");
    }
  }
}

std::vector<double> TriggerProfile::MSeq(const GameTree& tree, int q) const {
  std::vector<double> seq(tree.num_pairs(), 0.0);
  int root = tree.pair_infoset(q);
  auto fill = [&](auto&& self, int x, double reach) -> void {
    for (int a = 0; a < tree.num_actions; ++a) {
      int p = tree.pair_index(x, a);
      double v = reach * m[q][p];
      seq[p] = v;
      for (int c : tree.children[p]) self(self, c, v);
    }
  };
  fill(fill, root, 1.0);
  return seq;
}

namespace {

// Appends the cartesian products of per-child vertex lists under each action
// of `root` to `out`.
void EnumerateSubtreeInto(const GameTree& tree, int root, long cap,
                          std::vector<std::vector<double>>* out) {
  std::vector<std::vector<std::vector<double>>> per_child;
  for (int a = 0; a < tree.num_actions; ++a) {
    int q = tree.pair_index(root, a);
    // Start from the bare action indicator.
    std::vector<std::vector<double>> partial;
    std::vector<double> base(tree.num_pairs(), 0.0);
    base[q] = 1.0;
    partial.push_back(std::move(base));
    for (int c : tree.children[q]) {
      std::vector<std::vector<double>> child_vertices;
      EnumerateSubtreeInto(tree, c, cap, &child_vertices);
      std::vector<std::vector<double>> next;
      TRAM_CHECK_MSG(static_cast<long>(partial.size() * child_vertices.size()) <=
                         cap,
                     "vertex enumeration exceeds the configured cap");
      for (const auto& p : partial) {
        for (const auto& cv : child_vertices) {
          std::vector<double> merged = p;
          for (int cx : tree.subtree_infosets[c]) {
            for (int a2 = 0; a2 < tree.num_actions; ++a2) {
              int idx = tree.pair_index(cx, a2);
              merged[idx] += cv[idx];
            }
          }
          next.push_back(std::move(merged));
        }
      }
      partial = std::move(next);
    }
    TRAM_CHECK_MSG(static_cast<long>(out->size() + partial.size()) <= cap,
                   "vertex enumeration exceeds the configured cap");
    for (auto& p : partial) out->push_back(std::move(p));
  }
}

}  // namespace

std::vector<std::vector<double>> EnumerateSubtreePolicies(const GameTree& tree,
                                                          int root, long cap) {
  std::vector<std::vector<double>> out;
  EnumerateSubtreeInto(tree, root, cap, &out);
  return out;
}

std::vector<std::vector<double>> EnumeratePolicies(const GameTree& tree,
                                                   long cap) {
  std::vector<std::vector<double>> acc;
  acc.push_back(std::vector<double>(tree.num_pairs(), 0.0));
  for (int x : tree.layers[0]) {
    auto vx = EnumerateSubtreePolicies(tree, x, cap);
    std::vector<std::vector<double>> next;
    TRAM_CHECK_MSG(static_cast<long>(acc.size() * vx.size()) <= cap,
                   "vertex enumeration exceeds the configured cap");
    for (const auto& base : acc) {
      for (const auto& v : vx) {
        std::vector<double> merged = base;
        for (int cx : tree.subtree_infosets[x]) {
          for (int a = 0; a < tree.num_actions; ++a) {
            int idx = tree.pair_index(cx, a);
            merged[idx] += v[idx];
          }
        }
        next.push_back(std::move(merged));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

std::vector<TriggerVertex> EnumerateTriggerVertices(const GameTree& tree,
                                                    long cap) {
  std::vector<TriggerVertex> out;
  for (int q = 0; q < tree.num_pairs(); ++q) {
    int root = tree.pair_infoset(q);
    auto vs = EnumerateSubtreePolicies(tree, root, cap);
    TRAM_CHECK_MSG(static_cast<long>(out.size() + vs.size()) <= cap,
                   "trigger vertex enumeration exceeds the configured cap");
    for (auto& v : vs) out.push_back({q, std::move(v)});
  }
  return out;
}

std::vector<double> ApplyTriggerVertex(const GameTree& tree,
                                       const TriggerVertex& vertex,
                                       const std::vector<double>& mu) {
  std::vector<double> out = mu;
  double trigger_mass = mu[vertex.trigger_pair];
  for (int p : tree.subtree_pairs[vertex.trigger_pair]) out[p] = 0.0;
  int root = tree.pair_infoset(vertex.trigger_pair);
  for (int x : tree.subtree_infosets[root]) {
    for (int a = 0; a < tree.num_actions; ++a) {
      int p = tree.pair_index(x, a);
      out[p] += trigger_mass * vertex.policy[p];
    }
  }
  return out;
}

std::vector<double> ProfileApply(const GameTree& tree,
                                 const TriggerProfile& profile,
                                 const std::vector<double>& v) {
  std::vector<double> out = v;
  for (int q = 0; q < tree.num_pairs(); ++q) {
    double l = profile.lambda[q];
    if (l == 0.0) continue;
    for (int p : tree.subtree_pairs[q]) out[p] -= l * v[p];
  }
  for (int q = 0; q < tree.num_pairs(); ++q) {
    double scale = profile.lambda[q] * v[q];
    if (scale == 0.0) continue;
    std::vector<double> seq = profile.MSeq(tree, q);
    int root = tree.pair_infoset(q);
    for (int x : tree.subtree_infosets[root]) {
      for (int a = 0; a < tree.num_actions; ++a) {
        int p = tree.pair_index(x, a);
        out[p] += scale * seq[p];
      }
    }
  }
  return out;
}

Eigen::MatrixXd TriggerVertexMatrix(const GameTree& tree,
                                    const TriggerVertex& vertex) {
  const int P = tree.num_pairs();
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(P, P);
  for (int p : tree.subtree_pairs[vertex.trigger_pair]) phi(p, p) -= 1.0;
  for (int p = 0; p < P; ++p) {
    phi(p, vertex.trigger_pair) += vertex.policy[p];
  }
  return phi;
}

Eigen::MatrixXd ProfileMatrix(const GameTree& tree,
                              const TriggerProfile& profile) {
  const int P = tree.num_pairs();
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(P, P);
  for (int q = 0; q < P; ++q) {
    double l = profile.lambda[q];
    for (int p : tree.subtree_pairs[q]) phi(p, p) -= l;
    std::vector<double> seq = profile.MSeq(tree, q);
    for (int p = 0; p < P; ++p) phi(p, q) += l * seq[p];
  }
  return phi;
}

double UntriggeredInner(const GameTree& tree, const Eigen::MatrixXd& M, int q) {
  double v = M.trace();
  for (int p : tree.subtree_pairs[q]) v -= M(p, p);
  return v;
}

double ProfileInner(const GameTree& tree, const TriggerProfile& profile,
                    const Eigen::MatrixXd& M) {
  double total = 0.0;
  for (int q = 0; q < tree.num_pairs(); ++q) {
    if (profile.lambda[q] == 0.0) continue;
    double inner = UntriggeredInner(tree, M, q);
    std::vector<double> seq = profile.MSeq(tree, q);
    int root = tree.pair_infoset(q);
    for (int x : tree.subtree_infosets[root]) {
      for (int a = 0; a < tree.num_actions; ++a) {
        int p = tree.pair_index(x, a);
        inner += seq[p] * M(p, q);
      }
    }
    total += profile.lambda[q] * inner;
  }
  return total;
}

namespace {

double Residual(const GameTree& tree, const TriggerProfile& profile,
                const std::vector<double>& mu) {
  std::vector<double> image = ProfileApply(tree, profile, mu);
  double r = 0.0;
  for (int p = 0; p < tree.num_pairs(); ++p) {
    r = std::max(r, std::abs(image[p] - mu[p]));
  }
  // Flow conservation enters the residual so that a fallback cannot pass
  // with a non-policy solution.
  SequencePolicy sp{mu, -1};
  for (int x = 0; x < tree.num_infosets; ++x) {
    double sum = 0.0;
    for (int a = 0; a < tree.num_actions; ++a) {
      sum += mu[tree.pair_index(x, a)];
    }
    r = std::max(r, std::abs(sum - ParentFlow(tree, sp, x)));
  }
  for (double v : mu) r = std::max(r, std::max(0.0, -v));
  return r;
}

// Layer-wise direct solve. Processing infosets top-down, the entries at one
// infoset satisfy an A x A linear system whose right-hand side only involves
// already-solved layers; stacking the local flow constraint keeps the system
// well-posed even when lambda degenerates.
std::vector<double> SolveLayerwise(const GameTree& tree,
                                   const TriggerProfile& profile) {
  const int A = tree.num_actions;
  const int P = tree.num_pairs();
  std::vector<double> mu(P, 0.0);
  // lambda mass on the path above each infoset (pairs strictly above).
  std::vector<double> lambda_path(tree.num_infosets, 0.0);
  // Accumulated contributions lambda_q mu(q) m_q[p] from solved triggers.
  std::vector<double> contrib(P, 0.0);

  std::vector<std::vector<double>> m_seq(P);

  for (int h = 0; h < tree.horizon; ++h) {
    for (int x : tree.layers[h]) {
      if (h > 0) {
        int pq = tree.parent_pair[x];
        lambda_path[x] =
            lambda_path[tree.pair_infoset(pq)] + profile.lambda[pq];
      }
      double parent_value = 1.0;
      if (h > 0) parent_value = mu[tree.parent_pair[x]];

      Eigen::MatrixXd B(A + 1, A);
      Eigen::VectorXd rhs(A + 1);
      for (int a = 0; a < A; ++a) {
        int p = tree.pair_index(x, a);
        for (int a2 = 0; a2 < A; ++a2) {
          int q2 = tree.pair_index(x, a2);
          double coeff = a == a2 ? lambda_path[x] + profile.lambda[p] : 0.0;
          coeff -= profile.lambda[q2] * profile.m[q2][p];
          B(a, a2) = coeff;
        }
        rhs(a) = contrib[p];
      }
      for (int a2 = 0; a2 < A; ++a2) B(A, a2) = 1.0;
      rhs(A) = parent_value;

      Eigen::VectorXd sol = B.colPivHouseholderQr().solve(rhs);
      for (int a = 0; a < A; ++a) {
        int p = tree.pair_index(x, a);
        mu[p] = std::max(0.0, sol(a));
      }
      // Push this infoset's trigger contributions to deeper layers.
      for (int a = 0; a < A; ++a) {
        int q = tree.pair_index(x, a);
        double scale = profile.lambda[q] * mu[q];
        if (scale == 0.0) continue;
        if (m_seq[q].empty()) m_seq[q] = profile.MSeq(tree, q);
        for (int cx : tree.subtree_infosets[x]) {
          if (cx == x) continue;
          for (int a2 = 0; a2 < A; ++a2) {
            int p = tree.pair_index(cx, a2);
            contrib[p] += scale * m_seq[q][p];
          }
        }
      }
    }
  }
  return mu;
}

// Global dense least-squares fallback over the stacked system
// [(phi - I); flow] mu = [0; flow rhs].
std::vector<double> SolveDense(const GameTree& tree,
                               const TriggerProfile& profile) {
  const int P = tree.num_pairs();
  const int X = tree.num_infosets;
  Eigen::MatrixXd phi = ProfileMatrix(tree, profile);
  Eigen::MatrixXd A(P + X, P);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(P + X);
  A.topRows(P) = phi - Eigen::MatrixXd::Identity(P, P);
  A.bottomRows(X).setZero();
  for (int x = 0; x < X; ++x) {
    for (int a = 0; a < tree.num_actions; ++a) {
      A(P + x, tree.pair_index(x, a)) = 1.0;
    }
    if (tree.layer_of[x] == 0) {
      b(P + x) = 1.0;
    } else {
      A(P + x, tree.parent_pair[x]) = -1.0;
    }
  }
  Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
  std::vector<double> mu(P);
  for (int p = 0; p < P; ++p) mu[p] = std::max(0.0, sol(p));
  return mu;
}

std::vector<double> SolveByIteration(const GameTree& tree,
                                     const TriggerProfile& profile,
                                     int steps) {
  std::vector<double> mu = UniformPolicy(tree).values;
  std::vector<double> avg(mu.size(), 0.0);
  for (int s = 1; s <= steps; ++s) {
    mu = ProfileApply(tree, profile, mu);
    for (size_t i = 0; i < mu.size(); ++i) {
      avg[i] += (mu[i] - avg[i]) / s;
    }
  }
  return avg;
}

}  // namespace

FixedPointResult FixedPoint(const GameTree& tree, const TriggerProfile& profile,
                            double tol) {
  FixedPointResult best;
  best.mu = SolveLayerwise(tree, profile);
  best.residual = Residual(tree, profile, best.mu);
  if (best.residual <= tol) return best;

  std::vector<double> dense = SolveDense(tree, profile);
  double dense_res = Residual(tree, profile, dense);
  if (dense_res < best.residual) {
    best.mu = std::move(dense);
    best.residual = dense_res;
  }
  if (best.residual <= tol) return best;

  std::vector<double> iter = SolveByIteration(tree, profile, 50);
  double iter_res = Residual(tree, profile, iter);
  if (iter_res < best.residual) {
    best.mu = std::move(iter);
    best.residual = iter_res;
  }
  TRAM_CHECK_MSG(best.residual <= tol,
                 "fixed point solver did not converge: residual " +
                     std::to_string(best.residual));
  return best;
}

namespace {

// DP over one subtree: value[x] = min_a (loss(x, a) + sum_child value),
// ties to the lowest action index. Marks the chosen actions in `pick`.
double SubtreeMinValue(const GameTree& tree, const Eigen::MatrixXd& cumulative,
                       int col, int x, std::vector<int>* pick) {
  double best = std::numeric_limits<double>::infinity();
  int best_a = 0;
  for (int a = 0; a < tree.num_actions; ++a) {
    int p = tree.pair_index(x, a);
    double v = cumulative(p, col);
    for (int c : tree.children[p]) {
      v += SubtreeMinValue(tree, cumulative, col, c, nullptr);
    }
    if (v < best) {  // strict: the lowest action index wins ties
      best = v;
      best_a = a;
    }
  }
  if (pick != nullptr) {
    (*pick)[x] = best_a;
    int p = tree.pair_index(x, best_a);
    for (int c : tree.children[p]) {
      SubtreeMinValue(tree, cumulative, col, c, pick);
    }
  }
  return best;
}

}  // namespace

BestTriggerResult BestTriggerResponse(const GameTree& tree,
                                      const Eigen::MatrixXd& cumulative,
                                      const std::vector<double>& untriggered) {
  BestTriggerResult out;
  out.value = std::numeric_limits<double>::infinity();
  int best_q = -1;
  for (int q = 0; q < tree.num_pairs(); ++q) {
    int root = tree.pair_infoset(q);
    double v = untriggered[q] +
               SubtreeMinValue(tree, cumulative, q, root, nullptr);
    if (v < out.value) {
      out.value = v;
      best_q = q;
    }
  }
  TRAM_CHECK(best_q >= 0);
  // Rebuild the argmin vertex.
  std::vector<int> pick(tree.num_infosets, -1);
  int root = tree.pair_infoset(best_q);
  SubtreeMinValue(tree, cumulative, best_q, root, &pick);
  out.vertex.trigger_pair = best_q;
  out.vertex.policy.assign(tree.num_pairs(), 0.0);
  auto fill = [&](auto&& self, int x) -> void {
    int a = pick[x];
    int p = tree.pair_index(x, a);
    out.vertex.policy[p] = 1.0;
    for (int c : tree.children[p]) self(self, c);
  };
  fill(fill, root);  // unreached infosets stay zero, as in the enumeration
  return out;
}

double BestVertexValue(const GameTree& tree, const std::vector<double>& loss) {
  Eigen::MatrixXd col(tree.num_pairs(), 1);
  for (int p = 0; p < tree.num_pairs(); ++p) col(p, 0) = loss[p];
  double total = 0.0;
  for (int x : tree.layers[0]) {
    total += SubtreeMinValue(tree, col, 0, x, nullptr);
  }
  return total;
}

std::vector<double> BestVertexBehavioral(const GameTree& tree,
                                         const std::vector<double>& loss) {
  std::vector<double> value(tree.num_infosets, 0.0);
  std::vector<double> behavioral(tree.num_pairs(), 0.0);
  for (int h = tree.horizon - 1; h >= 0; --h) {
    for (int x : tree.layers[h]) {
      double best = std::numeric_limits<double>::infinity();
      int best_a = 0;
      for (int a = 0; a < tree.num_actions; ++a) {
        int p = tree.pair_index(x, a);
        double v = loss[p];
        for (int c : tree.children[p]) v += value[c];
        if (v < best) {
          best = v;
          best_a = a;
        }
      }
      value[x] = best;
      behavioral[tree.pair_index(x, best_a)] = 1.0;
    }
  }
  return behavioral;
}

}  // namespace tram
