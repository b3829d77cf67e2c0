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

#include <cmath>

#include "core/checks.h"
#include "core/verify.h"
#include "doctest.h"

namespace tram {
namespace {

GameTree Depth1() {
  GameSpec spec;
  spec.num_actions = 2;
  spec.layers = {{"x1"}};
  return BuildGame(spec);
}

Eigen::MatrixXd RandomM(int dim, Rng& rng, double scale = 1.0) {
  Eigen::MatrixXd M(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) M(i, j) = scale * rng.NextDouble();
  }
  return M;
}

TEST_CASE("trigger partition at zero loss") {
  GameTree tree = Depth1();
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  TriggerGradient g = LogPartitionTrigger(tree, zero);
  // Four vertices (2 triggers x 2 subtree policies), all exponents zero.
  CHECK(g.value == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(g.profile.lambda[0] == doctest::Approx(0.5));
  CHECK(g.profile.lambda[1] == doctest::Approx(0.5));
  CHECK(g.profile.m[0][0] == doctest::Approx(0.5));
  CHECK(g.profile.m[1][1] == doctest::Approx(0.5));
}

TEST_CASE("trigger partition matches enumeration on a hand matrix") {
  GameTree tree = Depth1();
  Rng rng(2);
  Eigen::MatrixXd M = RandomM(2, rng, 2.0);
  auto vertices = EnumerateTriggerVertices(tree);
  TriggerGradient rec = LogPartitionTrigger(tree, M);
  auto brute = BruteForceLogPartitionTrigger(tree, vertices, M);
  CHECK(rec.value == doctest::Approx(brute.value).epsilon(1e-12));
  Eigen::MatrixXd phi = ProfileMatrix(tree, rec.profile);
  CHECK((phi - brute.neg_grad).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("vertex partition at zero loss counts vertices") {
  for (uint64_t seed = 0; seed < 4; ++seed) {
    GameTree tree = RandomTree(seed, 3, 2, 2);
    std::vector<double> zero(tree.num_pairs(), 0.0);
    VertexGradient g = LogPartitionVertex(tree, zero);
    auto vertices = EnumeratePolicies(tree);
    CHECK(g.value ==
          doctest::Approx(std::log(double(vertices.size()))).epsilon(1e-12));
  }
  // On a uniform-branching tree the zero-loss gradient is the uniform
  // behavioral policy.
  GameTree tree = Depth1();
  VertexGradient g = LogPartitionVertex(tree, {0.0, 0.0});
  CHECK(g.behavioral[0] == doctest::Approx(0.5));
  CHECK(g.behavioral[1] == doctest::Approx(0.5));
}

TEST_CASE("kernel at ones counts subtree vertices") {
  for (uint64_t seed = 0; seed < 4; ++seed) {
    GameTree tree = RandomTree(seed, 3, 2, 2);
    std::vector<double> ones(tree.num_pairs(), 1.0);
    for (int x = 0; x < tree.num_infosets; ++x) {
      double k = KernelEval(tree, ones, x);
      CHECK(std::log(k) ==
            doctest::Approx(tree.log_num_vertices_subtree[x]).epsilon(1e-12));
    }
  }
}

TEST_CASE("kernel equals exp(F) for cumulative losses") {
  GameTree tree = RandomTree(8, 3, 2, 2);
  const int P = tree.num_pairs();
  Rng rng(55);
  std::vector<double> cum(P, 0.0);
  double eta = 0.3;
  for (int t = 0; t < 50; ++t) {
    for (int p = 0; p < P; ++p) cum[p] += rng.NextDouble();
    std::vector<double> scaled(P);
    std::vector<double> b(P);
    for (int p = 0; p < P; ++p) {
      scaled[p] = eta * cum[p];
      b[p] = std::exp(-scaled[p]);
    }
    VertexGradient g = LogPartitionVertex(tree, scaled);
    for (int x = 0; x < tree.num_infosets; ++x) {
      double k = KernelEval(tree, b, x);
      CHECK(std::log(k) == doctest::Approx(g.f[x]).epsilon(1e-10));
    }
  }
}

TEST_CASE("kernel matches direct enumeration on small subtrees") {
  GameTree tree = RandomTree(12, 3, 2, 2);
  Rng rng(66);
  std::vector<double> b(tree.num_pairs());
  for (double& v : b) v = 0.1 + rng.NextDouble();
  for (int x = 0; x < tree.num_infosets; ++x) {
    auto vertices = EnumerateSubtreePolicies(tree, x, 1000);
    double direct = 0.0;
    for (const auto& v : vertices) {
      double prod = 1.0;
      for (int p = 0; p < tree.num_pairs(); ++p) {
        if (v[p] != 0.0) prod *= b[p];
      }
      direct += prod;
    }
    CHECK(KernelEval(tree, b, x) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("kernel switches to log space under overflow") {
  GameTree tree = RandomTree(8, 3, 2, 2);
  std::vector<double> b(tree.num_pairs(), 1e200);
  double k = KernelEval(tree, b, tree.layers[0][0]);
  CHECK(std::isinf(k));  // value overflows a double but must not be NaN
  CHECK(!std::isnan(k));
  std::vector<double> small(tree.num_pairs(), 1e-200);
  double ks = KernelEval(tree, small, tree.layers[0][0]);
  CHECK(ks >= 0.0);
  CHECK(!std::isnan(ks));
}

TEST_CASE("partition recursions stay finite for large inputs") {
  GameTree tree = RandomTree(4, 3, 2, 2);
  const int P = tree.num_pairs();
  Rng rng(77);
  Eigen::MatrixXd M = RandomM(P, rng, 2e4);
  M.array() -= 1e4;
  BalancedWeights weights(tree);
  CHECK(std::isfinite(LogPartitionTrigger(tree, M).value));
  CHECK(std::isfinite(LogPartitionBalanced(tree, M, weights).value));
  std::vector<double> l(P);
  for (double& v : l) v = rng.NextDouble() * 2e4 - 1e4;
  CHECK(std::isfinite(LogPartitionVertex(tree, l).value));
}

TEST_CASE("partition rejects NaN inputs") {
  GameTree tree = Depth1();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2, 2);
  M(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(LogPartitionTrigger(tree, M), TramError);
}

TEST_CASE("balanced partition hand value on the single-infoset tree") {
  GameTree tree = Depth1();
  BalancedWeights weights(tree);
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  TriggerGradient g = LogPartitionBalanced(tree, zero, weights);
  CHECK(g.value == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("convexity spot check at midpoints") {
  GameTree tree = RandomTree(2, 3, 2, 2);
  const int P = tree.num_pairs();
  BalancedWeights weights(tree);
  Rng rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::MatrixXd a = RandomM(P, rng, 2.0);
    Eigen::MatrixXd b = RandomM(P, rng, 2.0);
    Eigen::MatrixXd mid = 0.5 * (a + b);
    double fa = LogPartitionTrigger(tree, a).value;
    double fb = LogPartitionTrigger(tree, b).value;
    CHECK(LogPartitionTrigger(tree, mid).value <= 0.5 * (fa + fb) + 1e-9);
    double ga = LogPartitionBalanced(tree, a, weights).value;
    double gb = LogPartitionBalanced(tree, b, weights).value;
    CHECK(LogPartitionBalanced(tree, mid, weights).value <=
          0.5 * (ga + gb) + 1e-9);
  }
}

TEST_CASE("dilated entropy values and KL properties") {
  GameTree tree = Depth1();
  SequencePolicy uniform = UniformPolicy(tree);
  CHECK(DilatedEntropy(tree, uniform) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-12));

  Rng rng(21);
  GameTree big = RandomTree(6, 3, 2, 2);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> b(big.num_pairs());
    std::vector<double> c(big.num_pairs());
    for (int x = 0; x < big.num_infosets; ++x) {
      double sb = 0.0, sc = 0.0;
      for (int a = 0; a < big.num_actions; ++a) {
        b[big.pair_index(x, a)] = 0.05 + rng.NextDouble();
        c[big.pair_index(x, a)] = 0.05 + rng.NextDouble();
        sb += b[big.pair_index(x, a)];
        sc += c[big.pair_index(x, a)];
      }
      for (int a = 0; a < big.num_actions; ++a) {
        b[big.pair_index(x, a)] /= sb;
        c[big.pair_index(x, a)] /= sc;
      }
    }
    SequencePolicy mu = BehavioralToSeq(big, b);
    SequencePolicy nu = BehavioralToSeq(big, c);
    CHECK(DilatedKl(big, mu, mu) == doctest::Approx(0.0));
    CHECK(DilatedKl(big, mu, nu) >= -1e-12);
    // Subtree-rooted variants behave the same way.
    int root = big.layers[1][0];
    SequencePolicy mu_s = BehavioralToSeq(big, b, root);
    SequencePolicy nu_s = BehavioralToSeq(big, c, root);
    CHECK(DilatedKl(big, mu_s, mu_s) == doctest::Approx(0.0));
    CHECK(DilatedKl(big, mu_s, nu_s) >= -1e-12);
  }
}

TEST_CASE("trigger dilated entropy hand value") {
  // Uniform lambda over both triggers and uniform subtree policies on the
  // single-infoset tree: H(lambda) + sum lambda * H = -log2 - log2 = -log4.
  GameTree tree = Depth1();
  TriggerProfile profile;
  profile.lambda = {0.5, 0.5};
  profile.m = {{0.5, 0.5}, {0.5, 0.5}};
  CHECK(TriggerDilatedEntropy(tree, profile) ==
        doctest::Approx(-std::log(4.0)).epsilon(1e-12));
  CHECK(TriggerDilatedKl(tree, profile, profile) == doctest::Approx(0.0));
  BalancedWeights weights(tree);
  CHECK(BalancedTriggerDilatedKl(tree, profile, profile, weights) ==
        doctest::Approx(0.0));
}

TEST_CASE("brute force value is ordering invariant and shift equivariant") {
  GameTree tree = RandomTree(9, 2, 2, 2);
  const int P = tree.num_pairs();
  auto vertices = EnumerateTriggerVertices(tree);
  Rng rng(3);
  Eigen::MatrixXd M = RandomM(P, rng);
  auto fwd = BruteForceLogPartitionTrigger(tree, vertices, M);
  std::reverse(vertices.begin(), vertices.end());
  auto rev = BruteForceLogPartitionTrigger(tree, vertices, M);
  CHECK(fwd.value == doctest::Approx(rev.value).epsilon(1e-12));

  // Softmax shift invariance: on a branching-1 tree every deterministic
  // policy reaches exactly one infoset per layer, so ell + delta shifts all
  // <v, ell> by horizon * delta: value drops by it, gradient is unchanged.
  GameTree chain = RandomTree(9, 3, 1, 2);
  auto policies = EnumeratePolicies(chain);
  std::vector<double> loss(chain.num_pairs());
  for (double& v : loss) v = rng.NextDouble();
  auto base = BruteForceLogPartitionVertex(policies, loss);
  std::vector<double> shifted = loss;
  double delta = 0.37;
  for (double& v : shifted) v += delta;
  auto moved = BruteForceLogPartitionVertex(policies, shifted);
  CHECK(moved.value ==
        doctest::Approx(base.value - chain.horizon * delta).epsilon(1e-10));
  for (int p = 0; p < chain.num_pairs(); ++p) {
    CHECK(moved.neg_grad[p] == doctest::Approx(base.neg_grad[p]).epsilon(1e-10));
  }
}

}  // namespace
}  // namespace tram
