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

#include <cmath>

#include "core/checks.h"
#include "doctest.h"

namespace tram {
namespace {

std::vector<double> RandomBehavioral(const GameTree& tree, Rng& rng) {
  std::vector<double> b(tree.num_pairs());
  for (int x = 0; x < tree.num_infosets; ++x) {
    double sum = 0.0;
    for (int a = 0; a < tree.num_actions; ++a) {
      b[tree.pair_index(x, a)] = 0.05 + rng.NextDouble();
      sum += b[tree.pair_index(x, a)];
    }
    for (int a = 0; a < tree.num_actions; ++a) b[tree.pair_index(x, a)] /= sum;
  }
  return b;
}

TEST_CASE("expected loss with zero rewards sums to H along any policy") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    GameTree tree = RandomTree(seed, 3, 2, 2);
    EpisodeEnvironment env = RandomEnvironment(tree, seed);
    for (double& r : env.mean_reward) r = 0.0;
    std::vector<double> loss = ExpectedLoss(tree, env);
    Rng rng(seed, 1);
    std::vector<double> mu =
        BehavioralToSeq(tree, RandomBehavioral(tree, rng)).values;
    double inner = 0.0;
    for (int p = 0; p < tree.num_pairs(); ++p) inner += mu[p] * loss[p];
    CHECK(inner == doctest::Approx(double(tree.horizon)).epsilon(1e-12));

    for (double& r : env.mean_reward) r = 1.0;
    for (double l : ExpectedLoss(tree, env)) CHECK(l == 0.0);
  }
}

TEST_CASE("expected loss layer identity") {
  // sum_{x_h, a_h} mu_{1:h}(x_h, a_h) p(x_h) = 1 for every layer.
  Rng rng(123);
  for (int rep = 0; rep < 50; ++rep) {
    GameTree tree = RandomTree(rep, 2 + rep % 3, 2, 2);
    EpisodeEnvironment env = RandomEnvironment(tree, rep * 7 + 1);
    std::vector<double> reach = EnvReach(tree, env);
    std::vector<double> mu =
        BehavioralToSeq(tree, RandomBehavioral(tree, rng)).values;
    for (int h = 0; h < tree.horizon; ++h) {
      double sum = 0.0;
      for (int x : tree.layers[h]) {
        for (int a = 0; a < tree.num_actions; ++a) {
          sum += mu[tree.pair_index(x, a)] * reach[x];
        }
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("loss inner product equals H minus expected reward (monte carlo)") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    GameTree tree = RandomTree(seed, 3, 2, 2);
    EpisodeEnvironment env = RandomEnvironment(tree, seed + 100);
    Rng prng(seed, 3);
    std::vector<double> behavioral = RandomBehavioral(tree, prng);
    std::vector<double> mu = BehavioralToSeq(tree, behavioral).values;
    std::vector<double> loss = ExpectedLoss(tree, env);
    double inner = 0.0;
    for (int p = 0; p < tree.num_pairs(); ++p) inner += mu[p] * loss[p];

    const long N = 100000;
    double total = 0.0, totalsq = 0.0;
    for (long ep = 1; ep <= N; ++ep) {
      Rng rng(seed, 4, ep);
      Trajectory traj = SampleTrajectory(tree, env, behavioral, rng);
      double r = 0.0;
      for (const auto& s : traj.steps) r += s.reward;
      total += r;
      totalsq += r * r;
    }
    double mean = total / N;
    double var = std::max(0.0, totalsq / N - mean * mean);
    double sigma = std::sqrt(var / N);
    CHECK(std::abs((tree.horizon - mean) - inner) <=
          3 * std::max(sigma, 1e-9));
  }
}

TEST_CASE("trajectories respect children and are seed deterministic") {
  GameTree tree = RandomTree(5, 3, 2, 2);
  EpisodeEnvironment env = RandomEnvironment(tree, 5);
  Rng prng(5, 5);
  std::vector<double> behavioral = RandomBehavioral(tree, prng);
  Rng rng1(9, 0, 1), rng2(9, 0, 1);
  Trajectory a = SampleTrajectory(tree, env, behavioral, rng1);
  Trajectory b = SampleTrajectory(tree, env, behavioral, rng2);
  REQUIRE(a.steps.size() == b.steps.size());
  for (size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].infoset == b.steps[i].infoset);
    CHECK(a.steps[i].action == b.steps[i].action);
    CHECK(a.steps[i].reward == b.steps[i].reward);
    CHECK(tree.layer_of[a.steps[i].infoset] == int(i));
    if (i > 0) {
      int pq = tree.pair_index(a.steps[i - 1].infoset, a.steps[i - 1].action);
      bool is_child = false;
      for (int c : tree.children[pq]) is_child |= (c == a.steps[i].infoset);
      CHECK(is_child);
    }
  }
}

TEST_CASE("deterministic environment and policy give the unique path") {
  GameSpec spec;
  spec.num_actions = 2;
  spec.layers = {{"x1"}, {"x2a", "x2b"}};
  spec.children[{"x1", 0}] = {"x2a"};
  spec.children[{"x1", 1}] = {"x2b"};
  GameTree tree = BuildGame(spec);
  EpisodeEnvironment env;
  env.initial = {1.0, 0.0, 0.0};
  env.transition.assign(tree.num_pairs(), {});
  env.transition[tree.pair_index(0, 0)] = {1.0};
  env.transition[tree.pair_index(0, 1)] = {1.0};
  env.mean_reward.assign(tree.num_pairs(), 0.25);
  env.reward_kind = EpisodeEnvironment::RewardKind::kFixed;
  std::vector<double> det(tree.num_pairs(), 0.0);
  det[tree.pair_index(0, 1)] = 1.0;
  det[tree.pair_index(1, 0)] = 1.0;
  det[tree.pair_index(2, 0)] = 1.0;
  Rng rng(1);
  Trajectory traj = SampleTrajectory(tree, env, det, rng);
  CHECK(traj.steps[0].infoset == 0);
  CHECK(traj.steps[0].action == 1);
  CHECK(traj.steps[1].infoset == 2);
  CHECK(traj.steps[1].action == 0);
  CHECK(traj.steps[1].reward == 0.25);
}

TEST_CASE("ix estimator formula values") {
  GameSpec spec;
  spec.num_actions = 2;
  spec.layers = {{"x1"}};
  GameTree tree = BuildGame(spec);
  Trajectory traj;
  traj.steps = {{0, 0, 0.0}};
  std::vector<double> mu = {0.5, 0.5};
  auto e0 = IxEstimator(tree, traj, mu, 0.0);
  REQUIRE(e0.size() == 1);
  CHECK(e0[0].first == 0);
  CHECK(e0[0].second == doctest::Approx(2.0));
  auto eg = IxEstimator(tree, traj, mu, 0.1);
  CHECK(eg[0].second == doctest::Approx(1.0 / 0.6));
  // Unvisited pairs carry no entry.
  auto dense = SparseToDense(tree.num_pairs(), eg);
  CHECK(dense[1] == 0.0);
}

TEST_CASE("adaptive estimator reduces to plain importance weighting at gamma=0") {
  GameTree tree = RandomTree(6, 3, 2, 2);
  BalancedWeights weights(tree);
  Rng prng(6, 7);
  std::vector<double> behavioral = RandomBehavioral(tree, prng);
  std::vector<double> mu = BehavioralToSeq(tree, behavioral).values;
  TriggerProfile profile;
  profile.lambda.assign(tree.num_pairs(), 1.0 / tree.num_pairs());
  profile.m.assign(tree.num_pairs(), RandomBehavioral(tree, prng));

  EpisodeEnvironment env = RandomEnvironment(tree, 6);
  for (long ep = 1; ep <= 50; ++ep) {
    Rng rng(6, 8, ep);
    Trajectory traj = SampleTrajectory(tree, env, behavioral, rng);
    AdaptiveFamily family =
        AdaptiveEstimator(tree, traj, mu, profile, weights, 0.0);
    auto plain = IxEstimator(tree, traj, mu, 0.0);
    auto plain_dense = SparseToDense(tree.num_pairs(), plain);
    for (int q = 0; q < tree.num_pairs(); ++q) {
      for (const auto& [p, v] : family.per_trigger[q]) {
        CHECK(v == doctest::Approx(plain_dense[p]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("adaptive estimator trigger bonus only inside the subtree") {
  GameTree tree = RandomTree(6, 3, 2, 2);
  BalancedWeights weights(tree);
  Rng prng(6, 9);
  std::vector<double> behavioral = RandomBehavioral(tree, prng);
  std::vector<double> mu = BehavioralToSeq(tree, behavioral).values;
  TriggerProfile profile;
  profile.lambda.assign(tree.num_pairs(), 1.0 / tree.num_pairs());
  profile.m.assign(tree.num_pairs(), RandomBehavioral(tree, prng));

  EpisodeEnvironment env = RandomEnvironment(tree, 16);
  const double gamma = 0.2;
  Rng rng(6, 10, 1);
  Trajectory traj = SampleTrajectory(tree, env, behavioral, rng);
  AdaptiveFamily family =
      AdaptiveEstimator(tree, traj, mu, profile, weights, gamma);
  for (int q = 0; q < tree.num_pairs(); ++q) {
    int root = tree.pair_infoset(q);
    for (const auto& [p, v] : family.per_trigger[q]) {
      int x = tree.pair_infoset(p);
      double reward = 0.0;
      for (const auto& s : traj.steps) {
        if (tree.pair_index(s.infoset, s.action) == p) reward = s.reward;
      }
      if (!tree.InInfosetSubtree(x, root)) {
        // Indicator off: only the balanced bonus remains.
        double want =
            (1.0 - reward) / (mu[p] + gamma * weights.FullReach(x));
        CHECK(v == doctest::Approx(want).epsilon(1e-12));
      } else {
        double plain = (1.0 - reward) / (mu[p] + gamma * weights.FullReach(x));
        CHECK(v <= plain + 1e-15);
      }
    }
  }
}

TEST_CASE("assemble matrix trace identity") {
  // <phi, ell mu^T> == <phi mu, ell> for random triggers.
  GameTree tree = RandomTree(14, 3, 2, 2);
  const int P = tree.num_pairs();
  auto vertices = EnumerateTriggerVertices(tree, 100000);
  Rng rng(14, 11);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> loss(P);
    for (double& v : loss) v = rng.NextDouble();
    std::vector<double> mu =
        BehavioralToSeq(tree, RandomBehavioral(tree, rng)).values;
    LossMatrix m = AssembleMatrix(loss, mu);
    const TriggerVertex& vert = vertices[rng.NextInt(int(vertices.size()))];
    double lhs = m.UntriggeredInner(tree, vert.trigger_pair);
    for (const auto& [p, val] : m.Column(vert.trigger_pair)) {
      lhs += vert.policy[p] * val;
    }
    std::vector<double> phimu = ApplyTriggerVertex(tree, vert, mu);
    double rhs = 0.0;
    for (int p = 0; p < P; ++p) rhs += phimu[p] * loss[p];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("sparse loss matrix round trip and accumulation") {
  LossMatrix m = LossMatrix::Sparse(4);
  m.AddColumnEntry(1, 2, 0.5);
  m.AddColumnEntry(1, 2, 0.25);
  m.AddColumnEntry(3, 0, 1.0);
  CHECK(m.At(2, 1) == doctest::Approx(0.75));
  CHECK(m.At(0, 3) == doctest::Approx(1.0));
  CHECK(m.At(0, 0) == 0.0);
  Eigen::MatrixXd dense = m.Dense();
  CHECK(dense(2, 1) == doctest::Approx(0.75));
  CHECK(dense.sum() == doctest::Approx(1.75));
}

TEST_CASE("ix estimator is unbiased at gamma=0 and downward biased otherwise") {
  GameTree tree = RandomTree(21, 3, 2, 2);
  const int P = tree.num_pairs();
  EpisodeEnvironment env = RandomEnvironment(tree, 21);
  Rng prng(21, 12);
  std::vector<double> behavioral = RandomBehavioral(tree, prng);
  std::vector<double> mu = BehavioralToSeq(tree, behavioral).values;
  std::vector<double> ell = ExpectedLoss(tree, env);

  const long N = 100000;
  const double gamma = 0.05;
  std::vector<double> sum0(P, 0.0), sq0(P, 0.0), sumg(P, 0.0);
  for (long ep = 1; ep <= N; ++ep) {
    Rng rng(21, 13, ep);
    Trajectory traj = SampleTrajectory(tree, env, behavioral, rng);
    for (const auto& [p, v] : IxEstimator(tree, traj, mu, 0.0)) {
      sum0[p] += v;
      sq0[p] += v * v;
    }
    for (const auto& [p, v] : IxEstimator(tree, traj, mu, gamma)) {
      sumg[p] += v;
    }
  }
  for (int p = 0; p < P; ++p) {
    double mean = sum0[p] / N;
    double var = std::max(0.0, sq0[p] / N - mean * mean);
    double se = std::sqrt(var / N);
    CHECK(std::abs(mean - ell[p]) <= 3 * std::max(se, 1e-9));
    // Downward bias under the IX bonus.
    double meang = sumg[p] / N;
    CHECK(meang <= ell[p] + 3 * std::max(se, 1e-9));
  }
}

}  // namespace
}  // namespace tram
