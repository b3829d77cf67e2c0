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

#include "core/game_tree.h"

#include <cmath>

#include "core/checks.h"
#include "doctest.h"

namespace tram {
namespace {

GameSpec Depth1Spec(int actions = 2) {
  GameSpec spec;
  spec.num_actions = actions;
  spec.layers = {{"x1"}};
  return spec;
}

GameSpec Depth2Spec() {
  GameSpec spec;
  spec.num_actions = 2;
  spec.layers = {{"x1"}, {"x2a", "x2b"}};
  spec.children[{"x1", 0}] = {"x2a"};
  spec.children[{"x1", 1}] = {"x2b"};
  return spec;
}

TEST_CASE("build_game smallest valid tree") {
  GameTree tree = BuildGame(Depth1Spec());
  CHECK(tree.num_infosets == 1);
  CHECK(tree.num_pairs() == 2);
  CHECK(tree.horizon == 1);
}

TEST_CASE("build_game depth-2 parent sequences") {
  GameTree tree = BuildGame(Depth2Spec());
  CHECK(tree.num_infosets == 3);
  CHECK(tree.parent_pair[1] == tree.pair_index(0, 0));
  CHECK(tree.parent_pair[2] == tree.pair_index(0, 1));
}

TEST_CASE("build_game rejects non-partition children") {
  GameSpec spec = Depth2Spec();
  spec.children[{"x1", 1}] = {"x2a"};  // x2a listed under both actions
  CHECK_THROWS_AS(BuildGame(spec), TramError);
}

TEST_CASE("build_game rejects dangling children") {
  GameSpec spec = Depth2Spec();
  spec.children[{"x1", 0}] = {"x2a", "ghost"};
  CHECK_THROWS_AS(BuildGame(spec), TramError);
}

TEST_CASE("build_game rejects unreachable layer members") {
  GameSpec spec = Depth2Spec();
  spec.layers[1].push_back("orphan");
  CHECK_THROWS_AS(BuildGame(spec), TramError);
}

TEST_CASE("seq_to_behavioral direct normalization") {
  GameTree tree = BuildGame(Depth1Spec());
  SequencePolicy policy{{0.3, 0.7}, -1};
  auto b = SeqToBehavioral(tree, policy);
  CHECK(b[0] == doctest::Approx(0.3));
  CHECK(b[1] == doctest::Approx(0.7));

  SequencePolicy det{{1.0, 0.0}, -1};
  auto bd = SeqToBehavioral(tree, det);
  CHECK(bd[0] == 1.0);
  CHECK(bd[1] == 0.0);
}

TEST_CASE("seq_to_behavioral zero-reach convention") {
  GameTree tree = BuildGame(Depth2Spec());
  // Root plays action 1, so x2a is unreached and gets uniform.
  SequencePolicy policy{{0.0, 1.0, 0.0, 0.0, 0.5, 0.5}, -1};
  auto b = SeqToBehavioral(tree, policy);
  CHECK(b[tree.pair_index(1, 0)] == doctest::Approx(0.5));
  CHECK(b[tree.pair_index(1, 1)] == doctest::Approx(0.5));
}

TEST_CASE("seq_to_behavioral rejects negative entries") {
  GameTree tree = BuildGame(Depth1Spec());
  SequencePolicy policy{{-0.1, 1.1}, -1};
  CHECK_THROWS_AS(SeqToBehavioral(tree, policy), TramError);
}

TEST_CASE("behavioral_to_seq uniform products") {
  GameTree tree = BuildGame(Depth2Spec());
  std::vector<double> uniform(tree.num_pairs(), 0.5);
  SequencePolicy seq = BehavioralToSeq(tree, uniform);
  CHECK(seq.values[tree.pair_index(0, 0)] == doctest::Approx(0.5));
  CHECK(seq.values[tree.pair_index(1, 0)] == doctest::Approx(0.25));
  CheckPolicy(tree, seq);
}

TEST_CASE("behavioral_to_seq deterministic unit path") {
  GameTree tree = BuildGame(Depth2Spec());
  std::vector<double> b(tree.num_pairs(), 0.0);
  b[tree.pair_index(0, 0)] = 1.0;
  b[tree.pair_index(1, 1)] = 1.0;
  b[tree.pair_index(2, 0)] = 1.0;
  SequencePolicy seq = BehavioralToSeq(tree, b);
  CHECK(seq.values[tree.pair_index(0, 0)] == 1.0);
  CHECK(seq.values[tree.pair_index(1, 1)] == 1.0);
  CHECK(seq.values[tree.pair_index(2, 0)] == 0.0);  // unreached branch
  CheckPolicy(tree, seq);
}

TEST_CASE("behavioral_to_seq subtree root") {
  GameTree tree = BuildGame(Depth2Spec());
  std::vector<double> uniform(tree.num_pairs(), 0.5);
  SequencePolicy seq = BehavioralToSeq(tree, uniform, /*root=*/1);
  CHECK(seq.values[tree.pair_index(1, 0)] == doctest::Approx(0.5));
  CHECK(seq.values[tree.pair_index(0, 0)] == 0.0);
  CheckPolicy(tree, seq);
}

TEST_CASE("behavioral_to_seq rejects off-simplex rows") {
  GameTree tree = BuildGame(Depth1Spec());
  std::vector<double> b = {0.5, 0.6};
  CHECK_THROWS_AS(BehavioralToSeq(tree, b), TramError);
}

TEST_CASE("balanced policy depth-1 is uniform") {
  GameTree tree = BuildGame(Depth1Spec());
  BalancedPolicy bp = MakeBalancedPolicy(tree, 0);
  CHECK(bp.behavioral[0] == doctest::Approx(0.5));
  CHECK(bp.seq[1] == doctest::Approx(0.5));
}

TEST_CASE("balanced policy depth-2 hand value") {
  // One child per (x1, a): layer-2 targets give mu*_1(a|x1) = 1/2 and the
  // sequence value at (x2a, a') is 1/4.
  GameTree tree = BuildGame(Depth2Spec());
  BalancedPolicy bp = MakeBalancedPolicy(tree, 1);
  CHECK(bp.behavioral[tree.pair_index(0, 0)] == doctest::Approx(0.5));
  CHECK(bp.seq[tree.pair_index(1, 0)] == doctest::Approx(0.25));
}

TEST_CASE("balancing identity on random trees") {
  Rng rng(99);
  for (uint64_t seed = 0; seed < 6; ++seed) {
    GameTree tree = RandomTree(seed, 3, 2, 2);
    BalancedWeights weights(tree);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> behavioral(tree.num_pairs());
      for (int x = 0; x < tree.num_infosets; ++x) {
        double sum = 0.0;
        for (int a = 0; a < tree.num_actions; ++a) {
          behavioral[tree.pair_index(x, a)] = 0.05 + rng.NextDouble();
          sum += behavioral[tree.pair_index(x, a)];
        }
        for (int a = 0; a < tree.num_actions; ++a) {
          behavioral[tree.pair_index(x, a)] /= sum;
        }
      }
      std::vector<double> mu = BehavioralToSeq(tree, behavioral).values;
      for (int h = 0; h < tree.horizon; ++h) {
        double sum = 0.0;
        for (int x : tree.layers[h]) {
          for (int a = 0; a < tree.num_actions; ++a) {
            int p = tree.pair_index(x, a);
            sum += mu[p] / weights.ForLayer(h).seq[p];
          }
        }
        CHECK(sum == doctest::Approx(double(tree.layers[h].size()) *
                                     tree.num_actions)
                         .epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("subtree balancing identity") {
  // For a subtree rooted at x_g: sum over (x_h, a_h) >= x_g of
  // mu_{g:h} / mu*_{g:h} = |C_h(x_g)| * A.
  Rng rng(101);
  for (uint64_t seed = 0; seed < 4; ++seed) {
    GameTree tree = RandomTree(seed, 3, 2, 2);
    BalancedWeights weights(tree);
    for (int root = 0; root < tree.num_infosets; ++root) {
      std::vector<double> behavioral(tree.num_pairs());
      for (int x = 0; x < tree.num_infosets; ++x) {
        double sum = 0.0;
        for (int a = 0; a < tree.num_actions; ++a) {
          behavioral[tree.pair_index(x, a)] = 0.05 + rng.NextDouble();
          sum += behavioral[tree.pair_index(x, a)];
        }
        for (int a = 0; a < tree.num_actions; ++a) {
          behavioral[tree.pair_index(x, a)] /= sum;
        }
      }
      SequencePolicy sub = BehavioralToSeq(tree, behavioral, root);
      for (int h = tree.layer_of[root]; h < tree.horizon; ++h) {
        double sum = 0.0;
        for (int x : tree.subtree_infosets[root]) {
          if (tree.layer_of[x] != h) continue;
          for (int a = 0; a < tree.num_actions; ++a) {
            int p = tree.pair_index(x, a);
            sum += sub.values[p] / weights.SubtreeReach(root, x);
          }
        }
        double want = double(tree.desc_infoset[root][h]) * tree.num_actions;
        CHECK(sum == doctest::Approx(want).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("balanced reach lower bound") {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    GameTree tree = RandomTree(seed, 3, 3, 2);
    BalancedWeights weights(tree);
    for (int h = 0; h < tree.horizon; ++h) {
      double lower = 1.0 / (tree.layers[h].size() * tree.num_actions);
      for (int x : tree.layers[h]) {
        CHECK(weights.FullReach(x) >= lower - 1e-12);
      }
    }
  }
}

TEST_CASE("descendant counts on tiny trees") {
  GameTree d1 = BuildGame(Depth1Spec());
  CHECK(d1.x_subtree[0] == 1);
  CHECK(d1.pi_l1 == doctest::Approx(1.0));

  GameTree d2 = BuildGame(Depth2Spec());
  CHECK(d2.x_subtree[0] == 3);
  CHECK(d2.pi_l1 == doctest::Approx(2.0));
  DescendantCounts counts = ComputeDescendantCounts(d2);
  CHECK(counts.infoset_counts[0][1] == 2);
  CHECK(counts.pair_counts[d2.pair_index(0, 0)][1] == 1);
}

TEST_CASE("pi l1 norm bounded by X on random trees") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    GameTree tree = RandomTree(seed, 2 + seed % 3, 2, 2);
    CHECK(tree.pi_l1 <= tree.num_infosets + 1e-12);
  }
}

TEST_CASE("random_tree determinism and growth") {
  GameTree a = RandomTree(42, 3, 2, 2);
  GameTree b = RandomTree(42, 3, 2, 2);
  CHECK(a.num_infosets == b.num_infosets);
  for (int q = 0; q < a.num_pairs(); ++q) {
    CHECK(a.children[q] == b.children[q]);
  }
  // branching=1: exactly one child per pair, so X_{h+1} = X_h * A.
  GameTree chain = RandomTree(7, 3, 1, 2);
  CHECK(chain.layers[1].size() == 2);
  CHECK(chain.layers[2].size() == 4);
  chain.Validate();
}

TEST_CASE("random_tree cap enforced") {
  CHECK_THROWS_AS(RandomTree(1, 6, 4, 4, /*cap=*/100), TramError);
}

TEST_CASE("environment validation") {
  GameTree tree = BuildGame(Depth2Spec());
  EpisodeEnvironment env = RandomEnvironment(tree, 3);
  env.Validate(tree);
  env.transition[tree.pair_index(0, 0)][0] = 0.7;  // row no longer sums to 1
  CHECK_THROWS_AS(env.Validate(tree), TramError);
}

TEST_CASE("game json round trip with environment") {
  std::string text = R"({
    "horizon": 2,
    "num_actions": 2,
    "layers": [["x1"], ["x2a", "x2b"]],
    "children": {"x1,0": ["x2a"], "x1,1": ["x2b"]},
    "environment": {
      "initial": {"x1": 1.0},
      "transition": {"x1,0": {"x2a": 1.0}, "x1,1": {"x2b": 1.0}},
      "reward": {"x2a,0": 0.25, "x2a,1": 0.75}
    }
  })";
  GameTree tree = GameTreeFromJsonText(text);
  CHECK(tree.num_infosets == 3);
  auto envs = EnvironmentsFromJsonText(text, tree);
  REQUIRE(envs.size() == 1);
  CHECK(envs[0].mean_reward[tree.pair_index(1, 1)] == doctest::Approx(0.75));
}

}  // namespace
}  // namespace tram
