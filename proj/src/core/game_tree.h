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

#ifndef TRAM_CORE_GAME_TREE_H_
#define TRAM_CORE_GAME_TREE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/rng.h"

namespace tram {

// Tree-form adversarial MDP structure: layered infosets, a uniform action
// count A per infoset, and child sets C(x, a) that partition the next layer.
// Everything is immutable after Finalize() and safe to share across threads.
//
// Conventions used throughout the library:
//   - layers are 0-based (layer h in [0, horizon)),
//   - infosets carry dense global ids in layer order,
//   - an (infoset, action) pair has index x * A + a.
struct GameTree {
  int horizon = 0;
  int num_actions = 0;          // A
  int num_infosets = 0;         // X
  std::vector<std::vector<int>> layers;      // [h] -> infoset ids
  std::vector<int> layer_of;                 // [x] -> layer
  std::vector<std::string> names;            // [x] -> identifier
  std::vector<std::vector<int>> children;    // [pair] -> child infosets (sorted)
  std::vector<int> parent_pair;              // [x] -> pair index, -1 at layer 0

  // Derived tables, filled by Finalize().
  std::vector<std::vector<int>> subtree_infosets;  // [x] -> infosets >= x, preorder
  std::vector<std::vector<int>> subtree_pairs;     // [q] -> pairs >= (x, a)
  std::vector<int> x_subtree;                      // [x] -> X_{>= x}
  // desc_infoset[x][h] = |C_h(x)|, desc_pair[q][h] = |C_h(x, a)| for h >= layer.
  std::vector<std::vector<int>> desc_infoset;
  std::vector<std::vector<int>> desc_pair;
  std::vector<double> pi_l1_subtree;               // [x] -> ||Pi^x||_1
  double pi_l1 = 0.0;                              // ||Pi||_1
  std::vector<double> log_num_vertices_subtree;    // [x] -> log |V^x|
  double log_num_vertices = 0.0;                   // log |V|

  int num_pairs() const { return num_infosets * num_actions; }
  int pair_index(int x, int a) const { return x * num_actions + a; }
  int pair_infoset(int q) const { return q / num_actions; }
  int pair_action(int q) const { return q % num_actions; }

  // True if x is in the subtree rooted at root (x >= root).
  bool InInfosetSubtree(int x, int root) const;
  // True if pair p is in the subtree of pair q (p >= q in the pair order).
  bool InPairSubtree(int p, int q) const;

  void Finalize();
  void Validate() const;
};

// Declarative game description, the parsed form of the JSON game spec.
struct GameSpec {
  int horizon = 0;
  int num_actions = 0;
  std::vector<std::vector<std::string>> layers;
  // Children keyed by (infoset name, action index).
  std::map<std::pair<std::string, int>, std::vector<std::string>> children;
};

GameTree BuildGame(const GameSpec& spec);

// Deterministic generator. Every (x, a) below the last layer receives between
// 1 and `branching` children; errors out if X * A would exceed `cap`.
GameTree RandomTree(uint64_t seed, int num_layers, int branching,
                    int num_actions, int cap = 100000);

// A policy in sequence form. `root < 0` means a policy for the whole tree;
// otherwise a subtree policy rooted at that infoset (zero outside the
// subtree, and the flow at the root sums to 1).
struct SequencePolicy {
  std::vector<double> values;   // length X * A
  int root = -1;

  double at(int q) const { return values[q]; }
};

// Reach value feeding infoset x under `policy`: the parent sequence value,
// or 1 at the policy's root layer.
double ParentFlow(const GameTree& tree, const SequencePolicy& policy, int x);

// Behavioral form mu_h(a | x). Infosets with zero reach get the uniform
// distribution. Entries outside a subtree policy's support are also uniform.
std::vector<double> SeqToBehavioral(const GameTree& tree,
                                    const SequencePolicy& policy);

SequencePolicy BehavioralToSeq(const GameTree& tree,
                               const std::vector<double>& behavioral,
                               int root = -1);

SequencePolicy UniformPolicy(const GameTree& tree, int root = -1);

// Checks nonnegativity, flow conservation, and subtree support; throws with
// a description of the first violation beyond `tol`.
void CheckPolicy(const GameTree& tree, const SequencePolicy& policy,
                 double tol = 1e-10);

// Balanced exploration policy for a target layer h: at layers before h it
// plays actions proportionally to their number of layer-h descendants, and
// uniformly from layer h on.
struct BalancedPolicy {
  int target_layer = 0;
  std::vector<double> behavioral;  // [pair]
  std::vector<double> seq;         // [pair], full-tree sequence form
};

BalancedPolicy MakeBalancedPolicy(const GameTree& tree, int target_layer);

// All H balanced policies plus the subtree weights used by the balanced
// log-partition recursion: Weight(g_root, x) = mu^{*,h}_{g:h}(x, a) with
// h = layer(x), which is independent of a.
class BalancedWeights {
 public:
  explicit BalancedWeights(const GameTree& tree);

  const BalancedPolicy& ForLayer(int h) const { return policies_[h]; }
  // mu^{*,h}_{1:h}(x, a) with h = layer(x).
  double FullReach(int x) const;
  // mu^{*,h}_{g:h}(x, a) for x in the subtree rooted at g_root.
  double SubtreeReach(int g_root, int x) const;

 private:
  const GameTree* tree_;
  std::vector<BalancedPolicy> policies_;
};

// Bundled descendant-count view returned by the bookkeeping entry point.
struct DescendantCounts {
  std::vector<std::vector<int>> infoset_counts;  // |C_{h'}(x)|
  std::vector<std::vector<int>> pair_counts;     // |C_{h'}(x, a)|
  std::vector<int> x_subtree;                    // X_{>= x}
  double pi_l1 = 0.0;                            // ||Pi||_1
};

DescendantCounts ComputeDescendantCounts(const GameTree& tree);

// Per-episode adversarial environment: initial distribution, transitions
// aligned with tree.children, and per-pair reward models on [0, 1].
struct DiscreteRewardDist {
  std::vector<double> probs;
  std::vector<double> values;
};

struct EpisodeEnvironment {
  enum class RewardKind { kBernoulli, kFixed, kDiscrete };

  std::vector<double> initial;                  // [x], support on layer 0
  std::vector<std::vector<double>> transition;  // [q] aligned with children[q]
  std::vector<double> mean_reward;              // [q]
  RewardKind reward_kind = RewardKind::kBernoulli;
  std::vector<DiscreteRewardDist> reward_dist;  // used when kDiscrete

  double SampleReward(int q, Rng& rng) const;
  void Validate(const GameTree& tree) const;
};

// One episode: H tuples (infoset, action, reward).
struct Trajectory {
  struct Step {
    int infoset;
    int action;
    double reward;
  };
  std::vector<Step> steps;
};

// JSON front ends for the game spec file format.
GameTree GameTreeFromJsonText(const std::string& text);
// Parses the optional environment block(s); returns empty if absent.
std::vector<EpisodeEnvironment> EnvironmentsFromJsonText(
    const std::string& text, const GameTree& tree);
GameTree LoadGameFile(const std::string& path);
std::vector<EpisodeEnvironment> LoadEnvironmentsFile(const std::string& path,
                                                     const GameTree& tree);

// Deterministic synthetic environment generator for experiments.
EpisodeEnvironment RandomEnvironment(const GameTree& tree, uint64_t seed);

}  // namespace tram

#endif  // TRAM_CORE_GAME_TREE_H_
