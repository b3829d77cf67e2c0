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

#ifndef TRAM_CORE_EFG_H_
#define TRAM_CORE_EFG_H_

#include <array>
#include <string>
#include <vector>

#include "core/game_tree.h"

namespace tram {

// Two-player zero-sum extensive-form game with perfect recall, given as an
// explicit game tree over world nodes. Payoffs are for player 0; player 1
// receives the negation. Every root-to-terminal path must contain exactly
// `decision_horizon(i)` decision nodes of player i, so that each player's
// infoset structure forms a layered tree.
struct Efg {
  struct Node {
    enum class Kind { kChance, kDecision, kTerminal };
    Kind kind = Kind::kTerminal;
    int player = -1;    // decision nodes
    int infoset = -1;   // per-player infoset id (dense, assigned by layer)
    std::vector<double> chance_probs;   // chance nodes
    std::vector<int> chance_children;
    std::vector<int> action_children;   // decision nodes, one per action
    double payoff = 0.0;                // terminal nodes, player-0 payoff
  };

  std::vector<Node> nodes;  // nodes[0] is the root
  std::array<int, 2> num_actions = {0, 0};
  std::array<std::vector<std::string>, 2> infoset_names;
  double payoff_min = 0.0;
  double payoff_max = 1.0;

  int AddChance(const std::vector<double>& probs);
  int AddDecision(int player, const std::string& infoset_name);
  int AddTerminal(double payoff);
  void SetChanceChild(int node, int branch, int child);
  void SetActionChild(int node, int action, int child);

  // Player-i reward on [0, 1]: (payoff - min) / (max - min), negated scale
  // for player 1 so the game stays zero-sum.
  double NormalizedReward(int player, double payoff) const;
};

// The infoset tree of one player, together with bookkeeping used by the
// reduction (which world nodes belong to which infoset).
struct EfgPlayerView {
  GameTree tree;
  // World decision nodes per tree infoset.
  std::vector<std::vector<int>> infoset_nodes;
};

EfgPlayerView BuildPlayerView(const Efg& efg, int player);

// Reduces the EFG to the tree-form adversarial MDP faced by `player` when
// the opponent plays the behavioral policy `opponent_behavioral` (indexed by
// the opponent view's pair indices). Unreachable branches (opponent
// probability zero) get uniform transitions and zero reward.
EpisodeEnvironment ReduceEfg(const Efg& efg, const EfgPlayerView& view,
                             int player, const EfgPlayerView& opponent_view,
                             const std::vector<double>& opponent_behavioral);

// Expected player-0 payoff (original scale) under behavioral policies.
double EfgExpectedPayoff(const Efg& efg,
                         const std::array<const EfgPlayerView*, 2>& views,
                         const std::vector<double>& behavioral0,
                         const std::vector<double>& behavioral1);

// Samples one world episode under the given behavioral policies; returns the
// per-player trajectories over their own infoset trees (shared coupling).
std::array<Trajectory, 2> SampleEfgEpisode(
    const Efg& efg, const std::array<const EfgPlayerView*, 2>& views,
    const std::vector<double>& behavioral0,
    const std::vector<double>& behavioral1, Rng& rng);

// Standard 3-card Kuhn poker, padded so that every path has exactly two
// player-0 decisions and one player-1 decision.
Efg KuhnPoker();

}  // namespace tram

#endif  // TRAM_CORE_EFG_H_
