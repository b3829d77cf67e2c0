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

#include "core/efg.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "core/checks.h"

namespace tram {

namespace {
constexpr double kReachTol = 1e-14;
}

int Efg::AddChance(const std::vector<double>& probs) {
  Node n;
  n.kind = Node::Kind::kChance;
  n.chance_probs = probs;
  n.chance_children.assign(probs.size(), -1);
  nodes.push_back(std::move(n));
  return static_cast<int>(nodes.size()) - 1;
}

int Efg::AddDecision(int player, const std::string& infoset_name) {
  Node n;
  n.kind = Node::Kind::kDecision;
  n.player = player;
  auto& names = infoset_names[player];
  auto it = std::find(names.begin(), names.end(), infoset_name);
  if (it == names.end()) {
    n.infoset = static_cast<int>(names.size());
    names.push_back(infoset_name);
  } else {
    n.infoset = static_cast<int>(it - names.begin());
  }
  n.action_children.assign(num_actions[player], -1);
  nodes.push_back(std::move(n));
  return static_cast<int>(nodes.size()) - 1;
}

int Efg::AddTerminal(double payoff) {
  Node n;
  n.kind = Node::Kind::kTerminal;
  n.payoff = payoff;
  nodes.push_back(std::move(n));
  return static_cast<int>(nodes.size()) - 1;
}

void Efg::SetChanceChild(int node, int branch, int child) {
  nodes[node].chance_children[branch] = child;
}

void Efg::SetActionChild(int node, int action, int child) {
  nodes[node].action_children[action] = child;
}

double Efg::NormalizedReward(int player, double payoff) const {
  double span = payoff_max - payoff_min;
  TRAM_CHECK(span > 0);
  double r0 = (payoff - payoff_min) / span;
  return player == 0 ? r0 : 1.0 - r0;
}

EfgPlayerView BuildPlayerView(const Efg& efg, int player) {
  const int num_infosets = static_cast<int>(efg.infoset_names[player].size());
  std::vector<int> layer_of_infoset(num_infosets, -1);
  std::map<std::pair<int, int>, std::set<int>> child_sets;  // (infoset,a) -> kids
  std::map<int, std::pair<int, int>> parent_of;             // infoset -> (inf,a)
  int horizon = -1;

  // One DFS collects layers, child relations, and validates that every path
  // holds the same number of own decisions.
  auto walk = [&](auto&& self, int node_id, int depth,
                  std::pair<int, int> last_own) -> void {
    const Efg::Node& n = efg.nodes[node_id];
    switch (n.kind) {
      case Efg::Node::Kind::kTerminal: {
        TRAM_CHECK_MSG(horizon == -1 || horizon == depth,
                       "paths disagree on the player's decision count");
        horizon = depth;
        return;
      }
      case Efg::Node::Kind::kChance: {
        for (int c : n.chance_children) self(self, c, depth, last_own);
        return;
      }
      case Efg::Node::Kind::kDecision: {
        if (n.player != player) {
          for (int c : n.action_children) self(self, c, depth, last_own);
          return;
        }
        TRAM_CHECK_MSG(
            layer_of_infoset[n.infoset] == -1 ||
                layer_of_infoset[n.infoset] == depth,
            "infoset appears at two depths: perfect recall violated");
        layer_of_infoset[n.infoset] = depth;
        if (last_own.first >= 0) {
          auto it = parent_of.find(n.infoset);
          TRAM_CHECK_MSG(it == parent_of.end() || it->second == last_own,
                         "infoset has two distinct preceding sequences: "
                         "perfect recall violated");
          parent_of[n.infoset] = last_own;
          child_sets[last_own].insert(n.infoset);
        } else {
          TRAM_CHECK_MSG(depth == 0, "first own decision not at layer 1");
        }
        for (int a = 0; a < efg.num_actions[player]; ++a) {
          self(self, n.action_children[a], depth + 1, {n.infoset, a});
        }
        return;
      }
    }
  };
  walk(walk, 0, 0, {-1, -1});
  TRAM_CHECK_MSG(horizon >= 1, "player never acts");

  GameSpec spec;
  spec.num_actions = efg.num_actions[player];
  spec.layers.resize(horizon);
  for (int f = 0; f < num_infosets; ++f) {
    TRAM_CHECK_MSG(layer_of_infoset[f] >= 0, "unused infoset declared");
    spec.layers[layer_of_infoset[f]].push_back(efg.infoset_names[player][f]);
  }
  for (const auto& [key, kids] : child_sets) {
    std::vector<std::string> names;
    for (int f : kids) names.push_back(efg.infoset_names[player][f]);
    spec.children[{efg.infoset_names[player][key.first], key.second}] = names;
  }

  EfgPlayerView view;
  view.tree = BuildGame(spec);

  std::map<std::string, int> tree_id;
  for (int x = 0; x < view.tree.num_infosets; ++x) {
    tree_id[view.tree.names[x]] = x;
  }
  view.infoset_nodes.assign(view.tree.num_infosets, {});
  for (int i = 0; i < static_cast<int>(efg.nodes.size()); ++i) {
    const Efg::Node& n = efg.nodes[i];
    if (n.kind == Efg::Node::Kind::kDecision && n.player == player) {
      view.infoset_nodes[tree_id[efg.infoset_names[player][n.infoset]]]
          .push_back(i);
    }
  }
  return view;
}

namespace {

// Chance and opponent reach probability of every world node, with the
// player's own action edges contributing factor 1.
std::vector<double> CoReach(const Efg& efg, int player,
                            const EfgPlayerView& opponent_view,
                            const std::vector<double>& opponent_behavioral) {
  std::map<std::string, int> opp_tree_id;
  for (int x = 0; x < opponent_view.tree.num_infosets; ++x) {
    opp_tree_id[opponent_view.tree.names[x]] = x;
  }
  const int opponent = 1 - player;
  std::vector<double> w(efg.nodes.size(), 0.0);
  auto walk = [&](auto&& self, int id, double reach) -> void {
    w[id] += reach;
    const Efg::Node& n = efg.nodes[id];
    switch (n.kind) {
      case Efg::Node::Kind::kTerminal:
        return;
      case Efg::Node::Kind::kChance:
        for (size_t b = 0; b < n.chance_children.size(); ++b) {
          self(self, n.chance_children[b], reach * n.chance_probs[b]);
        }
        return;
      case Efg::Node::Kind::kDecision:
        if (n.player == player) {
          for (int c : n.action_children) self(self, c, reach);
        } else {
          int y = opp_tree_id[efg.infoset_names[opponent][n.infoset]];
          for (int b = 0; b < efg.num_actions[opponent]; ++b) {
            self(self, n.action_children[b],
                 reach * opponent_behavioral[opponent_view.tree.pair_index(y, b)]);
          }
        }
        return;
    }
  };
  walk(walk, 0, 1.0);
  return w;
}

// Expected normalized reward and terminal value distribution below `node`,
// passing only chance/opponent moves (no own decisions may appear).
void TerminalLaw(const Efg& efg, int player, const EfgPlayerView& opponent_view,
                 const std::vector<double>& opponent_behavioral,
                 const std::map<std::string, int>& opp_tree_id, int node,
                 double prob, std::vector<std::pair<double, double>>* out) {
  const Efg::Node& n = efg.nodes[node];
  const int opponent = 1 - player;
  switch (n.kind) {
    case Efg::Node::Kind::kTerminal:
      out->push_back({prob, efg.NormalizedReward(player, n.payoff)});
      return;
    case Efg::Node::Kind::kChance:
      for (size_t b = 0; b < n.chance_children.size(); ++b) {
        TerminalLaw(efg, player, opponent_view, opponent_behavioral,
                    opp_tree_id, n.chance_children[b], prob * n.chance_probs[b],
                    out);
      }
      return;
    case Efg::Node::Kind::kDecision: {
      TRAM_CHECK_MSG(n.player != player,
                     "own decision below the last own layer");
      int y = opp_tree_id.at(efg.infoset_names[opponent][n.infoset]);
      for (int b = 0; b < efg.num_actions[opponent]; ++b) {
        TerminalLaw(
            efg, player, opponent_view, opponent_behavioral, opp_tree_id,
            n.action_children[b],
            prob * opponent_behavioral[opponent_view.tree.pair_index(y, b)],
            out);
      }
      return;
    }
  }
}

}  // namespace

EpisodeEnvironment ReduceEfg(const Efg& efg, const EfgPlayerView& view,
                             int player, const EfgPlayerView& opponent_view,
                             const std::vector<double>& opponent_behavioral) {
  const GameTree& tree = view.tree;
  std::vector<double> w =
      CoReach(efg, player, opponent_view, opponent_behavioral);

  std::map<std::string, int> opp_tree_id;
  for (int x = 0; x < opponent_view.tree.num_infosets; ++x) {
    opp_tree_id[opponent_view.tree.names[x]] = x;
  }

  EpisodeEnvironment env;
  env.initial.assign(tree.num_infosets, 0.0);
  env.transition.assign(tree.num_pairs(), {});
  env.mean_reward.assign(tree.num_pairs(), 0.0);
  env.reward_kind = EpisodeEnvironment::RewardKind::kDiscrete;
  env.reward_dist.assign(tree.num_pairs(), {});

  std::vector<double> infoset_mass(tree.num_infosets, 0.0);
  for (int x = 0; x < tree.num_infosets; ++x) {
    for (int n : view.infoset_nodes[x]) infoset_mass[x] += w[n];
  }
  for (int x : tree.layers[0]) env.initial[x] = infoset_mass[x];

  for (int x = 0; x < tree.num_infosets; ++x) {
    bool reachable = infoset_mass[x] > kReachTol;
    for (int a = 0; a < tree.num_actions; ++a) {
      int q = tree.pair_index(x, a);
      if (!tree.children[q].empty()) {
        env.transition[q].assign(tree.children[q].size(), 0.0);
        if (reachable) {
          for (size_t ci = 0; ci < tree.children[q].size(); ++ci) {
            env.transition[q][ci] =
                infoset_mass[tree.children[q][ci]] / infoset_mass[x];
          }
        } else {
          // Unreachable branch: uniform transitions, zero reward.
          for (double& p : env.transition[q]) {
            p = 1.0 / tree.children[q].size();
          }
        }
      }
      if (tree.layer_of[x] == tree.horizon - 1 && reachable) {
        std::vector<std::pair<double, double>> law;
        for (int n : view.infoset_nodes[x]) {
          TerminalLaw(efg, player, opponent_view, opponent_behavioral,
                      opp_tree_id, efg.nodes[n].action_children[a], w[n], &law);
        }
        double mean = 0.0;
        DiscreteRewardDist dist;
        for (const auto& [p, r] : law) {
          double pn = p / infoset_mass[x];
          mean += pn * r;
          dist.probs.push_back(pn);
          dist.values.push_back(r);
        }
        env.mean_reward[q] = std::min(1.0, std::max(0.0, mean));
        env.reward_dist[q] = std::move(dist);
      }
    }
  }
  env.Validate(tree);
  return env;
}

double EfgExpectedPayoff(const Efg& efg,
                         const std::array<const EfgPlayerView*, 2>& views,
                         const std::vector<double>& behavioral0,
                         const std::vector<double>& behavioral1) {
  std::array<std::map<std::string, int>, 2> tree_id;
  for (int i = 0; i < 2; ++i) {
    for (int x = 0; x < views[i]->tree.num_infosets; ++x) {
      tree_id[i][views[i]->tree.names[x]] = x;
    }
  }
  auto walk = [&](auto&& self, int id) -> double {
    const Efg::Node& n = efg.nodes[id];
    switch (n.kind) {
      case Efg::Node::Kind::kTerminal:
        return n.payoff;
      case Efg::Node::Kind::kChance: {
        double v = 0.0;
        for (size_t b = 0; b < n.chance_children.size(); ++b) {
          v += n.chance_probs[b] * self(self, n.chance_children[b]);
        }
        return v;
      }
      case Efg::Node::Kind::kDecision: {
        int p = n.player;
        const auto& behavioral = p == 0 ? behavioral0 : behavioral1;
        int x = tree_id[p].at(efg.infoset_names[p][n.infoset]);
        double v = 0.0;
        for (int a = 0; a < efg.num_actions[p]; ++a) {
          v += behavioral[views[p]->tree.pair_index(x, a)] *
               self(self, n.action_children[a]);
        }
        return v;
      }
    }
    return 0.0;
  };
  return walk(walk, 0);
}

std::array<Trajectory, 2> SampleEfgEpisode(
    const Efg& efg, const std::array<const EfgPlayerView*, 2>& views,
    const std::vector<double>& behavioral0,
    const std::vector<double>& behavioral1, Rng& rng) {
  std::array<std::map<std::string, int>, 2> tree_id;
  for (int i = 0; i < 2; ++i) {
    for (int x = 0; x < views[i]->tree.num_infosets; ++x) {
      tree_id[i][views[i]->tree.names[x]] = x;
    }
  }
  std::array<Trajectory, 2> trajs;
  int id = 0;
  while (efg.nodes[id].kind != Efg::Node::Kind::kTerminal) {
    const Efg::Node& n = efg.nodes[id];
    if (n.kind == Efg::Node::Kind::kChance) {
      id = n.chance_children[rng.SampleIndex(n.chance_probs)];
      continue;
    }
    int p = n.player;
    const auto& behavioral = p == 0 ? behavioral0 : behavioral1;
    int x = tree_id[p].at(efg.infoset_names[p][n.infoset]);
    std::vector<double> probs(efg.num_actions[p]);
    for (int a = 0; a < efg.num_actions[p]; ++a) {
      probs[a] = behavioral[views[p]->tree.pair_index(x, a)];
    }
    int a = rng.SampleIndex(probs);
    trajs[p].steps.push_back({x, a, 0.0});
    id = n.action_children[a];
  }
  double payoff = efg.nodes[id].payoff;
  for (int p = 0; p < 2; ++p) {
    TRAM_CHECK(!trajs[p].steps.empty());
    trajs[p].steps.back().reward = efg.NormalizedReward(p, payoff);
  }
  return trajs;
}

Efg KuhnPoker() {
  Efg efg;
  efg.num_actions = {2, 2};
  efg.payoff_min = -2.0;
  efg.payoff_max = 2.0;
  const char* card_name[3] = {"J", "Q", "K"};

  std::vector<double> deal_probs(6, 1.0 / 6.0);
  int root = efg.AddChance(deal_probs);

  int branch = 0;
  for (int c0 = 0; c0 < 3; ++c0) {
    for (int c1 = 0; c1 < 3; ++c1) {
      if (c0 == c1) continue;
      double win = c0 > c1 ? 1.0 : -1.0;
      std::string p0 = card_name[c0];
      std::string p1 = card_name[c1];

      int n0 = efg.AddDecision(0, p0);
      efg.SetChanceChild(root, branch++, n0);

      // P0 checks.
      int n1c = efg.AddDecision(1, p1 + "|check");
      efg.SetActionChild(n0, 0, n1c);
      {
        // P1 checks back: showdown for the pot of 1, via a padded P0 turn.
        int pad = efg.AddDecision(0, p0 + ":cc");
        efg.SetActionChild(n1c, 0, pad);
        int t = efg.AddTerminal(win);
        efg.SetActionChild(pad, 0, t);
        efg.SetActionChild(pad, 1, t);
        // P1 bets: P0 decides fold/call.
        int n2 = efg.AddDecision(0, p0 + ":cb");
        efg.SetActionChild(n1c, 1, n2);
        efg.SetActionChild(n2, 0, efg.AddTerminal(-1.0));       // fold
        efg.SetActionChild(n2, 1, efg.AddTerminal(2.0 * win));  // call
      }

      // P0 bets.
      int n1b = efg.AddDecision(1, p1 + "|bet");
      efg.SetActionChild(n0, 1, n1b);
      {
        // P1 folds.
        int pad_f = efg.AddDecision(0, p0 + ":bf");
        efg.SetActionChild(n1b, 0, pad_f);
        int tf = efg.AddTerminal(1.0);
        efg.SetActionChild(pad_f, 0, tf);
        efg.SetActionChild(pad_f, 1, tf);
        // P1 calls.
        int pad_c = efg.AddDecision(0, p0 + ":bc");
        efg.SetActionChild(n1b, 1, pad_c);
        int tc = efg.AddTerminal(2.0 * win);
        efg.SetActionChild(pad_c, 0, tc);
        efg.SetActionChild(pad_c, 1, tc);
      }
    }
  }
  return efg;
}

}  // namespace tram
