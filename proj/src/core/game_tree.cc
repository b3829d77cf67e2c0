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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "core/checks.h"
#include "json.hpp"

namespace tram {

namespace {

constexpr double kRowSumTol = 1e-12;

}  // namespace

bool GameTree::InInfosetSubtree(int x, int root) const {
  while (x >= 0) {
    if (x == root) return true;
    int pq = parent_pair[x];
    x = pq < 0 ? -1 : pair_infoset(pq);
  }
  return false;
}

bool GameTree::InPairSubtree(int p, int q) const {
  if (p == q) return true;
  int x = pair_infoset(p);
  int pq = parent_pair[x];
  while (pq >= 0) {
    if (pq == q) return true;
    pq = parent_pair[pair_infoset(pq)];
  }
  return false;
}

void GameTree::Finalize() {
  const int X = num_infosets;
  const int A = num_actions;
  const int P = X * A;

  subtree_infosets.assign(X, {});
  subtree_pairs.assign(P, {});
  x_subtree.assign(X, 0);
  desc_infoset.assign(X, std::vector<int>(horizon, 0));
  desc_pair.assign(P, std::vector<int>(horizon, 0));
  pi_l1_subtree.assign(X, 0.0);
  log_num_vertices_subtree.assign(X, 0.0);

  // Bottom-up over layers.
  for (int h = horizon - 1; h >= 0; --h) {
    for (int x : layers[h]) {
      desc_infoset[x][h] = 1;
      subtree_infosets[x].push_back(x);
      double best_l1 = 0.0;
      double log_count = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        int q = pair_index(x, a);
        double branch_l1 = 0.0;
        double branch_log = 0.0;
        for (int c : children[q]) {
          for (int hh = h + 1; hh < horizon; ++hh) {
            desc_pair[q][hh] += desc_infoset[c][hh];
          }
          branch_l1 += pi_l1_subtree[c];
          branch_log += log_num_vertices_subtree[c];
        }
        best_l1 = std::max(best_l1, branch_l1);
        log_count = log_count < branch_log
                        ? branch_log + std::log1p(std::exp(log_count - branch_log))
                        : log_count + std::log1p(std::exp(branch_log - log_count));
        for (int hh = h + 1; hh < horizon; ++hh) {
          desc_infoset[x][hh] += desc_pair[q][hh];
        }
        for (int c : children[q]) {
          for (int cx : subtree_infosets[c]) subtree_infosets[x].push_back(cx);
          for (int cx : subtree_infosets[c]) {
            for (int a2 = 0; a2 < A; ++a2) {
              subtree_pairs[q].push_back(pair_index(cx, a2));
            }
          }
        }
      }
      pi_l1_subtree[x] = 1.0 + best_l1;
      log_num_vertices_subtree[x] = log_count;
      for (int a = 0; a < A; ++a) {
        auto& sp = subtree_pairs[pair_index(x, a)];
        sp.insert(sp.begin(), pair_index(x, a));
      }
      int tot = 0;
      for (int hh = h; hh < horizon; ++hh) tot += desc_infoset[x][hh];
      x_subtree[x] = tot;
    }
  }

  pi_l1 = 0.0;
  log_num_vertices = 0.0;
  for (int x : layers[0]) {
    pi_l1 += pi_l1_subtree[x];
    log_num_vertices += log_num_vertices_subtree[x];
  }
}

void GameTree::Validate() const {
  TRAM_CHECK_MSG(horizon >= 1, "horizon must be >= 1");
  TRAM_CHECK_MSG(num_actions >= 1, "num_actions must be >= 1");
  TRAM_CHECK_MSG(static_cast<int>(layers.size()) == horizon,
                 "layer count does not match horizon");
  int counted = 0;
  for (int h = 0; h < horizon; ++h) {
    for (int x : layers[h]) {
      TRAM_CHECK_MSG(layer_of[x] == h, "inconsistent layer assignment");
      ++counted;
    }
  }
  TRAM_CHECK_MSG(counted == num_infosets, "X != sum of layer sizes");

  // Children must partition the next layer, and parent_pair must agree.
  std::vector<int> seen(num_infosets, -1);
  for (int h = 0; h + 1 < horizon; ++h) {
    for (int x : layers[h]) {
      for (int a = 0; a < num_actions; ++a) {
        int q = pair_index(x, a);
        for (int c : children[q]) {
          TRAM_CHECK_MSG(c >= 0 && c < num_infosets,
                         "dangling child reference at " + names[x]);
          TRAM_CHECK_MSG(layer_of[c] == h + 1,
                         "child " + names[c] + " not in the next layer");
          TRAM_CHECK_MSG(seen[c] < 0, "infoset " + names[c] +
                                          " listed under two parents: "
                                          "children sets are not a partition");
          seen[c] = q;
          TRAM_CHECK_MSG(parent_pair[c] == q,
                         "parent_seq inconsistent at " + names[c]);
        }
      }
    }
    for (int c : layers[h + 1]) {
      TRAM_CHECK_MSG(seen[c] >= 0, "infoset " + names[c] +
                                       " unreachable: children sets are not "
                                       "a partition of its layer");
    }
  }
  for (int x : layers[0]) {
    TRAM_CHECK_MSG(parent_pair[x] < 0, "layer-1 infoset with a parent");
  }
  // Last-layer pairs must be childless.
  for (int x : layers[horizon - 1]) {
    for (int a = 0; a < num_actions; ++a) {
      TRAM_CHECK_MSG(children[pair_index(x, a)].empty(),
                     "last-layer pair with children");
    }
  }
}

GameTree BuildGame(const GameSpec& spec) {
  GameTree tree;
  tree.horizon = static_cast<int>(spec.layers.size());
  TRAM_CHECK_MSG(tree.horizon >= 1, "game spec has no layers");
  TRAM_CHECK_MSG(spec.num_actions >= 1, "game spec needs num_actions >= 1");
  tree.num_actions = spec.num_actions;

  std::map<std::string, int> id_of;
  tree.layers.resize(tree.horizon);
  for (int h = 0; h < tree.horizon; ++h) {
    for (const std::string& name : spec.layers[h]) {
      TRAM_CHECK_MSG(!id_of.count(name),
                     "duplicate infoset identifier: " + name);
      int id = static_cast<int>(tree.names.size());
      id_of[name] = id;
      tree.names.push_back(name);
      tree.layers[h].push_back(id);
      tree.layer_of.push_back(h);
    }
  }
  tree.num_infosets = static_cast<int>(tree.names.size());
  tree.children.assign(tree.num_pairs(), {});
  tree.parent_pair.assign(tree.num_infosets, -1);

  for (const auto& [key, kids] : spec.children) {
    const auto& [parent_name, action] = key;
    auto it = id_of.find(parent_name);
    TRAM_CHECK_MSG(it != id_of.end(),
                   "children map references unknown infoset " + parent_name);
    TRAM_CHECK_MSG(action >= 0 && action < spec.num_actions,
                   "children map references invalid action");
    int q = tree.pair_index(it->second, action);
    for (const std::string& child_name : kids) {
      auto ct = id_of.find(child_name);
      TRAM_CHECK_MSG(ct != id_of.end(),
                     "dangling child reference: " + child_name);
      int c = ct->second;
      TRAM_CHECK_MSG(tree.layer_of[c] == tree.layer_of[it->second] + 1,
                     "child " + child_name + " is not in the next layer");
      TRAM_CHECK_MSG(tree.parent_pair[c] == -1,
                     "infoset " + child_name +
                         " listed under two parents: children sets must "
                         "partition the layer");
      tree.parent_pair[c] = q;
      tree.children[q].push_back(c);
    }
  }
  for (auto& kids : tree.children) std::sort(kids.begin(), kids.end());

  tree.Validate();
  tree.Finalize();
  return tree;
}

GameTree RandomTree(uint64_t seed, int num_layers, int branching,
                    int num_actions, int cap) {
  TRAM_CHECK_MSG(num_layers >= 1 && branching >= 1 && num_actions >= 1,
                 "invalid random tree parameters");
  Rng rng(seed, /*stream=*/0xee);
  GameSpec spec;
  spec.num_actions = num_actions;
  spec.layers.resize(num_layers);
  auto name_of = [](int h, int i) {
    return "L" + std::to_string(h + 1) + "_" + std::to_string(i);
  };
  spec.layers[0].push_back(name_of(0, 0));
  int total = 1;
  for (int h = 0; h + 1 < num_layers; ++h) {
    int next_index = 0;
    for (const std::string& parent : spec.layers[h]) {
      for (int a = 0; a < num_actions; ++a) {
        int kids = 1 + rng.NextInt(branching);
        std::vector<std::string> names;
        for (int k = 0; k < kids; ++k) {
          names.push_back(name_of(h + 1, next_index++));
        }
        total += kids;
        TRAM_CHECK_MSG(total * num_actions <= cap,
                       "random tree exceeds the configured X*A cap");
        spec.children[{parent, a}] = names;
        for (auto& n : names) spec.layers[h + 1].push_back(n);
      }
    }
  }
  return BuildGame(spec);
}

double ParentFlow(const GameTree& tree, const SequencePolicy& policy, int x) {
  if (policy.root >= 0) {
    if (x == policy.root) return 1.0;
  } else if (tree.layer_of[x] == 0) {
    return 1.0;
  }
  int pq = tree.parent_pair[x];
  TRAM_CHECK(pq >= 0);
  return policy.values[pq];
}

std::vector<double> SeqToBehavioral(const GameTree& tree,
                                    const SequencePolicy& policy) {
  const int A = tree.num_actions;
  for (double v : policy.values) {
    TRAM_CHECK_MSG(v >= -1e-15, "sequence policy has a negative entry");
  }
  std::vector<double> behavioral(tree.num_pairs(), 1.0 / A);
  for (int x = 0; x < tree.num_infosets; ++x) {
    double total = 0.0;
    for (int a = 0; a < A; ++a) total += policy.values[tree.pair_index(x, a)];
    if (total <= 0.0) continue;  // zero reach: keep uniform
    for (int a = 0; a < A; ++a) {
      behavioral[tree.pair_index(x, a)] =
          policy.values[tree.pair_index(x, a)] / total;
    }
  }
  return behavioral;
}

SequencePolicy BehavioralToSeq(const GameTree& tree,
                               const std::vector<double>& behavioral,
                               int root) {
  const int A = tree.num_actions;
  for (int x = 0; x < tree.num_infosets; ++x) {
    double sum = 0.0;
    for (int a = 0; a < A; ++a) sum += behavioral[tree.pair_index(x, a)];
    TRAM_CHECK_MSG(std::abs(sum - 1.0) <= kRowSumTol,
                   "behavioral distribution at " + tree.names[x] +
                       " is not on the simplex");
  }
  SequencePolicy policy;
  policy.root = root;
  policy.values.assign(tree.num_pairs(), 0.0);
  auto fill = [&](auto&& self, int x, double reach) -> void {
    for (int a = 0; a < A; ++a) {
      int q = tree.pair_index(x, a);
      double v = reach * behavioral[q];
      policy.values[q] = v;
      for (int c : tree.children[q]) self(self, c, v);
    }
  };
  if (root >= 0) {
    fill(fill, root, 1.0);
  } else {
    for (int x : tree.layers[0]) fill(fill, x, 1.0);
  }
  return policy;
}

SequencePolicy UniformPolicy(const GameTree& tree, int root) {
  std::vector<double> behavioral(tree.num_pairs(), 1.0 / tree.num_actions);
  return BehavioralToSeq(tree, behavioral, root);
}

void CheckPolicy(const GameTree& tree, const SequencePolicy& policy,
                 double tol) {
  TRAM_CHECK_EQ(static_cast<int>(policy.values.size()), tree.num_pairs());
  for (int q = 0; q < tree.num_pairs(); ++q) {
    TRAM_CHECK_MSG(policy.values[q] >= -tol,
                   "negative sequence-form entry at pair " + std::to_string(q));
  }
  if (policy.root >= 0) {
    for (int x = 0; x < tree.num_infosets; ++x) {
      if (tree.InInfosetSubtree(x, policy.root)) continue;
      for (int a = 0; a < tree.num_actions; ++a) {
        TRAM_CHECK_MSG(std::abs(policy.values[tree.pair_index(x, a)]) <= tol,
                       "subtree policy has support outside its subtree");
      }
    }
  }
  auto flow_at = [&](int x) {
    double sum = 0.0;
    for (int a = 0; a < tree.num_actions; ++a) {
      sum += policy.values[tree.pair_index(x, a)];
    }
    double expect = ParentFlow(tree, policy, x);
    TRAM_CHECK_MSG(std::abs(sum - expect) <= tol,
                   "flow conservation violated at " + tree.names[x] + " (" +
                       std::to_string(sum) + " vs " + std::to_string(expect) +
                       ")");
  };
  if (policy.root >= 0) {
    for (int x : tree.subtree_infosets[policy.root]) flow_at(x);
  } else {
    for (int x = 0; x < tree.num_infosets; ++x) flow_at(x);
  }
}

BalancedPolicy MakeBalancedPolicy(const GameTree& tree, int target_layer) {
  TRAM_CHECK_MSG(target_layer >= 0 && target_layer < tree.horizon,
                 "invalid balanced policy target layer");
  const int A = tree.num_actions;
  BalancedPolicy bp;
  bp.target_layer = target_layer;
  bp.behavioral.assign(tree.num_pairs(), 1.0 / A);
  for (int h = 0; h < target_layer; ++h) {
    for (int x : tree.layers[h]) {
      int total = tree.desc_infoset[x][target_layer];
      if (total == 0) continue;  // no layer-h descendants: keep uniform
      for (int a = 0; a < A; ++a) {
        int q = tree.pair_index(x, a);
        bp.behavioral[q] =
            static_cast<double>(tree.desc_pair[q][target_layer]) / total;
      }
    }
  }
  bp.seq = BehavioralToSeq(tree, bp.behavioral).values;
  return bp;
}

BalancedWeights::BalancedWeights(const GameTree& tree) : tree_(&tree) {
  policies_.reserve(tree.horizon);
  for (int h = 0; h < tree.horizon; ++h) {
    policies_.push_back(MakeBalancedPolicy(tree, h));
  }
  // The recursion weight must not depend on the action. With a uniform A
  // this holds by construction; assert it anyway.
  for (int x = 0; x < tree.num_infosets; ++x) {
    int h = tree.layer_of[x];
    double v0 = policies_[h].seq[tree.pair_index(x, 0)];
    for (int a = 1; a < tree.num_actions; ++a) {
      TRAM_CHECK_MSG(
          std::abs(policies_[h].seq[tree.pair_index(x, a)] - v0) <= 1e-12,
          "balanced sequence weight depends on the action");
    }
  }
}

double BalancedWeights::FullReach(int x) const {
  int h = tree_->layer_of[x];
  return policies_[h].seq[tree_->pair_index(x, 0)];
}

double BalancedWeights::SubtreeReach(int g_root, int x) const {
  int h = tree_->layer_of[x];
  double denom = 1.0;
  int pq = tree_->parent_pair[g_root];
  if (pq >= 0) denom = policies_[h].seq[pq];
  TRAM_CHECK_MSG(denom > 0.0, "balanced reach denominator vanished");
  return policies_[h].seq[tree_->pair_index(x, 0)] / denom;
}

DescendantCounts ComputeDescendantCounts(const GameTree& tree) {
  DescendantCounts out;
  out.infoset_counts = tree.desc_infoset;
  out.pair_counts = tree.desc_pair;
  out.x_subtree = tree.x_subtree;
  out.pi_l1 = tree.pi_l1;
  return out;
}

double EpisodeEnvironment::SampleReward(int q, Rng& rng) const {
  switch (reward_kind) {
    case RewardKind::kBernoulli:
      return rng.NextDouble() < mean_reward[q] ? 1.0 : 0.0;
    case RewardKind::kFixed:
      return mean_reward[q];
    case RewardKind::kDiscrete: {
      const DiscreteRewardDist& d = reward_dist[q];
      if (d.values.empty()) return mean_reward[q];
      int i = rng.SampleIndex(d.probs);
      return d.values[i];
    }
  }
  return 0.0;
}

void EpisodeEnvironment::Validate(const GameTree& tree) const {
  double init_sum = 0.0;
  for (int x = 0; x < tree.num_infosets; ++x) {
    if (tree.layer_of[x] != 0) {
      TRAM_CHECK_MSG(initial[x] == 0.0,
                     "initial distribution has mass off layer 1");
    }
    TRAM_CHECK(initial[x] >= 0.0);
    init_sum += initial[x];
  }
  TRAM_CHECK_MSG(std::abs(init_sum - 1.0) <= kRowSumTol,
                 "initial distribution does not sum to 1");
  for (int q = 0; q < tree.num_pairs(); ++q) {
    TRAM_CHECK_MSG(mean_reward[q] >= 0.0 && mean_reward[q] <= 1.0,
                   "mean reward outside [0, 1]");
    if (tree.children[q].empty()) continue;
    TRAM_CHECK_EQ(transition[q].size(), tree.children[q].size());
    double sum = 0.0;
    for (double p : transition[q]) {
      TRAM_CHECK(p >= 0.0);
      sum += p;
    }
    TRAM_CHECK_MSG(std::abs(sum - 1.0) <= kRowSumTol,
                   "transition row does not sum to 1");
  }
}

namespace {

using nlohmann::json;

GameSpec SpecFromJson(const json& j) {
  GameSpec spec;
  TRAM_CHECK_MSG(j.contains("layers") && j.contains("num_actions"),
                 "game spec needs 'layers' and 'num_actions'");
  spec.num_actions = j.at("num_actions").get<int>();
  for (const auto& layer : j.at("layers")) {
    spec.layers.push_back(layer.get<std::vector<std::string>>());
  }
  spec.horizon = static_cast<int>(spec.layers.size());
  if (j.contains("horizon")) {
    TRAM_CHECK_MSG(j.at("horizon").get<int>() == spec.horizon,
                   "declared horizon does not match the number of layers");
  }
  if (j.contains("children")) {
    for (const auto& [key, value] : j.at("children").items()) {
      auto comma = key.rfind(',');
      TRAM_CHECK_MSG(comma != std::string::npos,
                     "children key must look like 'infoset,action'");
      std::string name = key.substr(0, comma);
      int action = std::stoi(key.substr(comma + 1));
      spec.children[{name, action}] = value.get<std::vector<std::string>>();
    }
  }
  return spec;
}

}  // namespace

GameTree GameTreeFromJsonText(const std::string& text) {
  json j = json::parse(text);
  return BuildGame(SpecFromJson(j));
}

std::vector<EpisodeEnvironment> EnvironmentsFromJsonText(
    const std::string& text, const GameTree& tree) {
  json j = json::parse(text);
  std::vector<json> blocks;
  if (j.contains("environment")) blocks.push_back(j.at("environment"));
  if (j.contains("environment_schedule")) {
    for (const auto& e : j.at("environment_schedule")) blocks.push_back(e);
  }
  std::map<std::string, int> id_of;
  for (int x = 0; x < tree.num_infosets; ++x) id_of[tree.names[x]] = x;

  std::vector<EpisodeEnvironment> envs;
  for (const json& b : blocks) {
    EpisodeEnvironment env;
    env.initial.assign(tree.num_infosets, 0.0);
    env.transition.assign(tree.num_pairs(), {});
    env.mean_reward.assign(tree.num_pairs(), 0.0);
    env.reward_kind = EpisodeEnvironment::RewardKind::kBernoulli;
    for (const auto& [name, p] : b.at("initial").items()) {
      TRAM_CHECK_MSG(id_of.count(name), "unknown infoset in initial: " + name);
      env.initial[id_of[name]] = p.get<double>();
    }
    for (int q = 0; q < tree.num_pairs(); ++q) {
      env.transition[q].assign(tree.children[q].size(), 0.0);
    }
    if (b.contains("transition")) {
      for (const auto& [key, row] : b.at("transition").items()) {
        auto comma = key.rfind(',');
        std::string name = key.substr(0, comma);
        int action = std::stoi(key.substr(comma + 1));
        TRAM_CHECK_MSG(id_of.count(name),
                       "unknown infoset in transition: " + name);
        int q = tree.pair_index(id_of[name], action);
        for (const auto& [child, p] : row.items()) {
          TRAM_CHECK_MSG(id_of.count(child),
                         "transition references unknown child " + child);
          int c = id_of[child];
          auto it = std::find(tree.children[q].begin(), tree.children[q].end(), c);
          TRAM_CHECK_MSG(it != tree.children[q].end(),
                         "transition mass on " + child +
                             " which is not a declared child");
          env.transition[q][it - tree.children[q].begin()] = p.get<double>();
        }
      }
    }
    if (b.contains("reward")) {
      for (const auto& [key, r] : b.at("reward").items()) {
        auto comma = key.rfind(',');
        std::string name = key.substr(0, comma);
        int action = std::stoi(key.substr(comma + 1));
        TRAM_CHECK_MSG(id_of.count(name), "unknown infoset in reward: " + name);
        env.mean_reward[tree.pair_index(id_of[name], action)] = r.get<double>();
      }
    }
    env.Validate(tree);
    envs.push_back(std::move(env));
  }
  return envs;
}

GameTree LoadGameFile(const std::string& path) {
  std::ifstream in(path);
  TRAM_CHECK_MSG(in.good(), "cannot open game file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return GameTreeFromJsonText(buf.str());
}

std::vector<EpisodeEnvironment> LoadEnvironmentsFile(const std::string& path,
                                                     const GameTree& tree) {
  std::ifstream in(path);
  TRAM_CHECK_MSG(in.good(), "cannot open game file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return EnvironmentsFromJsonText(buf.str(), tree);
}

EpisodeEnvironment RandomEnvironment(const GameTree& tree, uint64_t seed) {
  Rng rng(seed, /*stream=*/0xe0f);
  EpisodeEnvironment env;
  env.initial.assign(tree.num_infosets, 0.0);
  env.transition.assign(tree.num_pairs(), {});
  env.mean_reward.assign(tree.num_pairs(), 0.0);
  env.reward_kind = EpisodeEnvironment::RewardKind::kBernoulli;

  double total = 0.0;
  for (int x : tree.layers[0]) {
    env.initial[x] = 0.1 + rng.NextDouble();
    total += env.initial[x];
  }
  for (int x : tree.layers[0]) env.initial[x] /= total;

  for (int q = 0; q < tree.num_pairs(); ++q) {
    env.mean_reward[q] = rng.NextDouble();
    if (tree.children[q].empty()) continue;
    env.transition[q].resize(tree.children[q].size());
    double sum = 0.0;
    for (double& p : env.transition[q]) {
      p = 0.1 + rng.NextDouble();
      sum += p;
    }
    for (double& p : env.transition[q]) p /= sum;
  }
  env.Validate(tree);
  return env;
}

}  // namespace tram
