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

#ifndef TRAM_CORE_HARNESS_H_
#define TRAM_CORE_HARNESS_H_

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "core/efg.h"
#include "core/game_tree.h"
#include "core/learners.h"

namespace tram {

struct RunConfig {
  std::string algo = "efce-omd";
  std::string feedback = "full";  // full | bandit
  long T = 1;
  double eta = 0.0;    // 0: theorem default
  double gamma = -1.0; // <0: theorem default
  double delta = 0.05;
  double eta_const = 2.0;
  uint64_t seed = 0;
  std::string cadence = "pow2";  // pow2 | every:<n>
  long enum_cap = 200000;
  std::string balanced_form = "auto";  // auto | ftrl | incremental
  long resync_every = 0;               // incremental forms; 0 disables
  bool store_policies = false;
  bool store_losses = false;
  bool compute_gap = false;   // self-play: independent mixture-based gap
  bool dump_trajectories = false;

  LearnerConfig MakeLearnerConfig(const GameTree& tree) const;
};

struct MetricsRow {
  long t = 0;
  double cum_loss = 0.0;
  double trigger_regret = 0.0;
  double external_regret = 0.0;
  double regret_over_sqrt_t = 0.0;
  double efce_gap = std::numeric_limits<double>::quiet_NaN();
};

struct RunHistory {
  long T = 0;
  std::vector<MetricsRow> rows;
  double max_residual = 0.0;
  double cum_loss = 0.0;
  // Populated when the matching store_* flags are on.
  std::vector<std::vector<double>> policies;  // per episode, sequence form
  std::vector<std::vector<double>> losses;    // per episode, true loss
  std::vector<Trajectory> trajectories;       // bandit mode, when dumped

  double FinalTriggerRegret() const;
  double FinalExternalRegret() const;
};

// Adversary callbacks see the episode index (1-based) and the learner's
// past policies (previous and running average; null at t = 1).
struct AdversaryContext {
  long t = 1;
  const std::vector<double>* last_policy = nullptr;
  const std::vector<double>* avg_policy = nullptr;
};

using EnvSchedule = std::function<EpisodeEnvironment(const AdversaryContext&)>;
using LossSchedule = std::function<std::vector<double>(const AdversaryContext&)>;

// Runs the configured learner against an environment schedule. Bandit runs
// sample trajectories; regret metrics always use the true expected losses.
RunHistory RunAdversarial(const GameTree& tree, const EnvSchedule& schedule,
                          const RunConfig& config);
// Full-feedback variant driven by raw loss vectors.
RunHistory RunAdversarialLosses(const GameTree& tree,
                                const LossSchedule& schedule,
                                const RunConfig& config);

struct SelfPlayHistory {
  std::array<RunHistory, 2> players;
  // Per-episode product policies in sequence form, [t][player].
  std::vector<std::array<std::vector<double>, 2>> product_policies;
  double final_efce_gap = std::numeric_limits<double>::quiet_NaN();
};

// Uncoupled self-play on a two-player zero-sum EFG: each episode, every
// player faces the reduction against the co-player's current policy.
SelfPlayHistory RunSelfPlay(const Efg& efg,
                            const std::array<RunConfig, 2>& configs, long T);

// Exact regret metrics from explicit (policy, loss) sequences.
double TriggerRegretExact(const GameTree& tree,
                          const std::vector<std::vector<double>>& policies,
                          const std::vector<std::vector<double>>& losses);
double ExternalRegretExact(const GameTree& tree,
                           const std::vector<std::vector<double>>& policies,
                           const std::vector<std::vector<double>>& losses);

// EFCE gap of the uniform mixture of the stored product policies, computed
// from scratch (fresh reductions and expected losses per component).
double EfceGap(const Efg& efg, const std::array<const EfgPlayerView*, 2>& views,
               const std::vector<std::array<std::vector<double>, 2>>&
                   product_policies);

// Expected original-scale payoff for `player` from their own reduced loss:
// affine back-map of H - <mu, ell>.
double PlayerValueFromLoss(const Efg& efg, int player, const GameTree& tree,
                           const std::vector<double>& policy_seq,
                           const std::vector<double>& loss);

std::vector<long> CadencePoints(const std::string& cadence, long T);

// metrics.csv plus a config echo file under `dir`; suffix distinguishes
// players in self-play output.
void EmitMetrics(const RunHistory& history, const std::string& config_echo_json,
                 const std::string& dir, const std::string& suffix = "");
void EmitTrajectories(const GameTree& tree, const RunHistory& history,
                      const std::string& dir, const std::string& suffix = "");

// Opponent plays a (1 - mix) best response to the learner's running average
// policy plus `mix` uniform; reduces to the learner's environment each
// episode. The views must outlive the returned schedule.
EnvSchedule BestResponseAdversary(const Efg& efg, int learner_player,
                                  const EfgPlayerView& learner_view,
                                  const EfgPlayerView& opponent_view,
                                  double mix = 0.1);

}  // namespace tram

#endif  // TRAM_CORE_HARNESS_H_
