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

#include "core/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/checks.h"

namespace tram {

LearnerConfig RunConfig::MakeLearnerConfig(const GameTree& tree) const {
  LearnerConfig lc;
  lc.algo = algo;
  lc.enum_cap = enum_cap;
  lc.resync_every = resync_every;
  bool bandit = feedback == "bandit";
  HyperParams hp = DefaultHyperParams(tree, algo, bandit, T, delta, eta_const);
  lc.eta = eta > 0.0 ? eta : hp.eta;
  lc.gamma = gamma >= 0.0 ? gamma : (bandit ? hp.gamma : 0.0);
  if (balanced_form == "auto") {
    lc.balanced_form = bandit ? "incremental" : "ftrl";
  } else {
    lc.balanced_form = balanced_form;
  }
  return lc;
}

double RunHistory::FinalTriggerRegret() const {
  TRAM_CHECK(!rows.empty());
  return rows.back().trigger_regret;
}

double RunHistory::FinalExternalRegret() const {
  TRAM_CHECK(!rows.empty());
  return rows.back().external_regret;
}

std::vector<long> CadencePoints(const std::string& cadence, long T) {
  std::vector<long> points;
  if (cadence == "pow2") {
    for (long t = 1; t < T; t *= 2) points.push_back(t);
    points.push_back(T);
  } else if (cadence.rfind("every:", 0) == 0) {
    long n = std::stol(cadence.substr(6));
    TRAM_CHECK_MSG(n >= 1 && T % n == 0, "cadence must divide T");
    for (long t = n; t <= T; t += n) points.push_back(t);
  } else {
    FatalError("unknown cadence: " + cadence);
  }
  return points;
}

namespace {

// Online accumulators from which every regret metric is derived exactly:
// the cumulative true-loss matrix sum_s ell^s (mu^s)^T, the cumulative loss
// vector, and the scalar total loss.
class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(const GameTree& tree)
      : tree_(tree),
        msum_(Eigen::MatrixXd::Zero(tree.num_pairs(), tree.num_pairs())),
        ellsum_(tree.num_pairs(), 0.0) {}

  void Add(const std::vector<double>& policy, const std::vector<double>& loss) {
    const int P = tree_.num_pairs();
    Eigen::Map<const Eigen::VectorXd> l(loss.data(), P);
    Eigen::Map<const Eigen::VectorXd> m(policy.data(), P);
    msum_.noalias() += l * m.transpose();
    for (int p = 0; p < P; ++p) {
      ellsum_[p] += loss[p];
      cum_loss_ += loss[p] * policy[p];
    }
  }

  double cum_loss() const { return cum_loss_; }

  MetricsRow Row(long t) const {
    MetricsRow row;
    row.t = t;
    row.cum_loss = cum_loss_;
    std::vector<double> untrig(tree_.num_pairs());
    for (int q = 0; q < tree_.num_pairs(); ++q) {
      double sub = 0.0;
      for (int p : tree_.subtree_pairs[q]) sub += msum_(p, p);
      untrig[q] = cum_loss_ - sub;
    }
    BestTriggerResult best = BestTriggerResponse(tree_, msum_, untrig);
    row.trigger_regret = cum_loss_ - best.value;
    row.external_regret = cum_loss_ - BestVertexValue(tree_, ellsum_);
    row.regret_over_sqrt_t = row.trigger_regret / std::sqrt(double(t));
    return row;
  }

 private:
  const GameTree& tree_;
  Eigen::MatrixXd msum_;
  std::vector<double> ellsum_;
  double cum_loss_ = 0.0;
};

void UpdateAverage(std::vector<double>* avg, const std::vector<double>& x,
                   long t) {
  if (avg->empty()) avg->assign(x.size(), 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    (*avg)[i] += (x[i] - (*avg)[i]) / t;
  }
}

// Shared driver: `make_loss` produces this episode's true expected loss and,
// in bandit mode, feeds the learner a sampled trajectory.
RunHistory RunLoop(
    const GameTree& tree, const RunConfig& config,
    const std::function<std::vector<double>(const AdversaryContext&,
                                            const std::vector<double>& policy,
                                            Learner&, RunHistory*)>& episode) {
  TRAM_CHECK(config.T >= 1);
  auto learner = MakeLearner(tree, config.MakeLearnerConfig(tree));
  MetricsAccumulator acc(tree);
  RunHistory history;
  history.T = config.T;
  std::vector<long> cadence = CadencePoints(config.cadence, config.T);
  size_t next_point = 0;

  std::vector<double> last_policy, avg_policy;
  for (long t = 1; t <= config.T; ++t) {
    AdversaryContext ctx;
    ctx.t = t;
    ctx.last_policy = t > 1 ? &last_policy : nullptr;
    ctx.avg_policy = t > 1 ? &avg_policy : nullptr;

    std::vector<double> policy = learner->Policy();
    std::vector<double> loss = episode(ctx, policy, *learner, &history);
    history.max_residual = std::max(history.max_residual,
                                    learner->LastResidual());
    acc.Add(policy, loss);
    if (config.store_policies) history.policies.push_back(policy);
    if (config.store_losses) history.losses.push_back(loss);
    last_policy = policy;
    UpdateAverage(&avg_policy, policy, t);

    if (next_point < cadence.size() && cadence[next_point] == t) {
      history.rows.push_back(acc.Row(t));
      ++next_point;
    }
  }
  history.cum_loss = acc.cum_loss();
  return history;
}

}  // namespace

RunHistory RunAdversarial(const GameTree& tree, const EnvSchedule& schedule,
                          const RunConfig& config) {
  const bool bandit = config.feedback == "bandit";
  return RunLoop(
      tree, config,
      [&](const AdversaryContext& ctx, const std::vector<double>& policy,
          Learner& learner, RunHistory* history) {
        EpisodeEnvironment env = schedule(ctx);
        std::vector<double> loss = ExpectedLoss(tree, env);
        if (bandit) {
          Rng rng(config.seed, /*stream=*/1, /*episode=*/ctx.t);
          Trajectory traj =
              SampleTrajectory(tree, env, SeqToBehavioral(tree, {policy, -1}),
                               rng);
          if (config.dump_trajectories) history->trajectories.push_back(traj);
          learner.UpdateBandit(traj);
        } else {
          learner.UpdateVector(loss);
        }
        return loss;
      });
}

RunHistory RunAdversarialLosses(const GameTree& tree,
                                const LossSchedule& schedule,
                                const RunConfig& config) {
  TRAM_CHECK_MSG(config.feedback == "full",
                 "raw loss schedules only support full feedback");
  return RunLoop(tree, config,
                 [&](const AdversaryContext& ctx, const std::vector<double>&,
                     Learner& learner, RunHistory*) {
                   std::vector<double> loss = schedule(ctx);
                   learner.UpdateVector(loss);
                   return loss;
                 });
}

SelfPlayHistory RunSelfPlay(const Efg& efg,
                            const std::array<RunConfig, 2>& configs, long T) {
  TRAM_CHECK(T >= 1);
  std::array<EfgPlayerView, 2> views = {BuildPlayerView(efg, 0),
                                        BuildPlayerView(efg, 1)};
  std::array<std::unique_ptr<Learner>, 2> learners;
  std::array<std::unique_ptr<MetricsAccumulator>, 2> accs;
  std::array<std::vector<long>, 2> cadence;
  std::array<size_t, 2> next_point = {0, 0};
  SelfPlayHistory out;
  for (int i = 0; i < 2; ++i) {
    RunConfig cfg = configs[i];
    cfg.T = T;
    learners[i] = MakeLearner(views[i].tree, cfg.MakeLearnerConfig(views[i].tree));
    accs[i] = std::make_unique<MetricsAccumulator>(views[i].tree);
    cadence[i] = CadencePoints(cfg.cadence, T);
    out.players[i].T = T;
  }

  const bool bandit0 = configs[0].feedback == "bandit";
  const bool bandit1 = configs[1].feedback == "bandit";
  TRAM_CHECK_MSG(bandit0 == bandit1,
                 "self-play players must share a feedback mode");
  const bool bandit = bandit0;

  for (long t = 1; t <= T; ++t) {
    // All policies are fixed before any feedback is revealed.
    std::array<std::vector<double>, 2> policies;
    std::array<std::vector<double>, 2> behavioral;
    for (int i = 0; i < 2; ++i) {
      policies[i] = learners[i]->Policy();
      behavioral[i] = SeqToBehavioral(views[i].tree, {policies[i], -1});
    }
    std::array<std::vector<double>, 2> losses;
    for (int i = 0; i < 2; ++i) {
      EpisodeEnvironment env =
          ReduceEfg(efg, views[i], i, views[1 - i], behavioral[1 - i]);
      losses[i] = ExpectedLoss(views[i].tree, env);
    }
    if (bandit) {
      Rng rng(configs[0].seed, /*stream=*/2, /*episode=*/t);
      std::array<Trajectory, 2> trajs = SampleEfgEpisode(
          efg, {&views[0], &views[1]}, behavioral[0], behavioral[1], rng);
      for (int i = 0; i < 2; ++i) learners[i]->UpdateBandit(trajs[i]);
    } else {
      for (int i = 0; i < 2; ++i) learners[i]->UpdateVector(losses[i]);
    }
    out.product_policies.push_back({policies[0], policies[1]});
    for (int i = 0; i < 2; ++i) {
      accs[i]->Add(policies[i], losses[i]);
      out.players[i].max_residual =
          std::max(out.players[i].max_residual, learners[i]->LastResidual());
      if (configs[i].store_policies) {
        out.players[i].policies.push_back(policies[i]);
      }
      if (configs[i].store_losses) out.players[i].losses.push_back(losses[i]);
      if (next_point[i] < cadence[i].size() && cadence[i][next_point[i]] == t) {
        out.players[i].rows.push_back(accs[i]->Row(t));
        ++next_point[i];
      }
    }
  }
  for (int i = 0; i < 2; ++i) {
    out.players[i].cum_loss = accs[i]->cum_loss();
  }
  if (configs[0].compute_gap || configs[1].compute_gap) {
    out.final_efce_gap =
        EfceGap(efg, {&views[0], &views[1]}, out.product_policies);
    for (int i = 0; i < 2; ++i) {
      if (!out.players[i].rows.empty()) {
        out.players[i].rows.back().efce_gap = out.final_efce_gap;
      }
    }
  }
  return out;
}

double TriggerRegretExact(const GameTree& tree,
                          const std::vector<std::vector<double>>& policies,
                          const std::vector<std::vector<double>>& losses) {
  TRAM_CHECK_EQ(policies.size(), losses.size());
  if (policies.empty()) return 0.0;
  MetricsAccumulator acc(tree);
  for (size_t t = 0; t < policies.size(); ++t) {
    acc.Add(policies[t], losses[t]);
  }
  return acc.Row(static_cast<long>(policies.size())).trigger_regret;
}

double ExternalRegretExact(const GameTree& tree,
                           const std::vector<std::vector<double>>& policies,
                           const std::vector<std::vector<double>>& losses) {
  TRAM_CHECK_EQ(policies.size(), losses.size());
  if (policies.empty()) return 0.0;
  MetricsAccumulator acc(tree);
  for (size_t t = 0; t < policies.size(); ++t) {
    acc.Add(policies[t], losses[t]);
  }
  return acc.Row(static_cast<long>(policies.size())).external_regret;
}

double EfceGap(const Efg& efg, const std::array<const EfgPlayerView*, 2>& views,
               const std::vector<std::array<std::vector<double>, 2>>&
                   product_policies) {
  TRAM_CHECK(!product_policies.empty());
  const long T = static_cast<long>(product_policies.size());
  double gap = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2; ++i) {
    const GameTree& tree = views[i]->tree;
    MetricsAccumulator acc(tree);
    for (long t = 0; t < T; ++t) {
      std::vector<double> co_behavioral =
          SeqToBehavioral(views[1 - i]->tree, {product_policies[t][1 - i], -1});
      EpisodeEnvironment env =
          ReduceEfg(efg, *views[i], i, *views[1 - i], co_behavioral);
      acc.Add(product_policies[t][i], ExpectedLoss(tree, env));
    }
    gap = std::max(gap, acc.Row(T).trigger_regret / double(T));
  }
  return gap;
}

double PlayerValueFromLoss(const Efg& efg, int player, const GameTree& tree,
                           const std::vector<double>& policy_seq,
                           const std::vector<double>& loss) {
  double inner = 0.0;
  for (int p = 0; p < tree.num_pairs(); ++p) {
    inner += policy_seq[p] * loss[p];
  }
  double reward = tree.horizon - inner;  // expected total normalized reward
  double span = efg.payoff_max - efg.payoff_min;
  double offset = player == 0 ? efg.payoff_min : -efg.payoff_max;
  return offset + span * reward;
}

void EmitMetrics(const RunHistory& history, const std::string& config_echo_json,
                 const std::string& dir, const std::string& suffix) {
  std::filesystem::create_directories(dir);
  std::string path = dir + "/metrics" + suffix + ".csv";
  std::ofstream csv(path);
  TRAM_CHECK_MSG(csv.good(), "cannot write " + path);
  csv << "t,cum_loss,trigger_regret,external_regret,regret_over_sqrt_t,"
         "efce_gap\n";
  char buf[512];
  for (const MetricsRow& row : history.rows) {
    std::snprintf(buf, sizeof(buf),
                  "%ld,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.t, row.cum_loss,
                  row.trigger_regret, row.external_regret,
                  row.regret_over_sqrt_t, row.efce_gap);
    csv << buf;
  }
  csv.close();
  std::ofstream echo(dir + "/config" + suffix + ".json");
  echo << config_echo_json << "\n";
}

void EmitTrajectories(const GameTree& tree, const RunHistory& history,
                      const std::string& dir, const std::string& suffix) {
  std::filesystem::create_directories(dir);
  std::string path = dir + "/trajectories" + suffix + ".csv";
  std::ofstream csv(path);
  TRAM_CHECK_MSG(csv.good(), "cannot write " + path);
  csv << "episode,h,infoset,action,reward\n";
  char buf[256];
  for (size_t t = 0; t < history.trajectories.size(); ++t) {
    const Trajectory& traj = history.trajectories[t];
    for (size_t h = 0; h < traj.steps.size(); ++h) {
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%s,%d,%.17g\n", t + 1, h + 1,
                    tree.names[traj.steps[h].infoset].c_str(),
                    traj.steps[h].action, traj.steps[h].reward);
      csv << buf;
    }
  }
}

EnvSchedule BestResponseAdversary(const Efg& efg, int learner_player,
                                  const EfgPlayerView& learner_view,
                                  const EfgPlayerView& opponent_view,
                                  double mix) {
  const int opponent = 1 - learner_player;
  return [&efg, learner_player, opponent, &learner_view, &opponent_view,
          mix](const AdversaryContext& ctx) {
    std::vector<double> opp_behavioral(
        opponent_view.tree.num_pairs(),
        1.0 / opponent_view.tree.num_actions);
    if (ctx.avg_policy != nullptr) {
      std::vector<double> learner_behavioral =
          SeqToBehavioral(learner_view.tree, {*ctx.avg_policy, -1});
      EpisodeEnvironment opp_env = ReduceEfg(efg, opponent_view, opponent,
                                             learner_view, learner_behavioral);
      std::vector<double> opp_loss =
          ExpectedLoss(opponent_view.tree, opp_env);
      std::vector<double> br =
          BestVertexBehavioral(opponent_view.tree, opp_loss);
      for (int p = 0; p < opponent_view.tree.num_pairs(); ++p) {
        opp_behavioral[p] = (1.0 - mix) * br[p] +
                            mix / opponent_view.tree.num_actions;
      }
    }
    return ReduceEfg(efg, learner_view, learner_player, opponent_view,
                     opp_behavioral);
  };
}

}  // namespace tram
