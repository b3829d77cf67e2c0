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

#include "core/learners.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "core/checks.h"

namespace tram {

namespace {

using nlohmann::json;

double LogSumExp(const std::vector<double>& z) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : z) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

void NormalizeLog(std::vector<double>* logw) {
  double lse = LogSumExp(*logw);
  for (double& v : *logw) v -= lse;
}

json VectorToJson(const std::vector<double>& v) { return json(v); }

std::vector<double> JsonToVector(const json& j) {
  return j.get<std::vector<double>>();
}

}  // namespace

void Learner::UpdateMatrix(const LossMatrix&) {
  FatalError("this learner does not accept matrix losses");
}

// ---------------------------------------------------------------------------
// Naive Phi-Hedge over the enumerated deterministic trigger modifications.
// Oracle-scale only; the recursive learners below must match it exactly.
// ---------------------------------------------------------------------------
class PhiHedgeLearner : public TriggerLearner {
 public:
  PhiHedgeLearner(const GameTree& tree, const LearnerConfig& cfg)
      : tree_(tree), cfg_(cfg) {
    vertices_ = EnumerateTriggerVertices(tree, cfg.enum_cap);
    log_w_.assign(vertices_.size(), -std::log(double(vertices_.size())));
  }

  const std::vector<double>& Policy() override {
    Materialize();
    return policy_;
  }

  const TriggerProfile& Profile() override {
    Materialize();
    return profile_;
  }

  void UpdateMatrix(const LossMatrix& loss) override {
    const int P = tree_.num_pairs();
    std::vector<double> untrig(P);
    for (int q = 0; q < P; ++q) untrig[q] = loss.UntriggeredInner(tree_, q);
    std::vector<std::vector<std::pair<int, double>>> cols(P);
    for (int q = 0; q < P; ++q) cols[q] = loss.Column(q);
    for (size_t i = 0; i < vertices_.size(); ++i) {
      const TriggerVertex& v = vertices_[i];
      double inner = untrig[v.trigger_pair];
      for (const auto& [p, val] : cols[v.trigger_pair]) {
        inner += v.policy[p] * val;
      }
      log_w_[i] -= cfg_.eta * inner;
    }
    NormalizeLog(&log_w_);
    ++t_;
    dirty_ = true;
  }

  void UpdateVector(const std::vector<double>& loss) override {
    UpdateMatrix(LossMatrix::RankOne(loss, Policy()));
  }

  void UpdateBandit(const Trajectory& traj) override {
    std::vector<double> est = SparseToDense(
        tree_.num_pairs(), IxEstimator(tree_, traj, Policy(), cfg_.gamma));
    UpdateMatrix(LossMatrix::RankOne(est, Policy()));
  }

  double LastResidual() const override { return residual_; }

  json Snapshot() const override {
    return json{{"version", 1},
                {"algo", "phi-hedge"},
                {"t", t_},
                {"log_weights", VectorToJson(log_w_)}};
  }

  void Restore(const json& state) override {
    TRAM_CHECK_EQ(state.at("algo").get<std::string>(), std::string("phi-hedge"));
    auto w = JsonToVector(state.at("log_weights"));
    TRAM_CHECK_EQ(w.size(), log_w_.size());
    log_w_ = std::move(w);
    t_ = state.at("t").get<long>();
    dirty_ = true;
  }

 private:
  void Materialize() {
    if (!dirty_) return;
    const int P = tree_.num_pairs();
    const int A = tree_.num_actions;
    profile_.lambda.assign(P, 0.0);
    std::vector<std::vector<double>> m_seq(P, std::vector<double>(P, 0.0));
    for (size_t i = 0; i < vertices_.size(); ++i) {
      double w = std::exp(log_w_[i]);
      int q = vertices_[i].trigger_pair;
      profile_.lambda[q] += w;
      for (int x : tree_.subtree_infosets[tree_.pair_infoset(q)]) {
        for (int a = 0; a < A; ++a) {
          int p = tree_.pair_index(x, a);
          m_seq[q][p] += w * vertices_[i].policy[p];
        }
      }
    }
    profile_.m.assign(P, std::vector<double>(P, 1.0 / A));
    for (int q = 0; q < P; ++q) {
      if (profile_.lambda[q] <= 0.0) continue;
      SequencePolicy sp;
      sp.root = tree_.pair_infoset(q);
      sp.values = m_seq[q];
      for (double& v : sp.values) v /= profile_.lambda[q];
      profile_.m[q] = SeqToBehavioral(tree_, sp);
    }
    FixedPointResult fp = FixedPoint(tree_, profile_);
    policy_ = std::move(fp.mu);
    residual_ = fp.residual;
    dirty_ = false;
  }

  const GameTree& tree_;
  LearnerConfig cfg_;
  std::vector<TriggerVertex> vertices_;
  std::vector<double> log_w_;
  TriggerProfile profile_;
  std::vector<double> policy_;
  double residual_ = 0.0;
  bool dirty_ = true;
};

// ---------------------------------------------------------------------------
// EFCE-OMD, FTRL form: recompute (lambda, m) from the cumulative matrix via
// the trigger log-partition gradient, then solve the fixed point.
// ---------------------------------------------------------------------------
class EfceOmdFtrlLearner : public TriggerLearner {
 public:
  EfceOmdFtrlLearner(const GameTree& tree, const LearnerConfig& cfg,
                     bool balanced)
      : tree_(tree),
        cfg_(cfg),
        balanced_(balanced),
        msum_(Eigen::MatrixXd::Zero(tree.num_pairs(), tree.num_pairs())) {
    if (balanced_) weights_ = std::make_unique<BalancedWeights>(tree);
  }

  const std::vector<double>& Policy() override {
    Materialize();
    return policy_;
  }

  const TriggerProfile& Profile() override {
    Materialize();
    return grad_.profile;
  }

  void UpdateMatrix(const LossMatrix& loss) override {
    loss.AddTo(&msum_);
    ++t_;
    dirty_ = true;
  }

  void UpdateVector(const std::vector<double>& loss) override {
    UpdateMatrix(LossMatrix::RankOne(loss, Policy()));
  }

  void UpdateBandit(const Trajectory& traj) override {
    if (balanced_) {
      Materialize();
      AdaptiveFamily family = AdaptiveEstimator(
          tree_, traj, policy_, grad_.profile, *weights_, cfg_.gamma);
      UpdateMatrix(AssembleAdaptiveMatrix(tree_, family, policy_));
    } else {
      std::vector<double> est = SparseToDense(
          tree_.num_pairs(), IxEstimator(tree_, traj, Policy(), cfg_.gamma));
      UpdateMatrix(LossMatrix::RankOne(est, Policy()));
    }
  }

  double LastResidual() const override { return residual_; }

  json Snapshot() const override {
    std::vector<double> flat(msum_.data(), msum_.data() + msum_.size());
    return json{{"version", 1},
                {"algo", balanced_ ? "balanced-efce-omd" : "efce-omd"},
                {"form", "ftrl"},
                {"t", t_},
                {"msum", VectorToJson(flat)}};
  }

  void Restore(const json& state) override {
    auto flat = JsonToVector(state.at("msum"));
    TRAM_CHECK_EQ(static_cast<long>(flat.size()),
                  static_cast<long>(msum_.size()));
    std::copy(flat.begin(), flat.end(), msum_.data());
    t_ = state.at("t").get<long>();
    dirty_ = true;
  }

 private:
  void Materialize() {
    if (!dirty_) return;
    Eigen::MatrixXd scaled = cfg_.eta * msum_;
    grad_ = balanced_ ? LogPartitionBalanced(tree_, scaled, *weights_)
                      : LogPartitionTrigger(tree_, scaled);
    FixedPointResult fp = FixedPoint(tree_, grad_.profile);
    policy_ = std::move(fp.mu);
    residual_ = fp.residual;
    dirty_ = false;
  }

  const GameTree& tree_;
  LearnerConfig cfg_;
  bool balanced_;
  std::unique_ptr<BalancedWeights> weights_;
  Eigen::MatrixXd msum_;
  TriggerGradient grad_;
  std::vector<double> policy_;
  double residual_ = 0.0;
  bool dirty_ = true;
};

// ---------------------------------------------------------------------------
// EFCE-OMD, incremental (OMD) form. Keeps (log lambda, log m) and applies
// one-step log-partition increments; sparse losses only touch the recursion
// along the affected paths.
// ---------------------------------------------------------------------------
class EfceOmdIncLearner : public TriggerLearner {
 public:
  EfceOmdIncLearner(const GameTree& tree, const LearnerConfig& cfg,
                    bool balanced)
      : tree_(tree), cfg_(cfg), balanced_(balanced) {
    if (balanced_) weights_ = std::make_unique<BalancedWeights>(tree);
    const int P = tree.num_pairs();
    const int A = tree.num_actions;
    if (cfg_.resync_every > 0) {
      msum_ = Eigen::MatrixXd::Zero(P, P);
    }
    log_lambda_.assign(P, 0.0);
    log_m_.assign(P, std::vector<double>(P, -std::log(double(A))));
    if (balanced_) {
      // lambda^1 propto exp{(X_{>=x_g}/X) log A}; m^1 uniform.
      for (int q = 0; q < P; ++q) {
        int root = tree.pair_infoset(q);
        log_lambda_[q] = double(tree.x_subtree[root]) / tree.num_infosets *
                         std::log(double(A));
      }
    } else {
      // lambda^1 propto exp{F^0}, m^1 propto exp{sum_children F^0}, with
      // F^0 the log-count of deterministic subtree policies.
      std::vector<double> base(P, 0.0);
      std::vector<double> z(A);
      for (int x = 0; x < tree.num_infosets; ++x) {
        for (int a = 0; a < A; ++a) {
          int p = tree.pair_index(x, a);
          double acc = 0.0;
          for (int c : tree.children[p]) {
            acc += tree.log_num_vertices_subtree[c];
          }
          z[a] = acc;
        }
        double lse = LogSumExp(z);
        for (int a = 0; a < A; ++a) base[tree.pair_index(x, a)] = z[a] - lse;
      }
      for (int q = 0; q < P; ++q) {
        log_lambda_[q] =
            tree.log_num_vertices_subtree[tree.pair_infoset(q)];
        log_m_[q] = base;
      }
    }
    NormalizeLog(&log_lambda_);
  }

  const std::vector<double>& Policy() override {
    Materialize();
    return policy_;
  }

  const TriggerProfile& Profile() override {
    Materialize();
    return profile_;
  }

  void UpdateMatrix(const LossMatrix& loss) override {
    const int A = tree_.num_actions;
    std::vector<double> z(A);
    for (int q = 0; q < tree_.num_pairs(); ++q) {
      int root = tree_.pair_infoset(q);
      auto col = loss.Column(q);
      // Infosets whose one-step increment can differ from zero: ancestors
      // (within the subtree) of rows touched by this column.
      std::map<int, double> col_at;
      std::vector<int> marked;
      std::vector<char> is_marked(tree_.num_infosets, 0);
      for (const auto& [p, val] : col) {
        int x = tree_.pair_infoset(p);
        if (!tree_.InInfosetSubtree(x, root)) continue;
        col_at[p] += val;
        while (x >= 0 && !is_marked[x]) {
          is_marked[x] = 1;
          marked.push_back(x);
          if (x == root) break;
          x = tree_.pair_infoset(tree_.parent_pair[x]);
        }
      }
      double f_root = 0.0;
      if (!marked.empty()) {
        std::sort(marked.begin(), marked.end(), [&](int a, int b) {
          return tree_.layer_of[a] > tree_.layer_of[b];
        });
        std::map<int, double> ftilde;
        for (int x : marked) {
          double w = balanced_ ? weights_->SubtreeReach(root, x) : 1.0;
          for (int a = 0; a < A; ++a) {
            int p = tree_.pair_index(x, a);
            double delta = 0.0;
            auto it = col_at.find(p);
            if (it != col_at.end()) delta -= cfg_.eta * it->second;
            for (int c : tree_.children[p]) {
              auto fc = ftilde.find(c);
              if (fc != ftilde.end()) delta += fc->second;
            }
            z[a] = log_m_[q][p] + w * delta;
          }
          double lse = LogSumExp(z);
          ftilde[x] = lse / w;
          for (int a = 0; a < A; ++a) {
            log_m_[q][tree_.pair_index(x, a)] = z[a] - lse;
          }
        }
        f_root = ftilde[root];
      }
      double untrig = loss.UntriggeredInner(tree_, q);
      double scale = balanced_ ? 1.0 / tree_.num_pairs() : 1.0;
      log_lambda_[q] += scale * (-cfg_.eta * untrig + f_root);
    }
    NormalizeLog(&log_lambda_);
    ++t_;
    dirty_ = true;
    if (cfg_.resync_every > 0) {
      loss.AddTo(&msum_);
      if ((t_ - 1) % cfg_.resync_every == 0) Resync();
    }
  }

  void UpdateVector(const std::vector<double>& loss) override {
    UpdateMatrix(LossMatrix::RankOne(loss, Policy()));
  }

  void UpdateBandit(const Trajectory& traj) override {
    if (balanced_) {
      Materialize();
      AdaptiveFamily family = AdaptiveEstimator(tree_, traj, policy_, profile_,
                                                *weights_, cfg_.gamma);
      UpdateMatrix(AssembleAdaptiveMatrix(tree_, family, policy_));
    } else {
      std::vector<double> est = SparseToDense(
          tree_.num_pairs(), IxEstimator(tree_, traj, Policy(), cfg_.gamma));
      UpdateMatrix(LossMatrix::RankOne(est, Policy()));
    }
  }

  double LastResidual() const override { return residual_; }

  json Snapshot() const override {
    json m = json::array();
    for (const auto& row : log_m_) m.push_back(VectorToJson(row));
    json out{{"version", 1},
             {"algo", balanced_ ? "balanced-efce-omd" : "efce-omd-inc"},
             {"form", "incremental"},
             {"t", t_},
             {"log_lambda", VectorToJson(log_lambda_)},
             {"log_m", m}};
    if (cfg_.resync_every > 0) {
      std::vector<double> flat(msum_.data(), msum_.data() + msum_.size());
      out["msum"] = VectorToJson(flat);
    }
    return out;
  }

  void Restore(const json& state) override {
    log_lambda_ = JsonToVector(state.at("log_lambda"));
    TRAM_CHECK_EQ(static_cast<int>(log_lambda_.size()), tree_.num_pairs());
    log_m_.clear();
    for (const auto& row : state.at("log_m")) {
      log_m_.push_back(JsonToVector(row));
    }
    TRAM_CHECK_EQ(static_cast<int>(log_m_.size()), tree_.num_pairs());
    if (cfg_.resync_every > 0) {
      auto flat = JsonToVector(state.at("msum"));
      TRAM_CHECK_EQ(static_cast<long>(flat.size()),
                    static_cast<long>(msum_.size()));
      std::copy(flat.begin(), flat.end(), msum_.data());
    }
    t_ = state.at("t").get<long>();
    dirty_ = true;
  }

 private:
  void Materialize() {
    if (!dirty_) return;
    const int P = tree_.num_pairs();
    profile_.lambda.assign(P, 0.0);
    for (int q = 0; q < P; ++q) profile_.lambda[q] = std::exp(log_lambda_[q]);
    profile_.m.assign(P, {});
    for (int q = 0; q < P; ++q) {
      profile_.m[q].assign(P, 1.0 / tree_.num_actions);
      for (int x : tree_.subtree_infosets[tree_.pair_infoset(q)]) {
        for (int a = 0; a < tree_.num_actions; ++a) {
          int p = tree_.pair_index(x, a);
          profile_.m[q][p] = std::exp(log_m_[q][p]);
        }
      }
    }
    FixedPointResult fp = FixedPoint(tree_, profile_);
    policy_ = std::move(fp.mu);
    residual_ = fp.residual;
    dirty_ = false;
  }

  // Rebuild (log lambda, log m) from the cumulative matrix via the FTRL-form
  // gradient, discarding accumulated one-step rounding.
  void Resync() {
    Eigen::MatrixXd scaled = cfg_.eta * msum_;
    TriggerGradient g = balanced_
                            ? LogPartitionBalanced(tree_, scaled, *weights_)
                            : LogPartitionTrigger(tree_, scaled);
    const int P = tree_.num_pairs();
    for (int q = 0; q < P; ++q) {
      log_lambda_[q] = std::log(std::max(g.profile.lambda[q], 1e-300));
      for (int x : tree_.subtree_infosets[tree_.pair_infoset(q)]) {
        for (int a = 0; a < tree_.num_actions; ++a) {
          int p = tree_.pair_index(x, a);
          log_m_[q][p] = std::log(std::max(g.profile.m[q][p], 1e-300));
        }
      }
    }
    NormalizeLog(&log_lambda_);
  }

  const GameTree& tree_;
  LearnerConfig cfg_;
  bool balanced_;
  std::unique_ptr<BalancedWeights> weights_;
  std::vector<double> log_lambda_;
  std::vector<std::vector<double>> log_m_;
  Eigen::MatrixXd msum_;  // kept only when resync is enabled
  TriggerProfile profile_;
  std::vector<double> policy_;
  double residual_ = 0.0;
  bool dirty_ = true;
};

// ---------------------------------------------------------------------------
// Vertex MWU: explicit multiplicative weights over the enumerated
// deterministic policies (the oracle side of the Theorem-5.1 equivalence).
// ---------------------------------------------------------------------------
class VertexMwuLearner : public Learner {
 public:
  VertexMwuLearner(const GameTree& tree, const LearnerConfig& cfg)
      : tree_(tree), cfg_(cfg) {
    vertices_ = EnumeratePolicies(tree, cfg.enum_cap);
    log_w_.assign(vertices_.size(), -std::log(double(vertices_.size())));
    support_.resize(vertices_.size());
    for (size_t i = 0; i < vertices_.size(); ++i) {
      for (int p = 0; p < tree.num_pairs(); ++p) {
        if (vertices_[i][p] != 0.0) support_[i].push_back(p);
      }
    }
  }

  const std::vector<double>& Policy() override {
    if (dirty_) {
      policy_.assign(tree_.num_pairs(), 0.0);
      for (size_t i = 0; i < vertices_.size(); ++i) {
        double w = std::exp(log_w_[i]);
        for (int p : support_[i]) policy_[p] += w;
      }
      dirty_ = false;
    }
    return policy_;
  }

  void UpdateVector(const std::vector<double>& loss) override {
    for (size_t i = 0; i < vertices_.size(); ++i) {
      double inner = 0.0;
      for (int p : support_[i]) inner += loss[p];
      log_w_[i] -= cfg_.eta * inner;
    }
    NormalizeLog(&log_w_);
    ++t_;
    dirty_ = true;
  }

  void UpdateBandit(const Trajectory& traj) override {
    UpdateVector(SparseToDense(
        tree_.num_pairs(), IxEstimator(tree_, traj, Policy(), cfg_.gamma)));
  }

  json Snapshot() const override {
    return json{{"version", 1},
                {"algo", "vertex-mwu"},
                {"t", t_},
                {"log_weights", VectorToJson(log_w_)}};
  }

  void Restore(const json& state) override {
    auto w = JsonToVector(state.at("log_weights"));
    TRAM_CHECK_EQ(w.size(), log_w_.size());
    log_w_ = std::move(w);
    t_ = state.at("t").get<long>();
    dirty_ = true;
  }

 private:
  const GameTree& tree_;
  LearnerConfig cfg_;
  std::vector<std::vector<double>> vertices_;
  std::vector<std::vector<int>> support_;
  std::vector<double> log_w_;
  std::vector<double> policy_;
  bool dirty_ = true;
};

// ---------------------------------------------------------------------------
// OMD with dilated entropy, implemented by the vertex log-partition
// recursion over the cumulative loss.
// ---------------------------------------------------------------------------
class DilatedOmdLearner : public Learner {
 public:
  DilatedOmdLearner(const GameTree& tree, const LearnerConfig& cfg)
      : tree_(tree), cfg_(cfg), cum_loss_(tree.num_pairs(), 0.0) {}

  const std::vector<double>& Policy() override {
    if (dirty_) {
      std::vector<double> scaled(cum_loss_);
      for (double& v : scaled) v *= cfg_.eta;
      policy_ = LogPartitionVertex(tree_, scaled).policy.values;
      dirty_ = false;
    }
    return policy_;
  }

  void UpdateVector(const std::vector<double>& loss) override {
    for (int p = 0; p < tree_.num_pairs(); ++p) cum_loss_[p] += loss[p];
    ++t_;
    dirty_ = true;
  }

  void UpdateBandit(const Trajectory& traj) override {
    UpdateVector(SparseToDense(
        tree_.num_pairs(), IxEstimator(tree_, traj, Policy(), cfg_.gamma)));
  }

  json Snapshot() const override {
    return json{{"version", 1},
                {"algo", "dilated-omd"},
                {"t", t_},
                {"cum_loss", VectorToJson(cum_loss_)}};
  }

  void Restore(const json& state) override {
    cum_loss_ = JsonToVector(state.at("cum_loss"));
    TRAM_CHECK_EQ(static_cast<int>(cum_loss_.size()), tree_.num_pairs());
    t_ = state.at("t").get<long>();
    dirty_ = true;
  }

 private:
  const GameTree& tree_;
  LearnerConfig cfg_;
  std::vector<double> cum_loss_;
  std::vector<double> policy_;
  bool dirty_ = true;
};

std::unique_ptr<Learner> MakeLearner(const GameTree& tree,
                                     const LearnerConfig& config) {
  TRAM_CHECK_MSG(config.eta > 0.0, "learning rate must be positive");
  TRAM_CHECK_MSG(config.gamma >= 0.0, "IX parameter must be nonnegative");
  const std::string& a = config.algo;
  if (a == "phi-hedge") {
    return std::make_unique<PhiHedgeLearner>(tree, config);
  }
  if (a == "efce-omd") {
    return std::make_unique<EfceOmdFtrlLearner>(tree, config, false);
  }
  if (a == "efce-omd-inc") {
    return std::make_unique<EfceOmdIncLearner>(tree, config, false);
  }
  if (a == "balanced-efce-omd") {
    if (config.balanced_form == "incremental") {
      return std::make_unique<EfceOmdIncLearner>(tree, config, true);
    }
    return std::make_unique<EfceOmdFtrlLearner>(tree, config, true);
  }
  if (a == "vertex-mwu") {
    return std::make_unique<VertexMwuLearner>(tree, config);
  }
  if (a == "dilated-omd") {
    return std::make_unique<DilatedOmdLearner>(tree, config);
  }
  FatalError("unknown algorithm: " + a);
}

TriggerLearner& AsTriggerLearner(Learner& learner) {
  auto* t = dynamic_cast<TriggerLearner*>(&learner);
  TRAM_CHECK_MSG(t != nullptr, "learner has no trigger profile");
  return *t;
}

HyperParams DefaultHyperParams(const GameTree& tree, const std::string& algo,
                               bool bandit, long T, double delta,
                               double eta_const) {
  TRAM_CHECK(T >= 1);
  const double H = tree.horizon;
  const double XA = tree.num_pairs();
  const double A = tree.num_actions;
  const double pi1 = tree.pi_l1;
  const double iota_full = std::log(XA);
  const double iota_bandit = std::log(10.0 * XA / delta);
  HyperParams hp;
  if (algo == "balanced-efce-omd") {
    hp.eta = std::sqrt(XA * iota_bandit / (H * H * H * H * T));
    hp.gamma = 2.0 * std::sqrt(XA * iota_bandit / (H * H * T));
  } else if (algo == "vertex-mwu" || algo == "dilated-omd") {
    if (bandit) {
      hp.eta = std::sqrt(pi1 * std::log(A) / (H * XA * T));
      hp.gamma = std::sqrt(pi1 * iota_bandit / (XA * T));
    } else {
      hp.eta = eta_const * std::sqrt(tree.log_num_vertices / (H * H * T));
    }
  } else {
    if (bandit) {
      hp.eta = std::sqrt(pi1 * std::log(A) / (H * XA * T));
      hp.gamma = std::sqrt(pi1 * iota_bandit / (XA * T));
    } else {
      hp.eta = eta_const * std::sqrt(pi1 * iota_full / (H * H * T));
    }
  }
  if (!(hp.eta > 0.0)) hp.eta = 1.0 / std::sqrt(double(T));
  return hp;
}

}  // namespace tram
