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

std::vector<double> RandomLoss(int dim, Rng& rng) {
  std::vector<double> l(dim);
  for (double& v : l) v = rng.NextDouble();
  return l;
}

TEST_CASE("phi-hedge starts at the vertex average") {
  GameTree tree = RandomTree(4, 2, 2, 2);
  LearnerConfig cfg;
  cfg.algo = "phi-hedge";
  cfg.eta = 0.1;
  auto learner = MakeLearner(tree, cfg);
  const TriggerProfile& profile = AsTriggerLearner(*learner).Profile();
  auto vertices = EnumerateTriggerVertices(tree, 100000);
  // lambda_q = (number of subtree vertices at q) / |Phi_0|.
  std::vector<double> counts(tree.num_pairs(), 0.0);
  for (const auto& v : vertices) counts[v.trigger_pair] += 1.0;
  for (int q = 0; q < tree.num_pairs(); ++q) {
    CHECK(profile.lambda[q] ==
          doctest::Approx(counts[q] / vertices.size()).epsilon(1e-12));
  }
  CheckPolicy(tree, {learner->Policy(), -1});
}

TEST_CASE("phi-hedge weights stay a probability vector and concentrate") {
  GameTree tree = Depth1();
  LearnerConfig cfg;
  cfg.algo = "phi-hedge";
  cfg.eta = 0.2;
  auto learner = MakeLearner(tree, cfg);
  // Constant loss favoring action 2: mass on triggers mapping to a2 grows.
  std::vector<double> loss = {1.0, 0.0};
  double prev_weight_on_a2 = 0.0;
  for (int t = 0; t < 100; ++t) {
    learner->UpdateVector(loss);
    const TriggerProfile& profile = AsTriggerLearner(*learner).Profile();
    double sum = 0.0;
    for (double l : profile.lambda) {
      CHECK(l >= 0.0);
      sum += l;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    double mass_a2 = learner->Policy()[1];
    CHECK(mass_a2 >= prev_weight_on_a2 - 1e-12);  // monotone concentration
    prev_weight_on_a2 = mass_a2;
  }
  CHECK(prev_weight_on_a2 > 0.95);
}

TEST_CASE("phi-hedge respects the regret bound of the exponential weights") {
  // Reg <= log|Phi_0|/eta + (eta/2) sum_t sum_phi p_phi <phi mu, ell>^2.
  GameTree tree = RandomTree(4, 2, 2, 2);
  const int P = tree.num_pairs();
  auto vertices = EnumerateTriggerVertices(tree, 100000);
  const double eta = 0.15;
  LearnerConfig cfg;
  cfg.algo = "phi-hedge";
  cfg.eta = eta;
  auto learner = MakeLearner(tree, cfg);

  Rng rng(40);
  double second_order = 0.0;
  std::vector<std::vector<double>> policies, losses;
  const int T = 60;
  // Track the hedge distribution by replaying the weight recursion.
  std::vector<double> logw(vertices.size(), 0.0);
  for (int t = 0; t < T; ++t) {
    std::vector<double> mu = learner->Policy();
    std::vector<double> loss = RandomLoss(P, rng);
    policies.push_back(mu);
    losses.push_back(loss);
    // sum_phi p_phi <phi mu, ell>^2 under the current weights.
    double lse = -std::numeric_limits<double>::infinity();
    for (double w : logw) lse = std::max(lse, w);
    double z = 0.0;
    for (double w : logw) z += std::exp(w - lse);
    for (size_t i = 0; i < vertices.size(); ++i) {
      auto phimu = ApplyTriggerVertex(tree, vertices[i], mu);
      double inner = 0.0;
      for (int p = 0; p < P; ++p) inner += phimu[p] * loss[p];
      second_order += std::exp(logw[i] - lse) / z * inner * inner;
      logw[i] -= eta * inner;
    }
    learner->UpdateVector(loss);
  }
  double regret = 0.0;
  {
    // Exact trigger regret via enumeration.
    double base = 0.0;
    std::vector<double> best(vertices.size(), 0.0);
    for (int t = 0; t < T; ++t) {
      for (int p = 0; p < P; ++p) base += policies[t][p] * losses[t][p];
      for (size_t i = 0; i < vertices.size(); ++i) {
        auto phimu = ApplyTriggerVertex(tree, vertices[i], policies[t]);
        for (int p = 0; p < P; ++p) best[i] += phimu[p] * losses[t][p];
      }
    }
    double minv = *std::min_element(best.begin(), best.end());
    regret = base - minv;
  }
  double bound = std::log(double(vertices.size())) / eta +
                 eta / 2.0 * second_order;
  CHECK(regret <= bound + 1e-9);
}

TEST_CASE("efce-omd is constant under zero losses") {
  GameTree tree = RandomTree(3, 3, 2, 2);
  LearnerConfig cfg;
  cfg.algo = "efce-omd";
  cfg.eta = 0.3;
  auto learner = MakeLearner(tree, cfg);
  std::vector<double> first = learner->Policy();
  std::vector<double> zero(tree.num_pairs(), 0.0);
  for (int t = 0; t < 5; ++t) learner->UpdateVector(zero);
  std::vector<double> later = learner->Policy();
  for (int p = 0; p < tree.num_pairs(); ++p) {
    CHECK(later[p] == doctest::Approx(first[p]).epsilon(1e-12));
  }
}

TEST_CASE("eta -> 0 limit matches the initialization profile") {
  // With tiny eta the FTRL iterate stays at the M = 0 gradient:
  // lambda propto exp{F^0}, m propto exp{sum_children F^0}.
  GameTree tree = RandomTree(12, 3, 2, 2);
  LearnerConfig cfg;
  cfg.algo = "efce-omd";
  cfg.eta = 1e-12;
  auto learner = MakeLearner(tree, cfg);
  Rng rng(3);
  for (int t = 0; t < 3; ++t) {
    learner->UpdateVector(RandomLoss(tree.num_pairs(), rng));
  }
  const TriggerProfile& profile = AsTriggerLearner(*learner).Profile();
  // Reference: incremental learner before any update (exact init).
  cfg.algo = "efce-omd-inc";
  cfg.eta = 0.1;
  auto reference = MakeLearner(tree, cfg);
  const TriggerProfile& init = AsTriggerLearner(*reference).Profile();
  for (int q = 0; q < tree.num_pairs(); ++q) {
    CHECK(profile.lambda[q] == doctest::Approx(init.lambda[q]).epsilon(1e-6));
    for (int x : tree.subtree_infosets[tree.pair_infoset(q)]) {
      for (int a = 0; a < tree.num_actions; ++a) {
        int p = tree.pair_index(x, a);
        CHECK(profile.m[q][p] == doctest::Approx(init.m[q][p]).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("incremental telescoping: sparse updates leave other m untouched") {
  GameTree tree = RandomTree(18, 3, 2, 2);
  const int P = tree.num_pairs();
  LearnerConfig cfg;
  cfg.algo = "efce-omd-inc";
  cfg.eta = 0.2;
  auto learner = MakeLearner(tree, cfg);
  TriggerProfile before = AsTriggerLearner(*learner).Profile();

  // One sparse column: only triggers whose subtree contains the touched row
  // may change their m.
  LossMatrix sparse = LossMatrix::Sparse(P);
  int row = tree.pair_index(tree.layers.back()[0], 0);
  int col = tree.pair_index(tree.layers[0][0], 0);
  sparse.AddColumnEntry(col, row, 0.8);
  learner->UpdateMatrix(sparse);
  TriggerProfile after = AsTriggerLearner(*learner).Profile();
  int touched_infoset = tree.pair_infoset(row);
  for (int q = 0; q < P; ++q) {
    bool affected =
        q == col && tree.InInfosetSubtree(touched_infoset, tree.pair_infoset(q));
    for (int x : tree.subtree_infosets[tree.pair_infoset(q)]) {
      for (int a = 0; a < tree.num_actions; ++a) {
        int p = tree.pair_index(x, a);
        if (!affected) {
          CHECK(after.m[q][p] == doctest::Approx(before.m[q][p]).epsilon(1e-14));
        }
      }
    }
  }
}

TEST_CASE("balanced initialization weights") {
  GameTree tree = RandomTree(9, 3, 2, 2);
  LearnerConfig cfg;
  cfg.algo = "balanced-efce-omd";
  cfg.balanced_form = "incremental";
  cfg.eta = 0.1;
  auto learner = MakeLearner(tree, cfg);
  const TriggerProfile& profile = AsTriggerLearner(*learner).Profile();
  // lambda^1 propto exp{(X_{>=x_g}/X) log A}; m^1 uniform.
  double z = 0.0;
  std::vector<double> want(tree.num_pairs());
  for (int q = 0; q < tree.num_pairs(); ++q) {
    int root = tree.pair_infoset(q);
    want[q] = std::exp(double(tree.x_subtree[root]) / tree.num_infosets *
                       std::log(double(tree.num_actions)));
    z += want[q];
  }
  for (int q = 0; q < tree.num_pairs(); ++q) {
    CHECK(profile.lambda[q] == doctest::Approx(want[q] / z).epsilon(1e-12));
    for (int x : tree.subtree_infosets[tree.pair_infoset(q)]) {
      for (int a = 0; a < tree.num_actions; ++a) {
        CHECK(profile.m[q][tree.pair_index(x, a)] ==
              doctest::Approx(1.0 / tree.num_actions).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("balanced with unit weights reduces to plain efce-omd updates") {
  // Degenerate scaling: on a one-layer tree with one infoset the balanced
  // reach weights are 1/A at the only layer and the outer scale is XA = A;
  // both learners produce identical policies when fed identical matrices
  // only in the eta -> eta' matched sense. Instead of rescaling by hand,
  // check the documented degenerate case: a single-infoset tree where both
  // algorithms coincide after matching scales.
  GameTree tree = Depth1();
  const int P = tree.num_pairs();
  // mu*_{1:1} = 1/2, outer scale XA = 2. Balanced at (eta) equals plain at
  // eta with exponents scaled by w inside and 1/XA outside; on this tree
  // both m-updates are softmaxes of (-eta/2 cum) vs (-eta cum), and both
  // lambda-updates of ((-eta cum)/2) vs (-eta cum): balanced at eta = 2 eta'
  // reproduces plain at eta'.
  LearnerConfig cfg;
  cfg.algo = "balanced-efce-omd";
  cfg.balanced_form = "ftrl";
  cfg.eta = 0.4;
  auto balanced = MakeLearner(tree, cfg);
  cfg.algo = "efce-omd";
  cfg.eta = 0.2;
  auto plain = MakeLearner(tree, cfg);
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    auto mu_b = balanced->Policy();
    auto mu_p = plain->Policy();
    for (int p = 0; p < P; ++p) {
      CHECK(mu_b[p] == doctest::Approx(mu_p[p]).epsilon(1e-10));
    }
    std::vector<double> loss = RandomLoss(P, rng);
    LossMatrix m = LossMatrix::RankOne(loss, mu_p);
    balanced->UpdateMatrix(m);
    plain->UpdateMatrix(m);
  }
}

TEST_CASE("vertex learners start uniform on uniform-branching trees") {
  GameTree tree = Depth1();
  for (const char* algo : {"vertex-mwu", "dilated-omd"}) {
    LearnerConfig cfg;
    cfg.algo = algo;
    cfg.eta = 0.1;
    auto learner = MakeLearner(tree, cfg);
    CHECK(learner->Policy()[0] == doctest::Approx(0.5));
    CHECK(learner->Policy()[1] == doctest::Approx(0.5));
  }
}

TEST_CASE("dilated omd iterate beats random feasible policies") {
  // eta <mu, sum ell> + H(mu) is minimized by the iterate.
  GameTree tree = RandomTree(19, 3, 2, 2);
  const int P = tree.num_pairs();
  const double eta = 0.25;
  LearnerConfig cfg;
  cfg.algo = "dilated-omd";
  cfg.eta = eta;
  auto learner = MakeLearner(tree, cfg);
  Rng rng(19);
  std::vector<double> cum(P, 0.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> mu = learner->Policy();
    SequencePolicy sp{mu, -1};
    double obj = DilatedEntropy(tree, sp);
    for (int p = 0; p < P; ++p) obj += eta * mu[p] * cum[p];
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> b(P);
      for (int x = 0; x < tree.num_infosets; ++x) {
        double s = 0.0;
        for (int a = 0; a < tree.num_actions; ++a) {
          b[tree.pair_index(x, a)] = 0.05 + rng.NextDouble();
          s += b[tree.pair_index(x, a)];
        }
        for (int a = 0; a < tree.num_actions; ++a) {
          b[tree.pair_index(x, a)] /= s;
        }
      }
      SequencePolicy other = BehavioralToSeq(tree, b);
      double obj_other = DilatedEntropy(tree, other);
      for (int p = 0; p < P; ++p) obj_other += eta * other.values[p] * cum[p];
      CHECK(obj <= obj_other + 1e-9);
    }
    std::vector<double> loss = RandomLoss(P, rng);
    for (int p = 0; p < P; ++p) cum[p] += loss[p];
    learner->UpdateVector(loss);
  }
}

TEST_CASE("snapshot and restore reproduce identical continuations") {
  for (const char* algo : {"phi-hedge", "efce-omd", "efce-omd-inc",
                           "balanced-efce-omd", "vertex-mwu", "dilated-omd"}) {
    GameTree tree = RandomTree(23, 3, 2, 2);
    LearnerConfig cfg;
    cfg.algo = algo;
    cfg.eta = 0.17;
    auto a = MakeLearner(tree, cfg);
    Rng rng(23);
    for (int t = 0; t < 10; ++t) a->UpdateVector(RandomLoss(tree.num_pairs(), rng));
    nlohmann::json snap = a->Snapshot();
    // Binary-free round trip through text.
    nlohmann::json reloaded = nlohmann::json::parse(snap.dump());
    auto b = MakeLearner(tree, cfg);
    b->Restore(reloaded);
    CHECK(b->t() == a->t());
    Rng rng_a(29), rng_b(29);
    for (int t = 0; t < 5; ++t) {
      auto loss = RandomLoss(tree.num_pairs(), rng_a);
      auto loss_b = RandomLoss(tree.num_pairs(), rng_b);
      const auto& pa = a->Policy();
      const auto& pb = b->Policy();
      for (int p = 0; p < tree.num_pairs(); ++p) {
        CHECK(pa[p] == pb[p]);  // bit-identical
      }
      a->UpdateVector(loss);
      b->UpdateVector(loss_b);
    }
  }
}

TEST_CASE("periodic resynchronization stays on the FTRL trajectory") {
  GameTree tree = RandomTree(27, 3, 2, 2);
  const int P = tree.num_pairs();
  for (bool balanced : {false, true}) {
    LearnerConfig cfg;
    cfg.eta = 0.2;
    cfg.algo = balanced ? "balanced-efce-omd" : "efce-omd-inc";
    cfg.balanced_form = "incremental";
    cfg.resync_every = 3;
    auto resyncing = MakeLearner(tree, cfg);
    cfg.algo = balanced ? "balanced-efce-omd" : "efce-omd";
    cfg.balanced_form = "ftrl";
    cfg.resync_every = 0;
    auto ftrl = MakeLearner(tree, cfg);
    Rng rng(27);
    for (int t = 0; t < 50; ++t) {
      const auto& a = resyncing->Policy();
      const auto& b = ftrl->Policy();
      for (int p = 0; p < P; ++p) {
        CHECK(a[p] == doctest::Approx(b[p]).epsilon(1e-8));
      }
      LossMatrix m = LossMatrix::RankOne(RandomLoss(P, rng), b);
      resyncing->UpdateMatrix(m);
      ftrl->UpdateMatrix(m);
    }
  }
}

TEST_CASE("determinism: identical configs give bit-identical policies") {
  GameTree tree = RandomTree(31, 3, 2, 2);
  LearnerConfig cfg;
  cfg.algo = "balanced-efce-omd";
  cfg.balanced_form = "incremental";
  cfg.eta = 0.2;
  cfg.gamma = 0.1;
  auto a = MakeLearner(tree, cfg);
  auto b = MakeLearner(tree, cfg);
  EpisodeEnvironment env = RandomEnvironment(tree, 31);
  for (long t = 1; t <= 50; ++t) {
    const auto& pa = a->Policy();
    const auto& pb = b->Policy();
    for (int p = 0; p < tree.num_pairs(); ++p) CHECK(pa[p] == pb[p]);
    Rng ra(31, 1, t), rb(31, 1, t);
    Trajectory ta = SampleTrajectory(tree, env, SeqToBehavioral(tree, {pa, -1}), ra);
    Trajectory tb = SampleTrajectory(tree, env, SeqToBehavioral(tree, {pb, -1}), rb);
    a->UpdateBandit(ta);
    b->UpdateBandit(tb);
  }
}

TEST_CASE("default hyperparameters follow the stated forms") {
  GameTree tree = RandomTree(3, 3, 2, 2);
  const double H = tree.horizon, XA = tree.num_pairs(), A = tree.num_actions;
  long T = 1 << 12;
  double delta = 0.05;
  HyperParams full = DefaultHyperParams(tree, "efce-omd", false, T, delta, 2.0);
  CHECK(full.eta ==
        doctest::Approx(2.0 * std::sqrt(tree.pi_l1 * std::log(XA) /
                                        (H * H * T))));
  HyperParams bandit = DefaultHyperParams(tree, "efce-omd", true, T, delta);
  double iota = std::log(10.0 * XA / delta);
  CHECK(bandit.eta ==
        doctest::Approx(std::sqrt(tree.pi_l1 * std::log(A) / (H * XA * T))));
  CHECK(bandit.gamma == doctest::Approx(std::sqrt(tree.pi_l1 * iota / (XA * T))));
  HyperParams bal = DefaultHyperParams(tree, "balanced-efce-omd", true, T, delta);
  CHECK(bal.eta == doctest::Approx(std::sqrt(XA * iota / (H * H * H * H * T))));
  CHECK(bal.gamma == doctest::Approx(2.0 * std::sqrt(XA * iota / (H * H * T))));
}

TEST_CASE("learner config validation") {
  GameTree tree = Depth1();
  LearnerConfig cfg;
  cfg.algo = "efce-omd";
  cfg.eta = 0.0;
  CHECK_THROWS_AS(MakeLearner(tree, cfg), TramError);
  cfg.eta = 0.1;
  cfg.algo = "not-an-algo";
  CHECK_THROWS_AS(MakeLearner(tree, cfg), TramError);
  cfg.algo = "vertex-mwu";
  auto learner = MakeLearner(tree, cfg);
  LossMatrix m = LossMatrix::Sparse(tree.num_pairs());
  CHECK_THROWS_AS(learner->UpdateMatrix(m), TramError);
}

}  // namespace
}  // namespace tram
