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

#ifndef TRAM_CORE_LEARNERS_H_
#define TRAM_CORE_LEARNERS_H_

#include <memory>
#include <string>
#include <vector>

#include "core/feedback.h"
#include "core/game_tree.h"
#include "core/partition.h"
#include "core/trigger.h"
#include "json.hpp"

namespace tram {

struct LearnerConfig {
  std::string algo;        // phi-hedge | efce-omd | efce-omd-inc |
                           // balanced-efce-omd | vertex-mwu | dilated-omd
  double eta = 0.1;
  double gamma = 0.0;      // IX parameter, bandit modes
  long enum_cap = 200000;  // oracle learners
  // balanced-efce-omd form: "ftrl" or "incremental".
  std::string balanced_form = "ftrl";
  // Incremental forms: every n steps, rebuild (lambda, m) from the cumulative
  // matrix to bound numerical drift on long runs. 0 disables.
  long resync_every = 0;
};

// Uncoupled no-regret learner over one game tree. The policy for episode t
// is read before any feedback for t is supplied; Update* advances to t+1.
class Learner {
 public:
  virtual ~Learner() = default;

  virtual const std::vector<double>& Policy() = 0;  // sequence form
  // Full-information update with the true loss vector.
  virtual void UpdateVector(const std::vector<double>& loss) = 0;
  // Bandit update from one trajectory (builds the algorithm's estimator).
  virtual void UpdateBandit(const Trajectory& traj) = 0;
  // Generic matrix-loss update; unsupported for external-regret learners.
  virtual void UpdateMatrix(const LossMatrix& loss);

  virtual double LastResidual() const { return 0.0; }
  virtual nlohmann::json Snapshot() const = 0;
  virtual void Restore(const nlohmann::json& state) = 0;

  long t() const { return t_; }

 protected:
  long t_ = 1;
};

std::unique_ptr<Learner> MakeLearner(const GameTree& tree,
                                     const LearnerConfig& config);

// Trigger learners expose their current profile for the variational and
// cross-form tests.
class TriggerLearner : public Learner {
 public:
  virtual const TriggerProfile& Profile() = 0;
};

// Downcast helper; throws if the learner is not profile-bearing.
TriggerLearner& AsTriggerLearner(Learner& learner);

// Theorem-default hyperparameters; overridable per run.
struct HyperParams {
  double eta = 0.0;
  double gamma = 0.0;
};

HyperParams DefaultHyperParams(const GameTree& tree, const std::string& algo,
                               bool bandit, long T, double delta = 0.05,
                               double eta_const = 2.0);

}  // namespace tram

#endif  // TRAM_CORE_LEARNERS_H_
