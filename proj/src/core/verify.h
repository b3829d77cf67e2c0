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

#ifndef TRAM_CORE_VERIFY_H_
#define TRAM_CORE_VERIFY_H_

#include <string>
#include <utility>
#include <vector>

#include "core/game_tree.h"

namespace tram {

struct VerifyResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  uint64_t seed = 7;
  // Trims the episode counts (used by unit tests; the CLI runs the full
  // battery).
  bool quick = false;
};

// The oracle-equivalence battery: log-partition and gradient equivalences,
// algorithm-form equivalences, variational optimality, balancing identities,
// fixed-point residuals, the online-to-batch identity, and the estimator
// statistics. Every tolerance is pinned here.
std::vector<VerifyResult> RunVerifySuite(const VerifyOptions& options);

// Small enumerable games shared by the battery and tests; every entry keeps
// |Phi_0^Tr| <= 10^4.
std::vector<std::pair<std::string, GameTree>> OracleGames();

}  // namespace tram

#endif  // TRAM_CORE_VERIFY_H_
