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
//
// Command-line front end. Talks to the library exclusively through the C
// API in tram/tram.h.

#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "tram/tram.h"

namespace {

using nlohmann::json;

int Fail(const std::string& what) {
  std::fprintf(stderr, "error: %s: %s\n", what.c_str(), tram_last_error());
  return 1;
}

// --game accepts a JSON spec path, "kuhn", or
// "gen:random:seed=S,layers=L,branching=B,actions=A".
tram_status OpenGame(const std::string& source, tram_game** game) {
  if (source == "kuhn") return tram_game_kuhn(game);
  if (source.rfind("gen:random", 0) == 0) {
    std::map<std::string, long> kv = {
        {"seed", 1}, {"layers", 3}, {"branching", 2}, {"actions", 2}};
    auto args = source.find(':', 4);
    if (args != std::string::npos) {
      std::string rest = source.substr(args + 1);
      size_t pos = 0;
      while (pos < rest.size()) {
        size_t eq = rest.find('=', pos);
        size_t comma = rest.find(',', pos);
        if (comma == std::string::npos) comma = rest.size();
        if (eq == std::string::npos || eq > comma) {
          std::fprintf(stderr, "error: bad generator spec '%s'\n",
                       source.c_str());
          return TRAM_ERR_INVALID_ARGUMENT;
        }
        kv[rest.substr(pos, eq - pos)] =
            std::stol(rest.substr(eq + 1, comma - eq - 1));
        pos = comma + 1;
      }
    }
    return tram_game_random(kv["seed"], static_cast<int>(kv["layers"]),
                            static_cast<int>(kv["branching"]),
                            static_cast<int>(kv["actions"]), game);
  }
  return tram_game_load_file(source.c_str(), game);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tram: no-regret learning in tree-form adversarial MDPs"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "run a learner on a game");
  std::string game_source, algo = "efce-omd", feedback = "full";
  std::string out_dir = "out", cadence = "pow2", adversary = "fixed";
  std::string balanced_form = "auto";
  long T = 1024;
  double eta = 0.0, gamma = -1.0, delta = 0.05, eta_const = 2.0;
  uint64_t seed = 1;
  int players = 1, player = 0;
  bool dump_traj = false;

  run_cmd->add_option("--game", game_source,
                      "game spec path, 'kuhn', or gen:random:k=v,...")
      ->envname("TRAM_GAME")
      ->required();
  run_cmd->add_option("--algo", algo,
                      "phi-hedge|efce-omd|efce-omd-inc|balanced-efce-omd|"
                      "vertex-mwu|dilated-omd")
      ->envname("TRAM_ALGO");
  run_cmd->add_option("--feedback", feedback, "full|bandit")
      ->envname("TRAM_FEEDBACK");
  run_cmd->add_option("--T", T, "number of episodes")->envname("TRAM_T");
  run_cmd->add_option("--eta", eta, "learning rate (0: theorem default)")
      ->envname("TRAM_ETA");
  run_cmd->add_option("--gamma", gamma, "IX bonus (<0: theorem default)")
      ->envname("TRAM_GAMMA");
  run_cmd->add_option("--delta", delta, "confidence for theorem defaults")
      ->envname("TRAM_DELTA");
  run_cmd->add_option("--eta-const", eta_const,
                      "constant in the full-feedback eta default")
      ->envname("TRAM_ETA_CONST");
  run_cmd->add_option("--seed", seed, "run seed")->envname("TRAM_SEED");
  run_cmd->add_option("--players", players, "1 or 2 (self-play)")
      ->envname("TRAM_PLAYERS");
  run_cmd->add_option("--player", player,
                      "learner seat in a 2-player game with --players 1")
      ->envname("TRAM_PLAYER");
  run_cmd->add_option("--out", out_dir, "output directory")
      ->envname("TRAM_OUT");
  run_cmd->add_option("--cadence", cadence, "pow2 or a fixed stride n")
      ->envname("TRAM_CADENCE");
  run_cmd->add_option("--adversary", adversary, "fixed|best-response")
      ->envname("TRAM_ADVERSARY");
  run_cmd->add_option("--balanced-form", balanced_form,
                      "auto|ftrl|incremental")
      ->envname("TRAM_BALANCED_FORM");
  long resync_every = 0;
  run_cmd->add_option("--resync-every", resync_every,
                      "incremental forms: rebuild from the cumulative matrix "
                      "every n steps (0 off)")
      ->envname("TRAM_RESYNC_EVERY");
  run_cmd->add_flag("--dump-trajectories", dump_traj,
                    "write per-episode trajectory CSV (bandit runs)")
      ->envname("TRAM_DUMP_TRAJECTORIES");

  // --- verify ------------------------------------------------------------
  auto* verify_cmd =
      app.add_subcommand("verify", "run the oracle-equivalence suite");
  uint64_t verify_seed = 7;
  bool verify_quick = false;
  verify_cmd->add_option("--seed", verify_seed, "suite seed")
      ->envname("TRAM_SEED");
  verify_cmd->add_flag("--quick", verify_quick, "reduced episode counts")
      ->envname("TRAM_QUICK");

  CLI11_PARSE(app, argc, argv);

  if (verify_cmd->parsed()) {
    json options = {{"seed", verify_seed}, {"quick", verify_quick}};
    char* report = nullptr;
    int failed = 0;
    if (tram_verify(options.dump().c_str(), &report, &failed) != TRAM_OK) {
      return Fail("verify");
    }
    std::fputs(report, stdout);
    tram_string_free(report);
    std::printf("%s\n", failed == 0 ? "all properties passed"
                                    : "some properties FAILED");
    return failed == 0 ? 0 : 1;
  }

  tram_game* game = nullptr;
  if (OpenGame(game_source, &game) != TRAM_OK) return Fail("open game");

  if (cadence != "pow2") cadence = "every:" + cadence;
  json config = {{"algo", algo},
                 {"feedback", feedback},
                 {"T", T},
                 {"eta", eta},
                 {"gamma", gamma},
                 {"delta", delta},
                 {"eta_const", eta_const},
                 {"seed", seed},
                 {"players", players},
                 {"player", player},
                 {"cadence", cadence},
                 {"adversary", adversary},
                 {"balanced_form", balanced_form},
                 {"resync_every", resync_every},
                 {"dump_trajectories", dump_traj},
                 {"game", game_source}};

  tram_run* run = nullptr;
  if (tram_run_create(game, config.dump().c_str(), &run) != TRAM_OK) {
    tram_game_free(game);
    return Fail("run");
  }
  if (tram_run_write(run, out_dir.c_str()) != TRAM_OK) {
    tram_run_free(run);
    tram_game_free(game);
    return Fail("write metrics");
  }

  int rows = tram_run_num_rows(run);
  double reg = 0.0, t = 0.0;
  tram_run_metric(run, 0, "trigger_regret", rows - 1, &reg);
  tram_run_metric(run, 0, "t", rows - 1, &t);
  std::printf("T=%ld trigger_regret=%.6g regret/T=%.6g -> %s/\n",
              static_cast<long>(t), reg, reg / t, out_dir.c_str());

  tram_run_free(run);
  tram_game_free(game);
  return 0;
}
