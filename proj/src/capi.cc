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

#include "tram/tram.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "core/checks.h"
#include "core/efg.h"
#include "core/harness.h"
#include "core/verify.h"
#include "json.hpp"

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

void SetError(const std::string& msg) { g_last_error = msg; }

template <typename F>
tram_status Guard(tram_status parse_as, F&& f) {
  try {
    return f();
  } catch (const tram::TramError& e) {
    SetError(e.what());
    return parse_as;
  } catch (const json::exception& e) {
    SetError(e.what());
    return TRAM_ERR_PARSE;
  } catch (const std::exception& e) {
    SetError(e.what());
    return TRAM_ERR_INTERNAL;
  }
}

}  // namespace

struct tram_game {
  // Single-player games carry one tree and optional environment blocks;
  // two-player games carry the EFG and both player views.
  int num_players = 1;
  tram::GameTree tree;
  std::vector<tram::EpisodeEnvironment> envs;
  tram::Efg efg;
  std::array<tram::EfgPlayerView, 2> views;
};

struct tram_run {
  int num_players = 1;
  std::array<tram::RunHistory, 2> histories;
  std::array<tram::GameTree, 2> trees;
  std::string config_echo;
};

extern "C" {

const char* tram_version(void) { return "1.0.0"; }

const char* tram_last_error(void) { return g_last_error.c_str(); }

tram_status tram_game_from_json(const char* json_text, tram_game** out) {
  if (json_text == nullptr || out == nullptr) {
    SetError("null argument");
    return TRAM_ERR_INVALID_ARGUMENT;
  }
  return Guard(TRAM_ERR_DOMAIN, [&] {
    auto game = std::make_unique<tram_game>();
    game->tree = tram::GameTreeFromJsonText(json_text);
    game->envs = tram::EnvironmentsFromJsonText(json_text, game->tree);
    *out = game.release();
    return TRAM_OK;
  });
}

tram_status tram_game_load_file(const char* path, tram_game** out) {
  if (path == nullptr || out == nullptr) {
    SetError("null argument");
    return TRAM_ERR_INVALID_ARGUMENT;
  }
  std::ifstream in(path);
  if (!in.good()) {
    SetError(std::string("cannot open ") + path);
    return TRAM_ERR_IO;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return tram_game_from_json(buf.str().c_str(), out);
}

tram_status tram_game_random(uint64_t seed, int num_layers, int branching,
                             int num_actions, tram_game** out) {
  if (out == nullptr) {
    SetError("null argument");
    return TRAM_ERR_INVALID_ARGUMENT;
  }
  return Guard(TRAM_ERR_DOMAIN, [&] {
    auto game = std::make_unique<tram_game>();
    game->tree = tram::RandomTree(seed, num_layers, branching, num_actions);
    game->envs.push_back(tram::RandomEnvironment(game->tree, seed ^ 0x9e37));
    *out = game.release();
    return TRAM_OK;
  });
}

tram_status tram_game_kuhn(tram_game** out) {
  if (out == nullptr) {
    SetError("null argument");
    return TRAM_ERR_INVALID_ARGUMENT;
  }
  return Guard(TRAM_ERR_DOMAIN, [&] {
    auto game = std::make_unique<tram_game>();
    game->num_players = 2;
    game->efg = tram::KuhnPoker();
    game->views[0] = tram::BuildPlayerView(game->efg, 0);
    game->views[1] = tram::BuildPlayerView(game->efg, 1);
    game->tree = game->views[0].tree;
    *out = game.release();
    return TRAM_OK;
  });
}

void tram_game_free(tram_game* game) { delete game; }

int tram_game_num_players(const tram_game* game) {
  return game == nullptr ? 0 : game->num_players;
}

tram_status tram_game_info(const tram_game* game, int player, int* horizon,
                           int* num_infosets, int* num_actions) {
  if (game == nullptr || player < 0 || player >= game->num_players) {
    SetError("invalid game/player");
    return TRAM_ERR_INVALID_ARGUMENT;
  }
  const tram::GameTree& tree =
      game->num_players == 2 ? game->views[player].tree : game->tree;
  if (horizon != nullptr) *horizon = tree.horizon;
  if (num_infosets != nullptr) *num_infosets = tree.num_infosets;
  if (num_actions != nullptr) *num_actions = tree.num_actions;
  return TRAM_OK;
}

tram_status tram_run_create(const tram_game* game, const char* config_json,
                            tram_run** out) {
  if (game == nullptr || config_json == nullptr || out == nullptr) {
    SetError("null argument");
    return TRAM_ERR_INVALID_ARGUMENT;
  }
  return Guard(TRAM_ERR_DOMAIN, [&] {
    json j = json::parse(config_json);
    tram::RunConfig config;
    config.algo = j.value("algo", config.algo);
    config.feedback = j.value("feedback", config.feedback);
    config.T = j.value("T", config.T);
    config.eta = j.value("eta", config.eta);
    config.gamma = j.value("gamma", config.gamma);
    config.delta = j.value("delta", config.delta);
    config.eta_const = j.value("eta_const", config.eta_const);
    config.seed = j.value("seed", config.seed);
    config.cadence = j.value("cadence", config.cadence);
    config.balanced_form = j.value("balanced_form", config.balanced_form);
    config.resync_every = j.value("resync_every", config.resync_every);
    config.dump_trajectories =
        j.value("dump_trajectories", config.dump_trajectories);
    int players = j.value("players", 1);
    std::string adversary = j.value("adversary", "fixed");

    auto run = std::make_unique<tram_run>();
    run->config_echo = json(j).dump(2);
    if (players == 2) {
      TRAM_CHECK_MSG(game->num_players == 2,
                     "players=2 requires a two-player game");
      config.compute_gap = true;
      std::array<tram::RunConfig, 2> configs = {config, config};
      tram::SelfPlayHistory sp =
          tram::RunSelfPlay(game->efg, configs, config.T);
      run->num_players = 2;
      run->histories[0] = std::move(sp.players[0]);
      run->histories[1] = std::move(sp.players[1]);
      run->trees[0] = game->views[0].tree;
      run->trees[1] = game->views[1].tree;
    } else if (game->num_players == 2) {
      // Single learner in a two-player game: the co-player is the adversary.
      int learner = j.value("player", 0);
      TRAM_CHECK_MSG(learner == 0 || learner == 1, "invalid player index");
      tram::EnvSchedule schedule;
      if (adversary == "best-response") {
        schedule = tram::BestResponseAdversary(
            game->efg, learner, game->views[learner],
            game->views[1 - learner]);
      } else {
        // Fixed uniform co-player.
        std::vector<double> uniform(
            game->views[1 - learner].tree.num_pairs(),
            1.0 / game->views[1 - learner].tree.num_actions);
        const tram_game* g = game;
        schedule = [g, learner,
                    uniform](const tram::AdversaryContext&) {
          return tram::ReduceEfg(g->efg, g->views[learner], learner,
                                 g->views[1 - learner], uniform);
        };
      }
      run->histories[0] = tram::RunAdversarial(game->views[learner].tree,
                                               schedule, config);
      run->trees[0] = game->views[learner].tree;
    } else {
      TRAM_CHECK_MSG(!game->envs.empty(),
                     "game file declares no environment block");
      const tram_game* g = game;
      tram::EnvSchedule schedule =
          [g](const tram::AdversaryContext& ctx) {
            return g->envs[(ctx.t - 1) % g->envs.size()];
          };
      run->histories[0] = tram::RunAdversarial(game->tree, schedule, config);
      run->trees[0] = game->tree;
    }
    *out = run.release();
    return TRAM_OK;
  });
}

void tram_run_free(tram_run* run) { delete run; }

int tram_run_num_rows(const tram_run* run) {
  return run == nullptr ? 0 : static_cast<int>(run->histories[0].rows.size());
}

tram_status tram_run_metric(const tram_run* run, int player,
                            const char* column, int row, double* out) {
  if (run == nullptr || column == nullptr || out == nullptr || player < 0 ||
      player >= run->num_players) {
    SetError("invalid argument");
    return TRAM_ERR_INVALID_ARGUMENT;
  }
  const auto& rows = run->histories[player].rows;
  if (row < 0 || row >= static_cast<int>(rows.size())) {
    SetError("row out of range");
    return TRAM_ERR_INVALID_ARGUMENT;
  }
  const tram::MetricsRow& r = rows[row];
  std::string c = column;
  if (c == "t") {
    *out = static_cast<double>(r.t);
  } else if (c == "cum_loss") {
    *out = r.cum_loss;
  } else if (c == "trigger_regret") {
    *out = r.trigger_regret;
  } else if (c == "external_regret") {
    *out = r.external_regret;
  } else if (c == "regret_over_sqrt_t") {
    *out = r.regret_over_sqrt_t;
  } else if (c == "efce_gap") {
    *out = r.efce_gap;
  } else {
    SetError("unknown metric column: " + c);
    return TRAM_ERR_INVALID_ARGUMENT;
  }
  return TRAM_OK;
}

tram_status tram_run_write(const tram_run* run, const char* dir) {
  if (run == nullptr || dir == nullptr) {
    SetError("null argument");
    return TRAM_ERR_INVALID_ARGUMENT;
  }
  return Guard(TRAM_ERR_IO, [&] {
    if (run->num_players == 2) {
      tram::EmitMetrics(run->histories[0], run->config_echo, dir, "_p0");
      tram::EmitMetrics(run->histories[1], run->config_echo, dir, "_p1");
    } else {
      tram::EmitMetrics(run->histories[0], run->config_echo, dir);
      if (!run->histories[0].trajectories.empty()) {
        tram::EmitTrajectories(run->trees[0], run->histories[0], dir);
      }
    }
    return TRAM_OK;
  });
}

tram_status tram_verify(const char* options_json, char** report,
                        int* num_failed) {
  return Guard(TRAM_ERR_INTERNAL, [&] {
    tram::VerifyOptions options;
    if (options_json != nullptr && options_json[0] != '\0') {
      json j = json::parse(options_json);
      options.seed = j.value("seed", options.seed);
      options.quick = j.value("quick", options.quick);
    }
    std::vector<tram::VerifyResult> results = tram::RunVerifySuite(options);
    int failed = 0;
    std::ostringstream oss;
    for (const auto& r : results) {
      if (!r.pass) ++failed;
      oss << (r.pass ? "PASS" : "FAIL") << " " << r.name << ": " << r.detail
          << "\n";
    }
    if (report != nullptr) {
      std::string text = oss.str();
      *report = static_cast<char*>(std::malloc(text.size() + 1));
      std::memcpy(*report, text.c_str(), text.size() + 1);
    }
    if (num_failed != nullptr) *num_failed = failed;
    return TRAM_OK;
  });
}

void tram_string_free(char* s) { std::free(s); }

}  // extern "C"
