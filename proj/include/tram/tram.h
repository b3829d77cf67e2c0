/* Copyright 2026 The tram Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C API for the tram library: no-regret learning and equilibrium
 * computation in tree-form adversarial MDPs.
 *
 * All functions return TRAM_OK (0) on success or a negative error code;
 * tram_last_error() describes the most recent failure on the calling
 * thread. Handles are opaque and must be released with the matching
 * *_free function.
 */

#ifndef TRAM_TRAM_H_
#define TRAM_TRAM_H_

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define TRAM_API __attribute__((visibility("default")))

typedef enum tram_status {
  TRAM_OK = 0,
  TRAM_ERR_INVALID_ARGUMENT = -1,
  TRAM_ERR_PARSE = -2,
  TRAM_ERR_DOMAIN = -3, /* game/algorithm invariant violated */
  TRAM_ERR_IO = -4,
  TRAM_ERR_INTERNAL = -5
} tram_status;

typedef struct tram_game tram_game;
typedef struct tram_run tram_run;

TRAM_API const char* tram_version(void);

/* Message for the last error raised on this thread; empty string if none. */
TRAM_API const char* tram_last_error(void);

/* --- games ------------------------------------------------------------- */

/* Loads a single-player game (tree plus optional environment blocks) from a
 * JSON spec file. */
TRAM_API tram_status tram_game_load_file(const char* path, tram_game** out);
TRAM_API tram_status tram_game_from_json(const char* json_text,
                                         tram_game** out);
/* Seeded random single-player game. */
TRAM_API tram_status tram_game_random(uint64_t seed, int num_layers,
                                      int branching, int num_actions,
                                      tram_game** out);
/* Built-in two-player zero-sum Kuhn poker. */
TRAM_API tram_status tram_game_kuhn(tram_game** out);
TRAM_API void tram_game_free(tram_game* game);

TRAM_API int tram_game_num_players(const tram_game* game);
/* Shape of one player's tree; any output pointer may be NULL. */
TRAM_API tram_status tram_game_info(const tram_game* game, int player,
                                    int* horizon, int* num_infosets,
                                    int* num_actions);

/* --- runs -------------------------------------------------------------- */

/* Executes a run described by a JSON config:
 *   {"algo": "efce-omd", "feedback": "full", "T": 1024,
 *    "eta": 0.0, "gamma": -1.0, "delta": 0.05, "seed": 1,
 *    "players": 1, "cadence": "pow2", "adversary": "fixed"}
 * eta <= 0 and gamma < 0 select the theorem defaults. With players = 2 the
 * game must be two-player; both learners use the same config. */
TRAM_API tram_status tram_run_create(const tram_game* game,
                                     const char* config_json, tram_run** out);
TRAM_API void tram_run_free(tram_run* run);

TRAM_API int tram_run_num_rows(const tram_run* run);
/* Metric columns: "t", "cum_loss", "trigger_regret", "external_regret",
 * "regret_over_sqrt_t", "efce_gap". For self-play runs, player selects the
 * learner; single runs use player 0. */
TRAM_API tram_status tram_run_metric(const tram_run* run, int player,
                                     const char* column, int row, double* out);
/* Writes metrics<suffix>.csv plus a config echo under dir. */
TRAM_API tram_status tram_run_write(const tram_run* run, const char* dir);

/* --- verification ------------------------------------------------------ */

/* Runs the oracle-equivalence battery (acceptance criteria 1-6 and 9).
 * `report` receives a malloc'd report (one "PASS|FAIL name: detail" line per
 * property) the caller frees with tram_string_free; may be NULL. Returns the
 * number of failed properties through num_failed (may be NULL). */
TRAM_API tram_status tram_verify(const char* options_json, char** report,
                                 int* num_failed);

TRAM_API void tram_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TRAM_TRAM_H_ */
