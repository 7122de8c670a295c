// Copyright 2026 The qlc Authors
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

/* Exercises the C interface from plain C. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "qlc/qlc.h"

static int failures = 0;

#define CHECK(cond)                                             \
  do {                                                          \
    if (!(cond)) {                                              \
      fprintf(stderr, "%s:%d: CHECK(%s)\n", __FILE__, __LINE__, #cond); \
      ++failures;                                               \
    }                                                           \
  } while (0)

static int lines = 0;
static void count_line(const char* line, void* user) {
  (void)line;
  ++*(int*)user;
}

int main(int argc, char** argv) {
  const char* out = argc > 1 ? argv[1] : "capi-out";
  qlc_config* cfg = NULL;
  char buf[256];
  size_t needed = 0;
  uint64_t a = 0, b = 0;

  CHECK(strcmp(qlc_version(), "1.0.0") == 0);
  CHECK(qlc_config_new(&cfg) == QLC_OK);
  CHECK(qlc_config_get(cfg, "horizon", NULL, 0, &needed) == QLC_OK && needed == 3);
  CHECK(qlc_config_get(cfg, "horizon", buf, sizeof buf, NULL) == QLC_OK && strcmp(buf, "20") == 0);
  CHECK(qlc_config_get(cfg, "n_apply", buf, sizeof buf, NULL) == QLC_OK && strcmp(buf, "10000") == 0);
  CHECK(qlc_config_get(cfg, "horizon", buf, 2, NULL) == QLC_INVALID_ARGUMENT);

  /* errors carry a status and a message */
  CHECK(qlc_config_set(cfg, "no_such_key", "1") == QLC_CONFIG_ERROR);
  CHECK(strstr(qlc_last_error(), "no_such_key") != NULL);
  CHECK(qlc_config_set(cfg, "strength", "abc") == QLC_CONFIG_ERROR);
  CHECK(qlc_run(cfg, "no-such-command", NULL, NULL, 0, NULL, NULL, NULL) == QLC_CONFIG_ERROR);

  /* checksum ignores threads and out */
  CHECK(qlc_config_checksum(cfg, &a) == QLC_OK);
  CHECK(qlc_config_set(cfg, "threads", "4") == QLC_OK);
  CHECK(qlc_config_set(cfg, "out", out) == QLC_OK);
  CHECK(qlc_config_checksum(cfg, &b) == QLC_OK && a == b);
  CHECK(qlc_config_set(cfg, "seed", "9") == QLC_OK);
  CHECK(qlc_config_checksum(cfg, &b) == QLC_OK && a != b);

  CHECK(qlc_config_key_count() > 30);
  CHECK(qlc_config_key(qlc_config_key_count()) == NULL);
  CHECK(qlc_command_count() == 10);

  /* a goal-state input stays at the goal */
  {
    const double x[4] = {0.3, 0.0, 1.0, 2.0};
    const double w[3] = {1.0, 1.0, 0.0};
    double f = 0.0;
    CHECK(qlc_benchmark_fidelity(cfg, 0, x, 4, w, 3, 1, &f) == QLC_OK && fabs(f - 1.0) < 1e-9);
    CHECK(qlc_benchmark_fidelity(cfg, 0, x, 3, w, 3, 1, &f) == QLC_INVALID_ARGUMENT);
  }

  /* run a small pipeline and use the resulting model */
  {
    const char* keys[] = {"kind", "count"};
    const char* vals[] = {"classification", "120"};
    qlc_report* rep = NULL;
    double frac = 0.0;
    CHECK(qlc_config_set(cfg, "max_iters", "50") == QLC_OK);
    CHECK(qlc_config_set(cfg, "n_test", "40") == QLC_OK);
    CHECK(qlc_run(cfg, "gen-samples", keys, vals, 2, count_line, &lines, &rep) == QLC_OK);
    CHECK(lines > 0);
    CHECK(qlc_report_file_count(rep) == 1);
    CHECK(qlc_report_metric(rep, "fraction_1", &frac) == QLC_OK && frac > 0.3 && frac < 0.9);
    CHECK(qlc_report_metric(rep, "nothing", &frac) == QLC_INVALID_ARGUMENT);
    qlc_report_free(rep);
  }
  {
    char path[512];
    const char* keys[] = {"train", "count"};
    const char* vals[] = {path, "120"};
    qlc_report* rep = NULL;
    qlc_model* model = NULL;
    double x[4] = {0.5, 1.0, 0.0, 3.0};
    double y[3];
    snprintf(path, sizeof path, "%s/samples-classification-train-120.txt", out);
    CHECK(qlc_run(cfg, "train-mlp", keys, vals, 2, NULL, NULL, &rep) == QLC_OK);
    qlc_report_free(rep);
    snprintf(path, sizeof path, "%s/mlp.json", out);
    CHECK(qlc_model_load(path, &model) == QLC_OK);
    CHECK(qlc_model_type(model) == QLC_MODEL_MLP);
    CHECK(qlc_model_inputs(model) == 4 && qlc_model_outputs(model) == 3);
    CHECK(qlc_model_predict(model, x, 4, y, 3) == QLC_OK);
    CHECK(y[0] > 0 && y[0] < 1 && y[1] > 0 && y[1] < 1);
    CHECK(qlc_model_predict(model, x, 4, y, 2) == QLC_INVALID_ARGUMENT);
    qlc_model_free(model);
    CHECK(qlc_model_load("/nonexistent/model.json", &model) == QLC_IO_ERROR);
  }

  qlc_config_free(cfg);
  if (failures) fprintf(stderr, "%d check(s) failed\n", failures);
  return failures ? 1 : 0;
}
