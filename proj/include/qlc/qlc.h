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

/* C interface to the qlc library. Every function returns a qlc_status;
 * on failure qlc_last_error() describes the error for the calling thread.
 * Objects are opaque handles released with the matching *_free call.
 * Strings returned by the library stay valid until the owning handle is
 * freed (or, for qlc_last_error, until the next failing call). */

#ifndef QLC_QLC_H
#define QLC_QLC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QLC_API __declspec(dllexport)
#else
#define QLC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qlc_status {
  QLC_OK = 0,
  QLC_ERROR = 1,
  QLC_CONFIG_ERROR = 2,
  QLC_NUMERIC_ERROR = 3,
  QLC_IO_ERROR = 4,
  QLC_PARSE_ERROR = 5,
  QLC_VALIDATION_ERROR = 6,
  QLC_INVALID_ARGUMENT = 7
} qlc_status;

typedef struct qlc_config qlc_config;
typedef struct qlc_report qlc_report;
typedef struct qlc_model qlc_model;

typedef void (*qlc_log_fn)(const char* line, void* user);

QLC_API const char* qlc_version(void);
QLC_API const char* qlc_last_error(void);
/* Library warnings go to stderr unless a handler is installed; NULL restores
 * the default. */
QLC_API void qlc_set_warning_handler(qlc_log_fn fn, void* user);

/* Configuration */
QLC_API qlc_status qlc_config_new(qlc_config** out);
QLC_API qlc_status qlc_config_load(const char* path, qlc_config** out);
QLC_API qlc_status qlc_config_parse(const char* text, qlc_config** out);
QLC_API void qlc_config_free(qlc_config* cfg);
QLC_API qlc_status qlc_config_set(qlc_config* cfg, const char* key, const char* value);
/* Copies the resolved value (NUL-terminated) into buf; *needed receives the
 * size including the terminator, so a NULL buf may be used to query it. */
QLC_API qlc_status qlc_config_get(const qlc_config* cfg, const char* key, char* buf, size_t cap, size_t* needed);
QLC_API qlc_status qlc_config_checksum(const qlc_config* cfg, uint64_t* out);
QLC_API size_t qlc_config_key_count(void);
QLC_API const char* qlc_config_key(size_t index);

/* Commands */
QLC_API size_t qlc_command_count(void);
QLC_API const char* qlc_command_name(size_t index);
/* Runs a command; keys/values are its named options (e.g. "kind" ->
 * "regression"). `log` may be NULL. *out may be NULL if no report is wanted. */
QLC_API qlc_status qlc_run(const qlc_config* cfg, const char* command, const char* const* keys,
                           const char* const* values, size_t nargs, qlc_log_fn log, void* user, qlc_report** out);
QLC_API void qlc_report_free(qlc_report* report);
QLC_API size_t qlc_report_file_count(const qlc_report* report);
QLC_API const char* qlc_report_file(const qlc_report* report, size_t index);
QLC_API size_t qlc_report_metric_count(const qlc_report* report);
QLC_API const char* qlc_report_metric_name(const qlc_report* report, size_t index);
QLC_API qlc_status qlc_report_metric(const qlc_report* report, const char* name, double* out);

/* Trained models (MLP classifier or GRNN regressor) */
typedef enum qlc_model_kind { QLC_MODEL_MLP = 0, QLC_MODEL_GRNN = 1 } qlc_model_kind;

QLC_API qlc_status qlc_model_load(const char* path, qlc_model** out);
QLC_API void qlc_model_free(qlc_model* model);
QLC_API qlc_model_kind qlc_model_type(const qlc_model* model);
QLC_API size_t qlc_model_inputs(const qlc_model* model);
QLC_API size_t qlc_model_outputs(const qlc_model* model);
/* Raw network outputs (MLP) or predicted coefficients (GRNN, at the stored
 * sigma). x holds theta_1..theta_{n-1}, phi_1..phi_{n-1}. */
QLC_API qlc_status qlc_model_predict(const qlc_model* model, const double* x, size_t nx, double* y, size_t ny);

/* Final fidelity of the configured benchmark: regression != 0 selects the
 * regression system. `weights` holds all n coefficients of P; control is
 * 1-based, 0 switches every control on. */
QLC_API qlc_status qlc_benchmark_fidelity(const qlc_config* cfg, int regression, const double* x, size_t nx,
                                          const double* weights, size_t nw, int control, double* out);

#ifdef __cplusplus
}
#endif

#endif /* QLC_QLC_H */
