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

#include "qlc/qlc.h"

#include <cstring>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "json.hpp"
#include "qlc/error.hpp"
#include "qlc/experiment.hpp"
#include "qlc/grnn.hpp"
#include "qlc/mlp.hpp"
#include "qlc/textio.hpp"
#include "qlc/version.hpp"

struct qlc_config {
  qlc::ExperimentConfig cfg;
  std::string scratch;
};

struct qlc_report {
  qlc::CommandReport report;
  std::vector<std::string> metric_names;
};

struct qlc_model {
  std::variant<std::pair<qlc::MlpNetwork, qlc::Normalizer>, qlc::GrnnModel> model;
};

namespace {

thread_local std::string last_error;

qlc_status fail(qlc_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
qlc_status guarded(F&& body) {
  try {
    body();
    return QLC_OK;
  } catch (const qlc::ConfigError& e) {
    return fail(QLC_CONFIG_ERROR, e.what());
  } catch (const qlc::NumericError& e) {
    return fail(QLC_NUMERIC_ERROR, e.what());
  } catch (const qlc::IoError& e) {
    return fail(QLC_IO_ERROR, e.what());
  } catch (const qlc::ParseError& e) {
    return fail(QLC_PARSE_ERROR, e.what());
  } catch (const qlc::ValidationError& e) {
    return fail(QLC_VALIDATION_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(QLC_ERROR, e.what());
  } catch (...) {
    return fail(QLC_ERROR, "unknown error");
  }
}

#define QLC_REQUIRE(cond, what) \
  if (!(cond)) return fail(QLC_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* qlc_version(void) { return qlc::kVersion; }

const char* qlc_last_error(void) { return last_error.c_str(); }

void qlc_set_warning_handler(qlc_log_fn fn, void* user) {
  if (fn == nullptr) {
    qlc::set_warning_sink([](const std::string& m) { std::cerr << "qlc: warning: " << m << '\n'; });
  } else {
    qlc::set_warning_sink([fn, user](const std::string& m) { fn(m.c_str(), user); });
  }
}

qlc_status qlc_config_new(qlc_config** out) {
  QLC_REQUIRE(out, "out is NULL");
  *out = new qlc_config{};
  return QLC_OK;
}

qlc_status qlc_config_load(const char* path, qlc_config** out) {
  QLC_REQUIRE(path && out, "NULL argument");
  return guarded([&] { *out = new qlc_config{qlc::ExperimentConfig::load(path), {}}; });
}

qlc_status qlc_config_parse(const char* text, qlc_config** out) {
  QLC_REQUIRE(text && out, "NULL argument");
  return guarded([&] { *out = new qlc_config{qlc::ExperimentConfig::parse(text), {}}; });
}

void qlc_config_free(qlc_config* cfg) { delete cfg; }

qlc_status qlc_config_set(qlc_config* cfg, const char* key, const char* value) {
  QLC_REQUIRE(cfg && key && value, "NULL argument");
  return guarded([&] { cfg->cfg.set(key, value); });
}

qlc_status qlc_config_get(const qlc_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  QLC_REQUIRE(cfg && key, "NULL argument");
  std::string value;
  const auto st = guarded([&] {
    auto resolved = cfg->cfg;
    resolved.resolve();
    value = resolved.get(key);
  });
  if (st != QLC_OK) return st;
  if (needed) *needed = value.size() + 1;
  if (buf == nullptr) return QLC_OK;
  QLC_REQUIRE(cap > value.size(), "buffer too small");
  std::memcpy(buf, value.c_str(), value.size() + 1);
  return QLC_OK;
}

qlc_status qlc_config_checksum(const qlc_config* cfg, uint64_t* out) {
  QLC_REQUIRE(cfg && out, "NULL argument");
  return guarded([&] {
    auto resolved = cfg->cfg;
    resolved.resolve();
    *out = resolved.checksum();
  });
}

size_t qlc_config_key_count(void) { return qlc::config_keys().size(); }

const char* qlc_config_key(size_t index) {
  static const std::vector<std::string> keys = qlc::config_keys();
  return index < keys.size() ? keys[index].c_str() : nullptr;
}

size_t qlc_command_count(void) { return qlc::command_names().size(); }

const char* qlc_command_name(size_t index) {
  static const std::vector<std::string> names = qlc::command_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

qlc_status qlc_run(const qlc_config* cfg, const char* command, const char* const* keys, const char* const* values,
                   size_t nargs, qlc_log_fn log, void* user, qlc_report** out) {
  QLC_REQUIRE(cfg && command, "NULL argument");
  QLC_REQUIRE(nargs == 0 || (keys && values), "NULL option arrays");
  qlc::CommandArgs args;
  for (size_t i = 0; i < nargs; ++i) {
    QLC_REQUIRE(keys[i] && values[i], "NULL option entry");
    args[keys[i]] = values[i];
  }
  qlc::LogSink sink;
  if (log) sink = [log, user](const std::string& line) { log(line.c_str(), user); };
  return guarded([&] {
    auto report = std::make_unique<qlc_report>();
    report->report = qlc::run_command(cfg->cfg, command, args, sink);
    for (const auto& [name, _] : report->report.metrics) report->metric_names.push_back(name);
    if (out) *out = report.release();
  });
}

void qlc_report_free(qlc_report* report) { delete report; }

size_t qlc_report_file_count(const qlc_report* report) { return report ? report->report.files.size() : 0; }

const char* qlc_report_file(const qlc_report* report, size_t index) {
  return report && index < report->report.files.size() ? report->report.files[index].c_str() : nullptr;
}

size_t qlc_report_metric_count(const qlc_report* report) { return report ? report->metric_names.size() : 0; }

const char* qlc_report_metric_name(const qlc_report* report, size_t index) {
  return report && index < report->metric_names.size() ? report->metric_names[index].c_str() : nullptr;
}

qlc_status qlc_report_metric(const qlc_report* report, const char* name, double* out) {
  QLC_REQUIRE(report && name && out, "NULL argument");
  const auto it = report->report.metrics.find(name);
  if (it == report->report.metrics.end()) return fail(QLC_INVALID_ARGUMENT, std::string("no metric '") + name + "'");
  *out = it->second;
  return QLC_OK;
}

qlc_status qlc_model_load(const char* path, qlc_model** out) {
  QLC_REQUIRE(path && out, "NULL argument");
  return guarded([&] {
    const std::string text = qlc::read_file(path);
    std::string type;
    try {
      type = nlohmann::json::parse(text).value("type", "");
    } catch (const nlohmann::json::exception& e) {
      throw qlc::ParseError(std::string("model file is not JSON: ") + e.what());
    }
    if (type == "grnn") *out = new qlc_model{qlc::GrnnModel::from_json(text)};
    else *out = new qlc_model{qlc::mlp_from_json(text)};
  });
}

void qlc_model_free(qlc_model* model) { delete model; }

qlc_model_kind qlc_model_type(const qlc_model* model) {
  return model && model->model.index() == 1 ? QLC_MODEL_GRNN : QLC_MODEL_MLP;
}

size_t qlc_model_inputs(const qlc_model* model) {
  if (!model) return 0;
  if (const auto* g = std::get_if<qlc::GrnnModel>(&model->model)) return g->inputs();
  return std::get<0>(model->model).first.inputs();
}

size_t qlc_model_outputs(const qlc_model* model) {
  if (!model) return 0;
  if (const auto* g = std::get_if<qlc::GrnnModel>(&model->model)) return g->outputs();
  return std::get<0>(model->model).first.outputs();
}

qlc_status qlc_model_predict(const qlc_model* model, const double* x, size_t nx, double* y, size_t ny) {
  QLC_REQUIRE(model && x && y, "NULL argument");
  QLC_REQUIRE(nx == qlc_model_inputs(model) && ny == qlc_model_outputs(model), "input/output sizes do not match the model");
  return guarded([&] {
    const std::span<const double> in(x, nx);
    std::vector<double> r;
    if (const auto* g = std::get_if<qlc::GrnnModel>(&model->model)) {
      if (!g->sigma()) throw qlc::ValidationError("GRNN model has no stored sigma");
      r = g->predict(in);
    } else {
      const auto& [net, norm] = std::get<0>(model->model);
      r = qlc::mlp_forward(net, norm.apply(in));
    }
    std::copy(r.begin(), r.end(), y);
  });
}

qlc_status qlc_benchmark_fidelity(const qlc_config* cfg, int regression, const double* x, size_t nx,
                                  const double* weights, size_t nw, int control, double* out) {
  QLC_REQUIRE(cfg && x && weights && out, "NULL argument");
  QLC_REQUIRE(nx == 4 && nw == 3, "benchmark states have 4 parameters and 3 weights");
  return guarded([&] {
    auto resolved = cfg->cfg;
    resolved.resolve();
    const auto system = regression ? resolved.regression_system() : resolved.classification_system();
    qlc::Scheme scheme;
    if (control == 0) {
      for (std::size_t k = 0; k < system.controls().size(); ++k) scheme.push_back(k);
    } else {
      if (control < 0 || static_cast<std::size_t>(control) > system.controls().size())
        throw qlc::ValidationError("control index out of range");
      scheme.push_back(static_cast<std::size_t>(control - 1));
    }
    const auto params = qlc::InitialStateParams::from_input_vector(std::span<const double>(x, nx));
    const qlc::LyapunovWeights w(std::vector<double>(weights, weights + nw), system.goal());
    *out = qlc::final_fidelity(system, qlc::state_from_params(params, system.basis()), w, scheme, system.default_dt());
  });
}

}  // extern "C"
