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

// qlc command-line front end. Links only the C interface.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qlc/qlc.h"

namespace {

struct OptionSpec {
  const char* name;
  const char* help;
};

struct CommandSpec {
  const char* name;
  const char* help;
  std::vector<OptionSpec> options;
};

const std::vector<CommandSpec>& specs() {
  static const std::vector<CommandSpec> all = {
      {"gen-samples", "Generate and label a sample set",
       {{"kind", "classification or regression"},
        {"count", "number of samples"},
        {"role", "stream name: train, test, apply, ... (default train)"},
        {"name", "output file name"}}},
      {"train-mlp", "Train the classifier; writes the best snapshot and the history CSV",
       {{"train", "training sample file (generated if omitted)"},
        {"test", "testing sample file (generated if omitted)"},
        {"count", "training samples to use"},
        {"name", "model file name"}}},
      {"table1", "Classifier performance against training-set size",
       {{"train", "training pool file"}, {"test", "testing file"}, {"apply", "application file"}, {"sizes", "e.g. 1000,10000"}}},
      {"region-map", "Predicted vs simulated labels on a theta_1 x theta_2 grid",
       {{"model", "classifier model file"}, {"resolution", "grid points per axis"}}},
      {"tune-grnn", "Sweep the GRNN smoothing parameter",
       {{"train", "regression sample file (generated if omitted)"}, {"count", "training samples to use"}, {"name", "model file name"}}},
      {"table2", "GRNN performance against training-set size",
       {{"train", "regression sample pool file"}, {"sizes", "e.g. 5000,10000"}}},
      {"infidelity-dist", "Infidelity histograms of the designed and baseline controls",
       {{"model", "GRNN model file"}, {"train", "regression sample file"}, {"count", "labels to use"},
        {"pind", "state-independent coefficients p1,p2 (optimized if omitted)"}}},
      {"baseline-pind", "Optimize a state-independent P and evaluate both baselines", {}},
      {"trajectory", "Export one controlled trajectory",
       {{"kind", "classification or regression system"},
        {"state", "theta1,theta2,phi1,phi2"},
        {"weights", "p1,p2,p3"},
        {"control", "1-based control index or 'all'"},
        {"stride", "record every n-th step"},
        {"name", "output file name"}}},
      {"config", "Print the resolved configuration", {}},
  };
  return all;
}

void print_line(const char* line, void*) {
  std::printf("%s\n", line);
  std::fflush(stdout);
}

int exit_code(qlc_status st) {
  switch (st) {
    case QLC_OK:
      return 0;
    case QLC_CONFIG_ERROR:
    case QLC_INVALID_ARGUMENT:
      return 2;
    case QLC_NUMERIC_ERROR:
      return 3;
    default:
      return 1;
  }
}

int report_failure(qlc_status st) {
  std::fprintf(stderr, "qlc: error: %s\n", qlc_last_error());
  return exit_code(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Initial-state-adaptive Lyapunov control experiments"};
  app.set_version_flag("--version", std::string(qlc_version()));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool paper_scale = false, allow_mismatch = false;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "override a config key (key=value), repeatable");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out, "output directory");
  app.add_flag("--paper-scale", paper_scale, "use the full-size experiment counts");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--allow-mismatch", allow_mismatch, "load sample files whose fingerprint differs from the config");

  std::map<std::string, std::map<std::string, std::string>> values;
  for (const auto& spec : specs()) {
    auto* sub = app.add_subcommand(spec.name, spec.help);
    for (const auto& o : spec.options) sub->add_option(std::string("--") + o.name, values[spec.name][o.name], o.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  qlc_config* cfg = nullptr;
  qlc_status st = config_path.empty() ? qlc_config_new(&cfg) : qlc_config_load(config_path.c_str(), &cfg);
  if (st != QLC_OK) return report_failure(st);

  auto set = [&](const std::string& key, const std::string& value) {
    if (st == QLC_OK) st = qlc_config_set(cfg, key.c_str(), value.c_str());
  };
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "qlc: error: --set expects key=value, got '%s'\n", kv.c_str());
      qlc_config_free(cfg);
      return 2;
    }
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (*seed_opt) set("seed", std::to_string(seed));
  if (!out.empty()) set("out", out);
  if (paper_scale) set("paper_scale", "true");
  if (*threads_opt) set("threads", std::to_string(threads));
  if (st != QLC_OK) {
    const int code = report_failure(st);
    qlc_config_free(cfg);
    return code;
  }

  const auto* sub = app.get_subcommands().front();
  std::vector<std::string> keys, vals;
  for (const auto& [key, value] : values[sub->get_name()]) {
    if (sub->count("--" + key) == 0) continue;
    keys.push_back(key);
    vals.push_back(value);
  }
  if (allow_mismatch) {
    keys.emplace_back("allow_mismatch");
    vals.emplace_back("true");
  }
  std::vector<const char*> kp, vp;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    kp.push_back(keys[i].c_str());
    vp.push_back(vals[i].c_str());
  }
  st = qlc_run(cfg, sub->get_name().c_str(), kp.data(), vp.data(), kp.size(), print_line, nullptr, nullptr);
  qlc_config_free(cfg);
  return st == QLC_OK ? 0 : report_failure(st);
}
