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

#include "qlc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <type_traits>

#include "qlc/benchmark.hpp"
#include "qlc/error.hpp"
#include "qlc/grnn.hpp"
#include "qlc/parallel.hpp"
#include "qlc/textio.hpp"
#include "qlc/version.hpp"

namespace qlc {

namespace {

// ---- config values as text ------------------------------------------------

std::string to_text(double v) { return format_double(v); }
std::string to_text(bool v) { return v ? "true" : "false"; }
std::string to_text(const std::string& v) { return v; }
template <class T>
  requires std::is_integral_v<T>
std::string to_text(T v) {
  return std::to_string(v);
}
template <class T>
std::string to_text(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_text(v[i]);
  return s;
}

void from_text(std::string_view t, double& v) { v = parse_double(t); }
void from_text(std::string_view t, std::string& v) { v = std::string(t); }
void from_text(std::string_view t, bool& v) {
  if (t == "true" || t == "1" || t == "yes") v = true;
  else if (t == "false" || t == "0" || t == "no") v = false;
  else throw ParseError("not a boolean: '" + std::string(t) + "'");
}
template <class T>
  requires std::is_integral_v<T>
void from_text(std::string_view t, T& v) {
  const long long x = parse_int(t);
  if (x < 0 && std::is_unsigned_v<T>) throw ParseError("negative value: '" + std::string(t) + "'");
  v = static_cast<T>(x);
}
template <class T>
void from_text(std::string_view t, std::vector<T>& v) {
  v.clear();
  for (auto part : split(t, ',')) {
    T x{};
    from_text(trim(part), x);
    v.push_back(x);
  }
}

struct Field {
  std::string key;
  bool scaled;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view)> set;
};

template <class Ref>
Field field(std::string key, Ref ref, bool scaled = false) {
  return {std::move(key), scaled,
          [ref](const ExperimentConfig& c) { return to_text(ref(const_cast<ExperimentConfig&>(c))); },
          [ref](ExperimentConfig& c, std::string_view v) { from_text(v, ref(c)); }};
}

#define QLC_FIELD(name, expr, ...) field(name, [](ExperimentConfig& c) -> auto& { return expr; } __VA_OPT__(, ) __VA_ARGS__)

const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      QLC_FIELD("seed", c.seed),
      QLC_FIELD("threads", c.threads),
      QLC_FIELD("out", c.out),
      QLC_FIELD("paper_scale", c.paper_scale),
      QLC_FIELD("omega2", c.omega2),
      QLC_FIELD("omega3", c.omega3),
      QLC_FIELD("coupling", c.coupling),
      QLC_FIELD("strength", c.strength),
      QLC_FIELD("horizon", c.horizon),
      QLC_FIELD("reg_horizon", c.reg_horizon),
      QLC_FIELD("goal", c.goal),
      QLC_FIELD("candidates", c.candidates),
      QLC_FIELD("reg_control", c.reg_control),
      QLC_FIELD("class_weights", c.class_weights),
      QLC_FIELD("fid_threshold", c.fid_threshold),
      QLC_FIELD("tie_eps", c.tie_eps),
      QLC_FIELD("hidden", c.hidden),
      QLC_FIELD("lr0", c.train.lr0),
      QLC_FIELD("momentum", c.train.momentum),
      QLC_FIELD("lr_up", c.train.lr_up),
      QLC_FIELD("lr_down", c.train.lr_down),
      QLC_FIELD("max_rise", c.train.max_rise),
      QLC_FIELD("lr_max", c.train.lr_max),
      QLC_FIELD("max_iters", c.train.max_iters, true),
      QLC_FIELD("eval_every", c.train.eval_every),
      QLC_FIELD("table1_sizes", c.table1_sizes, true),
      QLC_FIELD("n_test", c.n_test),
      QLC_FIELD("n_apply", c.n_apply, true),
      QLC_FIELD("region_resolution", c.region_resolution, true),
      QLC_FIELD("reg_upper", c.reg_upper),
      QLC_FIELD("restarts", c.restarts),
      QLC_FIELD("nm_x_tol", c.search.x_tol),
      QLC_FIELD("nm_f_tol", c.search.f_tol),
      QLC_FIELD("nm_max_evals", c.search.max_evals),
      QLC_FIELD("table2_sizes", c.table2_sizes, true),
      QLC_FIELD("reg_apply", c.reg_apply, true),
      QLC_FIELD("n_validation", c.n_validation),
      QLC_FIELD("sigma_factor", c.sigma_factor),
      QLC_FIELD("pind_states", c.pind_states, true),
      QLC_FIELD("pind_restarts", c.pind_restarts, true),
      QLC_FIELD("fixed_weights", c.fixed_weights),
      QLC_FIELD("hist_min", c.hist_min),
      QLC_FIELD("hist_max", c.hist_max),
      QLC_FIELD("hist_bins", c.hist_bins),
  };
  return all;
}

#undef QLC_FIELD

const Field& find_field(const std::string& key) {
  for (const auto& f : fields())
    if (f.key == key) return f;
  throw ConfigError("unknown config key '" + key + "'");
}

void apply_scale(ExperimentConfig& c, const std::string& key) {
  const bool p = c.paper_scale;
  if (key == "max_iters") c.train.max_iters = p ? 100000 : 20000;
  else if (key == "table1_sizes")
    c.table1_sizes = p ? std::vector<std::size_t>{10, 100, 1000, 10000, 40000} : std::vector<std::size_t>{10, 100, 1000, 10000};
  else if (key == "n_apply") c.n_apply = p ? 50000 : 10000;
  else if (key == "region_resolution") c.region_resolution = p ? 500 : 100;
  else if (key == "table2_sizes")
    c.table2_sizes = p ? std::vector<std::size_t>{5000, 10000, 50000, 100000} : std::vector<std::size_t>{5000, 10000};
  else if (key == "reg_apply") c.reg_apply = p ? 100000 : 10000;
  else if (key == "pind_states") c.pind_states = p ? 2000 : 500;
  else if (key == "pind_restarts") c.pind_restarts = p ? 8 : 4;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool all_positive(const std::vector<std::size_t>& v) {
  return !v.empty() && std::all_of(v.begin(), v.end(), [](std::size_t x) { return x > 0; });
}

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

// ---- ExperimentConfig -------------------------------------------------------

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const auto& f = find_field(key);
  try {
    f.set(*this, trim(value));
  } catch (const ParseError& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
  explicit_keys.insert(key);
}

std::string ExperimentConfig::get(const std::string& key) const { return find_field(key).get(*this); }

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = trim(std::string_view(line).substr(0, line.find('#')));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key(trim(s.substr(0, eq)));
    try {
      c.set(key, std::string(trim(s.substr(eq + 1))));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse(text);
}

void ExperimentConfig::resolve() {
  for (const auto& f : fields())
    if (f.scaled && !explicit_keys.count(f.key)) apply_scale(*this, f.key);

  require(threads >= 1, "threads must be >= 1");
  require(!out.empty(), "out must name a directory");
  for (double v : {omega2, omega3, coupling, strength, horizon, reg_horizon})
    require(std::isfinite(v) && v > 0, "physical parameters must be positive");
  require(goal >= 1 && goal <= 3, "goal must be 1, 2 or 3");
  require(!candidates.empty(), "candidates must list at least one control");
  for (auto k : candidates) require(k == 1 || k == 2, "candidates are controls 1 and/or 2");
  require(std::set<std::size_t>(candidates.begin(), candidates.end()).size() == candidates.size(),
          "candidates repeat a control");
  require(reg_control == 1 || reg_control == 2, "reg_control must be 1 or 2");
  require(class_weights.size() == 3, "class_weights needs three coefficients");
  for (std::size_t l = 0; l < 3; ++l) {
    if (l + 1 == goal) require(class_weights[l] == 0.0, "class_weights must be 0 at the goal");
    else require(class_weights[l] > 0.0, "class_weights must be positive away from the goal");
  }
  require(fid_threshold > 0 && fid_threshold <= 1, "fid_threshold must lie in (0, 1]");
  require(tie_eps >= 0, "tie_eps must be >= 0");
  require(all_positive(hidden), "hidden layer sizes must be positive");
  try {
    train.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  require(all_positive(table1_sizes), "table1_sizes must be positive");
  require(n_test >= 1 && n_apply >= 1 && region_resolution >= 2, "n_test, n_apply >= 1 and region_resolution >= 2");
  require(reg_upper.size() == 2 && reg_upper[0] > 0 && reg_upper[1] > 0, "reg_upper needs two positive bounds");
  require(restarts >= 1 && pind_restarts >= 1, "restarts must be >= 1");
  require(search.x_tol > 0 && search.f_tol > 0 && search.max_evals >= 3, "invalid Nelder-Mead settings");
  require(all_positive(table2_sizes), "table2_sizes must be positive");
  require(reg_apply >= 1 && n_validation >= 1 && pind_states >= 1, "state counts must be >= 1");
  require(sigma_factor > 0, "sigma_factor must be positive");
  require(fixed_weights.size() == 2 && fixed_weights[0] > 0 && fixed_weights[1] > 0,
          "fixed_weights needs two positive coefficients");
  require(hist_min < hist_max && hist_bins >= 1, "histogram range is empty");
}

std::string ExperimentConfig::dump() const {
  std::string s;
  for (const auto& f : fields()) s += f.key + " = " + f.get(*this) + "\n";
  return s;
}

std::uint64_t ExperimentConfig::checksum() const {
  std::uint64_t h = fnv1a("");
  for (const auto& f : fields()) {
    if (f.key == "threads" || f.key == "out") continue;
    h = fnv1a(f.key + "=" + f.get(*this) + "\n", h);
  }
  return h;
}

ControlledSystem ExperimentConfig::classification_system() const {
  const ThreeLevelParams p{1.0, omega2, omega3, coupling};
  std::vector<HermitianOperator> controls;
  for (auto k : candidates) controls.push_back(three_level_control(static_cast<int>(k)));
  return ControlledSystem(three_level_drift(p), std::move(controls), strength, horizon, goal - 1);
}

ControlledSystem ExperimentConfig::regression_system() const {
  const ThreeLevelParams p{1.0, omega2, omega3, coupling};
  return ControlledSystem(three_level_drift(p), {three_level_control(static_cast<int>(reg_control))}, strength,
                          reg_horizon, goal - 1);
}

GenerateOptions ExperimentConfig::generate_options() const {
  GenerateOptions o;
  o.classification.weights = class_weights;
  o.classification.fid_threshold = fid_threshold;
  o.classification.tie_eps = tie_eps;
  o.regression.bounds = BoxBounds({0.0, 0.0}, reg_upper);
  o.regression.restarts = restarts;
  o.regression.search = search;
  o.threads = threads;
  return o;
}

std::uint64_t ExperimentConfig::stream_seed(const std::string& name) const { return Rng::derive(seed, name, 0); }

// ---- baselines --------------------------------------------------------------

std::vector<double> fixed_weight_fidelities(const ControlledSystem& system, std::span<const InitialStateParams> states,
                                            std::span<const double> free, unsigned threads) {
  RowMatrix coeffs(0, free.size());
  for (std::size_t i = 0; i < states.size(); ++i) coeffs.append(free);
  return coefficient_fidelities(system, states, coeffs, threads);
}

PindResult optimize_pind(const ControlledSystem& system, std::span<const InitialStateParams> states,
                         const BoxBounds& bounds, int restarts, std::uint64_t seed, const NelderMeadOptions& options,
                         unsigned threads) {
  if (states.empty()) throw ValidationError("P_ind needs at least one state");
  const std::size_t n = states.size();
  const auto batch = [&](std::span<const std::vector<double>> pts) {
    std::vector<InitialStateParams> all;
    RowMatrix coeffs(0, bounds.dim());
    for (const auto& p : pts)
      for (std::size_t i = 0; i < n; ++i) {
        all.push_back(states[i]);
        coeffs.append(p);
      }
    const auto fid = coefficient_fidelities(system, all, coeffs, threads);
    std::vector<double> eps;
    for (std::size_t j = 0; j < pts.size(); ++j)
      eps.push_back(avg_log_infidelity(std::span<const double>(fid).subspan(j * n, n)).value);
    return eps;
  };
  auto search = minimize_multistart_batch(batch, bounds, restarts, seed, options);
  std::vector<double> free(search.x_best);
  for (auto& p : free) p = std::max(p, kWeightFloor);
  const double eps = search.f_best;
  return {std::move(free), eps, std::move(search)};
}

std::vector<InitialStateParams> region_grid(std::size_t resolution) {
  if (resolution < 2) throw ValidationError("region grid needs resolution >= 2");
  std::vector<InitialStateParams> out;
  out.reserve(resolution * resolution);
  const double step = (std::numbers::pi / 2) / static_cast<double>(resolution - 1);
  for (std::size_t i = 0; i < resolution; ++i)
    for (std::size_t j = 0; j < resolution; ++j)
      out.emplace_back(std::vector<double>{i * step, j * step}, std::vector<double>{0.0, 0.0});
  return out;
}

// ---- commands ---------------------------------------------------------------

namespace {

struct Context {
  const ExperimentConfig& cfg;
  const std::string& command;
  const CommandArgs& args;
  const LogSink& log;
  ControlledSystem cls;
  ControlledSystem reg;
  CommandReport report{};

  void say(const std::string& msg) const {
    if (log) log(msg);
  }

  bool has(const std::string& key) const { return args.count(key) > 0; }

  std::string arg(const std::string& key, const std::string& fallback) const {
    const auto it = args.find(key);
    return it == args.end() ? fallback : it->second;
  }

  std::string need(const std::string& key) const {
    const auto it = args.find(key);
    if (it == args.end()) throw ConfigError(command + " needs --" + key);
    return it->second;
  }

  std::size_t count_arg(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    try {
      const long long v = parse_int(need(key));
      if (v < 1) throw ParseError("must be >= 1");
      return static_cast<std::size_t>(v);
    } catch (const ParseError& e) {
      throw ConfigError("--" + key + ": " + e.what());
    }
  }

  std::string path(const std::string& name) const { return (std::filesystem::path(cfg.out) / name).string(); }

  void metric(const std::string& name, double v) { report.metrics[name] = v; }

  void write(const std::string& name, const std::string& text) {
    write_file(path(name), text);
    report.files.push_back(path(name));
    say("wrote " + path(name));
  }

  void write_table(const std::string& name, CsvTable table) {
    table.meta["command"] = command;
    table.meta["config"] = hex(cfg.checksum());
    table.meta["generator"] = std::string("qlc ") + kVersion;
    std::ostringstream s;
    write_csv(s, table);
    write(name, s.str());
  }
};

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> v;
  try {
    from_text(text, v);
  } catch (const ParseError& e) {
    throw ConfigError("--" + key + ": " + e.what());
  }
  return v;
}

SampleKind kind_arg(const Context& c) {
  try {
    return parse_sample_kind(c.arg("kind", "classification"));
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
}

const ControlledSystem& system_for(const Context& c, SampleKind kind) {
  return kind == SampleKind::kClassification ? c.cls : c.reg;
}

std::string set_file_name(SampleKind kind, const std::string& role, std::size_t count) {
  return "samples-" + to_string(kind) + "-" + role + "-" + std::to_string(count) + ".txt";
}

void summarize_set(Context& c, const SampleSet& set) {
  if (set.kind == SampleKind::kClassification) {
    std::vector<double> frac(set.outputs, 0.0);
    for (const auto& s : set.samples) frac[argmax(s.y)] += 1.0 / static_cast<double>(set.size());
    std::string line = "label fractions:";
    for (std::size_t k = 0; k < frac.size(); ++k) {
      const std::string name = k + 1 == frac.size() ? "others" : "H" + std::to_string(c.cfg.candidates[k]);
      line += " " + name + "=" + fixed(frac[k]);
      c.metric("fraction_" + std::to_string(k + 1), frac[k]);
    }
    c.say(line);
  } else {
    std::vector<double> fid;
    for (const auto& s : set.samples) fid.push_back(1.0 - s.meta[0]);
    const auto eps = avg_log_infidelity(fid);
    const double r = fraction_above(fid);
    c.metric("epsilon", eps.value);
    c.metric("r_high", r);
    c.say("labels: epsilon=" + fixed(eps.value) + " R(F>0.999)=" + fixed(r));
  }
}

SampleSet generate(Context& c, SampleKind kind, const std::string& role, std::size_t count) {
  auto opts = c.cfg.generate_options();
  std::size_t next = 1;
  opts.progress = [&](std::size_t done, std::size_t total) {
    while (next <= 10 && done * 10 >= next * total) {
      if (kind == SampleKind::kRegression || next == 10)
        c.say("  " + to_string(kind) + " " + role + ": " + std::to_string(done) + "/" + std::to_string(total));
      ++next;
    }
  };
  c.say("generating " + std::to_string(count) + " " + to_string(kind) + " samples (" + role + ")");
  return generate_set(kind, system_for(c, kind), count, c.cfg.stream_seed(to_string(kind) + "-" + role), opts);
}

// Loads `--<key>` when given (first `count` samples), else generates and
// stores the set under its role name.
SampleSet obtain(Context& c, SampleKind kind, const std::string& key, const std::string& role, std::size_t count) {
  if (c.has(key)) {
    std::ifstream in(c.need(key));
    if (!in) throw IoError("cannot open '" + c.need(key) + "'");
    const auto expected = fingerprint(kind, system_for(c, kind), c.cfg.generate_options());
    auto set = load(in, expected, c.arg("allow_mismatch", "false") == "true");
    if (set.kind != kind) throw ValidationError(c.need(key) + " holds " + to_string(set.kind) + " samples");
    if (set.size() < count)
      throw ValidationError(c.need(key) + " has " + std::to_string(set.size()) + " samples, need " + std::to_string(count));
    return set.prefix(count);
  }
  auto set = generate(c, kind, role, count);
  c.write(set_file_name(kind, role, count), store(set));
  return set;
}

std::vector<std::size_t> layer_sizes(const ExperimentConfig& cfg) {
  std::vector<std::size_t> sizes{4};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(cfg.candidates.size() + 1);
  return sizes;
}

TrainHistory train_network(Context& c, const SampleSet& train, const SampleSet& test) {
  const auto x = train.input_matrix();
  const auto norm = Normalizer::fit(x);
  auto net = mlp_init(layer_sizes(c.cfg), Rng::derive(c.cfg.seed, "mlp-init", train.size()));
  c.say("training on " + std::to_string(train.size()) + " samples, " + std::to_string(c.cfg.train.max_iters) +
        " iterations");
  return mlp_train(std::move(net), x, train.target_matrix(), test.input_matrix(), test.target_matrix(), norm,
                   c.cfg.train);
}

std::vector<std::size_t> sizes_arg(const Context& c, const std::vector<std::size_t>& fallback) {
  if (!c.has("sizes")) return fallback;
  std::vector<std::size_t> v;
  try {
    from_text(c.need("sizes"), v);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("--sizes: ") + e.what());
  }
  if (!all_positive(v)) throw ConfigError("--sizes must list positive counts");
  return v;
}

void cmd_gen_samples(Context& c) {
  const auto kind = kind_arg(c);
  const std::string role = c.arg("role", "train");
  const std::size_t count = c.count_arg("count", kind == SampleKind::kClassification ? 10000 : 1000);
  const auto set = generate(c, kind, role, count);
  c.write(c.arg("name", set_file_name(kind, role, count)), store(set));
  summarize_set(c, set);
}

void cmd_train_mlp(Context& c) {
  const auto cls = SampleKind::kClassification;
  const auto train = obtain(c, cls, "train", "train", c.count_arg("count", 10000));
  const auto test = obtain(c, cls, "test", "test", c.cfg.n_test);
  const auto h = train_network(c, train, test);
  CsvTable t;
  t.columns = {"iteration", "train_mse", "test_mse", "train_rate", "test_rate", "lr"};
  for (const auto& r : h.records) t.rows.push_back({double(r.iteration), r.train_mse, r.test_mse, r.train_rate, r.test_rate, r.lr});
  c.write_table("mlp-history.csv", std::move(t));
  c.write(c.arg("name", "mlp.json"), mlp_to_json(h.best, Normalizer::fit(train.input_matrix())));
  const double test_rate = success_rate(h.best, test.input_matrix(), test.target_matrix(), Normalizer::fit(train.input_matrix()));
  c.metric("best_iteration", h.best_iteration);
  c.metric("test_mse", h.best_test_mse);
  c.metric("test_rate", test_rate);
  c.say("best iteration " + std::to_string(h.best_iteration) + ": test MSE " + fixed(h.best_test_mse, 5) +
        ", test success " + fixed(test_rate));
}

void cmd_table1(Context& c) {
  const auto cls = SampleKind::kClassification;
  const auto sizes = sizes_arg(c, c.cfg.table1_sizes);
  const auto pool = obtain(c, cls, "train", "train", *std::max_element(sizes.begin(), sizes.end()));
  const auto test = obtain(c, cls, "test", "test", c.cfg.n_test);
  const auto apply = obtain(c, cls, "apply", "apply", c.cfg.n_apply);
  CsvTable t;
  t.columns = {"n_train", "n_test", "test_mse", "iteration", "r_apply"};
  for (auto n : sizes) {
    const auto train = pool.prefix(n);
    const auto norm = Normalizer::fit(train.input_matrix());
    const auto h = train_network(c, train, test);
    const double r = success_rate(h.best, apply.input_matrix(), apply.target_matrix(), norm);
    t.rows.push_back({double(n), double(test.size()), h.best_test_mse, double(h.best_iteration), r});
    c.write("mlp-n" + std::to_string(n) + ".json", mlp_to_json(h.best, norm));
    const std::string tag = std::to_string(n);
    c.metric("r_apply_" + tag, r);
    c.metric("test_mse_" + tag, h.best_test_mse);
    c.metric("iteration_" + tag, h.best_iteration);
    c.say("N_train=" + tag + ": test MSE " + fixed(h.best_test_mse, 5) + " at iteration " +
          std::to_string(h.best_iteration) + ", R_A " + fixed(r));
  }
  c.write_table("table1.csv", std::move(t));
}

template <class F>
std::vector<std::size_t> labels_in_blocks(const Context& c, std::size_t count, F&& label_block) {
  std::vector<std::size_t> out(count);
  const std::size_t block = 64;
  parallel_blocks((count + block - 1) / block, c.cfg.threads, [&](std::size_t b) {
    const std::size_t lo = b * block, hi = std::min(count, lo + block);
    label_block(lo, hi, out);
  });
  return out;
}

void cmd_region_map(Context& c) {
  const auto [net, norm] = mlp_from_json(read_file(c.need("model")));
  const std::size_t res = c.count_arg("resolution", c.cfg.region_resolution);
  const auto grid = region_grid(res);
  const auto& system = system_for(c, SampleKind::kClassification);
  ClassificationOptions opts = c.cfg.generate_options().classification;
  if (net.inputs() != 4 || net.outputs() != system.controls().size() + 1)
    throw ValidationError("model does not match the configured candidates");
  c.say("simulating " + std::to_string(grid.size()) + " grid states");
  const auto sim = labels_in_blocks(c, grid.size(), [&](std::size_t lo, std::size_t hi, std::vector<std::size_t>& out) {
    const auto labels = label_classification_batch(system, std::span(grid).subspan(lo, hi - lo), opts);
    for (std::size_t i = lo; i < hi; ++i) out[i] = labels[i - lo].choice;
  });
  CsvTable t;
  t.columns = {"theta1", "theta2", "label_sim", "label_pred"};
  std::size_t agree = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid[i].as_input_vector();
    const auto pred = classify(net, x, norm);
    agree += pred == sim[i];
    t.rows.push_back({x[0], x[1], double(sim[i] + 1), double(pred + 1)});
  }
  const double agreement = static_cast<double>(agree) / static_cast<double>(grid.size());
  t.meta["agreement"] = format_double(agreement);
  c.write_table("region-map.csv", std::move(t));
  c.metric("agreement", agreement);
  c.say("prediction/simulation agreement " + fixed(agreement));
}

std::vector<InitialStateParams> states_for(const Context& c, const std::string& role, std::size_t count) {
  return random_param_list(3, count, c.cfg.stream_seed("regression-" + role), "state");
}

std::vector<double> label_fidelities(const SampleSet& set) {
  std::vector<double> f;
  for (const auto& s : set.samples) f.push_back(1.0 - s.meta[0]);
  return f;
}

void cmd_tune_grnn(Context& c) {
  const auto reg = SampleKind::kRegression;
  const auto train = obtain(c, reg, "train", "train", c.count_arg("count", c.cfg.table2_sizes.front()));
  auto model = GrnnModel::build(train.input_matrix(), train.target_matrix());
  const auto states = states_for(c, "validation", c.cfg.n_validation);
  const double d = model.spacing();
  const auto grid = default_sigma_grid(d);
  c.say("sweeping " + std::to_string(grid.size()) + " sigma values over " + std::to_string(states.size()) +
        " validation states");
  const auto tuning = grnn_tune_sigma(model, states, system_for(c, reg), grid, c.cfg.threads);
  CsvTable t;
  t.columns = {"sigma_over_d", "sigma", "epsilon", "r_high"};
  for (const auto& p : tuning.curve) t.rows.push_back({p.sigma / d, p.sigma, p.epsilon, p.fraction_high});
  t.meta["spacing"] = format_double(d);
  t.meta["best_sigma"] = format_double(tuning.best_sigma);
  c.write_table("sigma-curve.csv", std::move(t));
  model.set_sigma(tuning.best_sigma);
  c.write(c.arg("name", "grnn.json"), model.to_json());
  const auto best = std::find_if(tuning.curve.begin(), tuning.curve.end(),
                                 [&](const SigmaPoint& p) { return p.sigma == tuning.best_sigma; });
  c.metric("sigma", tuning.best_sigma);
  c.metric("sigma_over_d", tuning.best_sigma / d);
  c.metric("epsilon", best->epsilon);
  c.metric("r_high", best->fraction_high);
  c.say("selected sigma = " + fixed(tuning.best_sigma / d, 3) + " D (epsilon " + fixed(best->epsilon) + ")");
}

void cmd_table2(Context& c) {
  const auto reg = SampleKind::kRegression;
  const auto sizes = sizes_arg(c, c.cfg.table2_sizes);
  const auto pool = obtain(c, reg, "train", "train", *std::max_element(sizes.begin(), sizes.end()));
  const auto states = states_for(c, "apply", c.cfg.reg_apply);
  CsvTable t;
  t.columns = {"n_train", "sigma", "sigma_over_d", "epsilon", "r_high", "r_high_train"};
  for (auto n : sizes) {
    const auto train = pool.prefix(n);
    auto model = GrnnModel::build(train.input_matrix(), train.target_matrix());
    const double sigma = c.cfg.sigma_factor * model.spacing();
    model.set_sigma(sigma);
    const auto fid = grnn_control_fidelities(model, system_for(c, reg), states, sigma, c.cfg.threads);
    const double eps = avg_log_infidelity(fid).value;
    const double r = fraction_above(fid);
    const double r_train = fraction_above(label_fidelities(train));
    t.rows.push_back({double(n), sigma, c.cfg.sigma_factor, eps, r, r_train});
    c.write("grnn-n" + std::to_string(n) + ".json", model.to_json());
    const std::string tag = std::to_string(n);
    c.metric("epsilon_" + tag, eps);
    c.metric("r_high_" + tag, r);
    c.metric("r_high_train_" + tag, r_train);
    c.say("N_train=" + tag + ": epsilon " + fixed(eps) + ", R(F>0.999) " + fixed(r) + " (labels " + fixed(r_train) + ")");
  }
  c.write_table("table2.csv", std::move(t));
}

PindResult run_pind(Context& c) {
  const auto states = states_for(c, "pind", c.cfg.pind_states);
  c.say("optimizing P_ind over " + std::to_string(states.size()) + " states, " + std::to_string(c.cfg.pind_restarts) +
        " restarts");
  return optimize_pind(system_for(c, SampleKind::kRegression), states, BoxBounds({0.0, 0.0}, c.cfg.reg_upper),
                       c.cfg.pind_restarts, c.cfg.stream_seed("pind"), c.cfg.search, c.cfg.threads);
}

void cmd_baseline_pind(Context& c) {
  const auto& system = system_for(c, SampleKind::kRegression);
  const auto pind = run_pind(c);
  const auto states = states_for(c, "apply", c.cfg.reg_apply);
  const auto fp = fixed_weight_fidelities(system, states, pind.free, c.cfg.threads);
  const auto ff = fixed_weight_fidelities(system, states, c.cfg.fixed_weights, c.cfg.threads);
  CsvTable t;
  t.columns = {"baseline", "p1", "p2", "epsilon", "r_high"};
  t.meta["baseline"] = "0=optimized P_ind, 1=fixed";
  t.meta["epsilon_batch"] = format_double(pind.epsilon);
  const double e1 = avg_log_infidelity(fp).value, r1 = fraction_above(fp);
  const double e2 = avg_log_infidelity(ff).value, r2 = fraction_above(ff);
  t.rows.push_back({0.0, pind.free[0], pind.free[1], e1, r1});
  t.rows.push_back({1.0, c.cfg.fixed_weights[0], c.cfg.fixed_weights[1], e2, r2});
  c.write_table("baseline-pind.csv", std::move(t));
  c.metric("p1", pind.free[0]);
  c.metric("p2", pind.free[1]);
  c.metric("epsilon_batch", pind.epsilon);
  c.metric("epsilon", e1);
  c.metric("r_high", r1);
  c.metric("epsilon_fixed", e2);
  c.metric("r_fixed", r2);
  c.say("P_ind = (" + fixed(pind.free[0]) + ", " + fixed(pind.free[1]) + "): epsilon " + fixed(e1) +
        ", R(F>0.999) " + fixed(r1));
  c.say("fixed (" + format_double(c.cfg.fixed_weights[0]) + ", " + format_double(c.cfg.fixed_weights[1]) +
        "): epsilon " + fixed(e2) + ", R(F>0.999) " + fixed(r2));
}

std::vector<double> histogram(const ExperimentConfig& cfg, std::span<const double> fidelities) {
  std::vector<double> h(cfg.hist_bins, 0.0);
  const double width = (cfg.hist_max - cfg.hist_min) / static_cast<double>(cfg.hist_bins);
  for (double f : fidelities) {
    const double v = std::log10(std::max(1.0 - f, 1e-12));
    const auto bin = static_cast<long long>(std::floor((v - cfg.hist_min) / width));
    h[static_cast<std::size_t>(std::clamp<long long>(bin, 0, static_cast<long long>(cfg.hist_bins) - 1))] +=
        1.0 / static_cast<double>(fidelities.size());
  }
  return h;
}

void cmd_infidelity_dist(Context& c) {
  const auto reg = SampleKind::kRegression;
  const auto& system = system_for(c, reg);
  const auto model = GrnnModel::from_json(read_file(c.need("model")));
  const double sigma = model.sigma().value_or(c.cfg.sigma_factor * model.spacing());
  const auto train = obtain(c, reg, "train", "train", c.count_arg("count", model.size()));
  std::vector<double> pind;
  if (c.has("pind")) {
    pind = parse_list("pind", c.need("pind"));
    if (pind.size() != 2) throw ConfigError("--pind needs two coefficients");
  } else {
    pind = run_pind(c).free;
  }
  const auto states = states_for(c, "apply", c.cfg.reg_apply);
  const std::vector<std::pair<std::string, std::vector<double>>> panels = {
      {"grnn", grnn_control_fidelities(model, system, states, sigma, c.cfg.threads)},
      {"labels", label_fidelities(train)},
      {"pind", fixed_weight_fidelities(system, states, pind, c.cfg.threads)},
      {"fixed", fixed_weight_fidelities(system, states, c.cfg.fixed_weights, c.cfg.threads)},
  };
  CsvTable t;
  t.columns = {"bin_lo", "bin_hi"};
  const double width = (c.cfg.hist_max - c.cfg.hist_min) / static_cast<double>(c.cfg.hist_bins);
  for (std::size_t b = 0; b < c.cfg.hist_bins; ++b)
    t.rows.push_back({c.cfg.hist_min + b * width, c.cfg.hist_min + (b + 1) * width});
  for (const auto& [name, fid] : panels) {
    t.columns.push_back(name);
    const auto h = histogram(c.cfg, fid);
    for (std::size_t b = 0; b < h.size(); ++b) t.rows[b].push_back(h[b]);
    const double eps = avg_log_infidelity(fid).value, r = fraction_above(fid);
    t.meta["epsilon_" + name] = format_double(eps);
    t.meta["r_high_" + name] = format_double(r);
    c.metric("epsilon_" + name, eps);
    c.metric("r_high_" + name, r);
    c.say(name + ": epsilon " + fixed(eps) + ", R(F>0.999) " + fixed(r));
  }
  c.write_table("infidelity-dist.csv", std::move(t));
}

void cmd_trajectory(Context& c) {
  const auto kind = kind_arg(c);
  const auto& system = system_for(c, kind);
  const auto x = parse_list("state", c.need("state"));
  if (x.size() != 4) throw ConfigError("--state needs theta1,theta2,phi1,phi2");
  std::vector<double> p;
  if (c.has("weights")) p = parse_list("weights", c.need("weights"));
  else if (kind == SampleKind::kClassification) p = c.cfg.class_weights;
  else {
    const auto w = LyapunovWeights::from_free(c.cfg.fixed_weights, system.goal());
    p.assign(w.p().begin(), w.p().end());
  }
  Scheme scheme;
  const std::string control = c.arg("control", "all");
  if (control == "all") {
    for (std::size_t k = 0; k < system.controls().size(); ++k) scheme.push_back(k);
  } else {
    const auto k = static_cast<std::size_t>(c.count_arg("control", 1));
    if (k > system.controls().size()) throw ConfigError("--control exceeds the number of controls");
    scheme.push_back(k - 1);
  }
  EvolveOptions opts;
  opts.stride = c.count_arg("stride", 10);
  const auto initial = state_from_params(InitialStateParams::from_input_vector(x), system.basis());
  const auto traj = evolve(system, initial, LyapunovWeights(p, system.goal()), scheme, system.default_dt(), opts);
  std::ostringstream s;
  write_trajectory(s, traj);
  c.write(c.arg("name", "trajectory.txt"), s.str());
  c.metric("final_fidelity", traj.final_fidelity);
  c.say("final fidelity " + fixed(traj.final_fidelity, 8));
}

void cmd_config(Context& c) {
  std::istringstream in(c.cfg.dump());
  std::string line;
  while (std::getline(in, line)) c.say(line);
}

using Command = void (*)(Context&);

const std::vector<std::pair<std::string, Command>>& commands() {
  static const std::vector<std::pair<std::string, Command>> all = {
      {"gen-samples", cmd_gen_samples}, {"train-mlp", cmd_train_mlp},
      {"table1", cmd_table1},           {"region-map", cmd_region_map},
      {"tune-grnn", cmd_tune_grnn},     {"table2", cmd_table2},
      {"infidelity-dist", cmd_infidelity_dist}, {"baseline-pind", cmd_baseline_pind},
      {"trajectory", cmd_trajectory},   {"config", cmd_config},
  };
  return all;
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : commands()) names.push_back(name);
  return names;
}

CommandReport run_command(const ExperimentConfig& cfg, const std::string& command, const CommandArgs& args,
                          const LogSink& log) {
  const auto it = std::find_if(commands().begin(), commands().end(), [&](const auto& e) { return e.first == command; });
  if (it == commands().end()) throw ConfigError("unknown command '" + command + "'");
  ExperimentConfig resolved = cfg;
  resolved.resolve();
  Context c{resolved, command, args, log, resolved.classification_system(), resolved.regression_system()};
  c.say(std::string("qlc ") + kVersion + " " + command + " config=" + hex(resolved.checksum()));
  if (command != "config") {
    std::error_code ec;
    std::filesystem::create_directories(resolved.out, ec);
    if (ec) throw IoError("cannot create '" + resolved.out + "': " + ec.message());
  }
  it->second(c);
  return std::move(c.report);
}

}  // namespace qlc
