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

#include "qlc/dataset.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "qlc/error.hpp"
#include "qlc/parallel.hpp"
#include "qlc/textio.hpp"
#include "qlc/version.hpp"

namespace qlc {

namespace {

constexpr std::size_t kClassificationBlock = 64;

double resolve_dt(const ControlledSystem& system, double dt) { return dt > 0.0 ? dt : system.default_dt(); }

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::uint64_t hash_doubles(std::uint64_t h, std::span<const double> values) {
  for (double v : values) h = fnv1a(format_double(v) + ";", h);
  return h;
}

std::uint64_t hash_matrix(std::uint64_t h, const ComplexMatrix& m) {
  for (const auto& z : m.data()) {
    const double parts[2] = {z.real(), z.imag()};
    h = hash_doubles(h, parts);
  }
  return h;
}

}  // namespace

std::string to_string(SampleKind kind) {
  return kind == SampleKind::kClassification ? "classification" : "regression";
}

SampleKind parse_sample_kind(const std::string& text) {
  if (text == "classification") return SampleKind::kClassification;
  if (text == "regression") return SampleKind::kRegression;
  throw ValidationError("unknown sample kind '" + text + "'");
}

RowMatrix SampleSet::input_matrix() const {
  RowMatrix m(size(), inputs);
  for (std::size_t i = 0; i < size(); ++i) std::copy(samples[i].x.begin(), samples[i].x.end(), m.row(i).begin());
  return m;
}

RowMatrix SampleSet::target_matrix() const {
  RowMatrix m(size(), outputs);
  for (std::size_t i = 0; i < size(); ++i) std::copy(samples[i].y.begin(), samples[i].y.end(), m.row(i).begin());
  return m;
}

SampleSet SampleSet::prefix(std::size_t count) const {
  if (count > size()) throw ValidationError("requested " + std::to_string(count) + " samples from a set of " + std::to_string(size()));
  SampleSet out = *this;
  out.samples.resize(count);
  return out;
}

InitialStateParams random_params(std::size_t n, Rng& rng) {
  if (n < 2) throw ValidationError("state dimension must be at least 2");
  std::vector<double> theta(n - 1), phi(n - 1);
  for (auto& t : theta) t = rng.uniform(0.0, std::numbers::pi / 2);
  for (auto& p : phi) p = rng.uniform(0.0, 2 * std::numbers::pi);
  return InitialStateParams(std::move(theta), std::move(phi));
}

std::vector<InitialStateParams> random_param_list(std::size_t n, std::size_t count, std::uint64_t seed,
                                                  std::string_view stream) {
  std::vector<InitialStateParams> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng = Rng::substream(seed, stream, k);
    out.push_back(random_params(n, rng));
  }
  return out;
}

std::size_t choose_label(std::span<const double> fidelities, const ClassificationOptions& options) {
  const std::size_t m = fidelities.size();
  if (m < 2) throw ValidationError("classification needs at least 2 candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < m; ++i)
    if (fidelities[i] > fidelities[best]) best = i;
  double runner = -1.0;
  for (std::size_t i = 0; i < m; ++i)
    if (i != best) runner = std::max(runner, fidelities[i]);
  if (fidelities[best] - runner <= options.tie_eps) return m;
  if (fidelities[best] < options.fid_threshold) return m;
  return best;
}

std::vector<ClassLabel> label_classification_batch(const ControlledSystem& system,
                                                   std::span<const InitialStateParams> params,
                                                   const ClassificationOptions& options) {
  const std::size_t m = system.controls().size();
  if (m < 2) throw ValidationError("classification needs at least 2 candidate controls");
  const LyapunovWeights weights(options.weights, system.goal());
  std::vector<FidelityJob> jobs;
  jobs.reserve(params.size());
  for (const auto& p : params) {
    if (p.dim() != system.dim()) throw ValidationError("state parameters do not match the system dimension");
    jobs.push_back({eigen_coefficients(p), weights});
  }
  const double dt = resolve_dt(system, options.dt);
  std::vector<ClassLabel> out(params.size());
  for (std::size_t k = 0; k < m; ++k) {
    const auto fid = final_fidelity_batch(system, jobs, {k}, dt);
    for (std::size_t i = 0; i < params.size(); ++i) out[i].fidelities.push_back(fid[i]);
  }
  for (auto& label : out) label.choice = choose_label(label.fidelities, options);
  return out;
}

ClassLabel label_classification(const ControlledSystem& system, const InitialStateParams& params,
                                const ClassificationOptions& options) {
  return label_classification_batch(system, std::span(&params, 1), options).front();
}

WeightOptimum label_regression(const ControlledSystem& system, const InitialStateParams& params,
                               const RegressionOptions& options, std::uint64_t seed) {
  return optimize_lyapunov_weights(system, params, options.bounds, options.restarts, seed, options.search);
}

std::uint64_t fingerprint(SampleKind kind, const ControlledSystem& system, const GenerateOptions& options) {
  std::uint64_t h = fnv1a(to_string(kind));
  h = hash_matrix(h, system.h0().matrix());
  for (const auto& c : system.controls()) h = hash_matrix(h, c.matrix());
  const double scalars[3] = {system.strength(), system.horizon(), static_cast<double>(system.goal())};
  h = hash_doubles(h, scalars);
  if (kind == SampleKind::kClassification) {
    const auto& c = options.classification;
    h = hash_doubles(h, c.weights);
    const double extra[3] = {c.fid_threshold, c.tie_eps, resolve_dt(system, c.dt)};
    h = hash_doubles(h, extra);
  } else {
    const auto& r = options.regression;
    h = hash_doubles(h, r.bounds.lower());
    h = hash_doubles(h, r.bounds.upper());
    const double extra[7] = {static_cast<double>(r.restarts), r.search.x_tol, r.search.f_tol,
                             static_cast<double>(r.search.max_evals), r.search.initial_step,
                             r.search.start_margin, system.default_dt()};
    h = hash_doubles(h, extra);
  }
  return h;
}

SampleSet generate_set(SampleKind kind, const ControlledSystem& system, std::size_t count, std::uint64_t seed,
                       const GenerateOptions& options) {
  if (count == 0) throw ValidationError("sample count must be at least 1");
  const std::size_t n = system.dim();
  SampleSet set;
  set.kind = kind;
  set.seed = seed;
  set.fingerprint = fingerprint(kind, system, options);
  set.generator = std::string("qlc ") + kVersion;
  set.inputs = 2 * (n - 1);
  set.samples.resize(count);
  const auto params = random_param_list(n, count, seed, "state");

  const bool classify = kind == SampleKind::kClassification;
  const std::size_t m = system.controls().size();
  set.outputs = classify ? m + 1 : n - 1;
  set.meta = classify ? m : 1;
  const std::size_t block = classify ? kClassificationBlock : 1;
  const std::size_t blocks = (count + block - 1) / block;

  auto body = [&](std::size_t b) {
    const std::size_t lo = b * block;
    const std::size_t hi = std::min(count, lo + block);
    if (classify) {
      const auto labels = label_classification_batch(system, std::span(params).subspan(lo, hi - lo), options.classification);
      for (std::size_t i = lo; i < hi; ++i) {
        auto& s = set.samples[i];
        s.x = params[i].as_input_vector();
        s.y.assign(m + 1, 0.0);
        s.y[labels[i - lo].choice] = 1.0;
        s.meta = labels[i - lo].fidelities;
      }
    } else {
      for (std::size_t i = lo; i < hi; ++i) {
        const auto opt = label_regression(system, params[i], options.regression, Rng::derive(seed, "label", i));
        auto& s = set.samples[i];
        s.x = params[i].as_input_vector();
        s.y = opt.weights.free();
        s.meta = {opt.infidelity};
      }
    }
  };
  parallel_blocks(blocks, options.threads, body, [&](std::size_t done) {
    if (options.progress) options.progress(std::min(count, done * block), count);
  });
  return set;
}

std::pair<SampleSet, SampleSet> split(const SampleSet& set, double train_fraction, double test_fraction,
                                      std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && test_fraction >= 0.0 && train_fraction + test_fraction <= 1.0 + 1e-12))
    throw ValidationError("split fractions must be nonnegative and sum to at most 1");
  const std::size_t n = set.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::substream(seed, "split", 0);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  const auto n_test = std::min(n - n_train, static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n))));
  SampleSet train = set, test = set;
  train.samples.clear();
  test.samples.clear();
  for (std::size_t i = 0; i < n_train; ++i) train.samples.push_back(set.samples[order[i]]);
  for (std::size_t i = n_train; i < n_train + n_test; ++i) test.samples.push_back(set.samples[order[i]]);
  return {std::move(train), std::move(test)};
}

void store(std::ostream& out, const SampleSet& set) {
  out << "# qlc-samples v1\n";
  out << "# kind=" << to_string(set.kind) << '\n';
  out << "# seed=" << set.seed << '\n';
  out << "# fingerprint=" << hex64(set.fingerprint) << '\n';
  out << "# generator=" << set.generator << '\n';
  out << "# inputs=" << set.inputs << '\n';
  out << "# outputs=" << set.outputs << '\n';
  out << "# meta=" << set.meta << '\n';
  out << "# count=" << set.size() << '\n';
  for (const auto& s : set.samples) {
    bool first = true;
    for (const auto* part : {&s.x, &s.y, &s.meta})
      for (double v : *part) {
        out << (first ? "" : " ") << format_double(v);
        first = false;
      }
    out << '\n';
  }
}

std::string store(const SampleSet& set) {
  std::ostringstream s;
  store(s, set);
  return s.str();
}

SampleSet load(std::istream& in, std::optional<std::uint64_t> expected, bool allow_mismatch) {
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line) || trim(line) != "# qlc-samples v1")
    throw ParseError("missing '# qlc-samples v1' header", 1);
  ++lineno;
  std::map<std::string, std::string> header;
  SampleSet set;
  std::size_t count = 0;
  bool header_done = false;
  auto field = [&](const char* key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) throw ParseError(std::string("header lacks '") + key + "'", lineno);
    return it->second;
  };
  auto finish_header = [&] {
    set.kind = parse_sample_kind(field("kind"));
    set.seed = static_cast<std::uint64_t>(std::stoull(field("seed")));
    set.fingerprint = static_cast<std::uint64_t>(std::stoull(field("fingerprint"), nullptr, 16));
    set.generator = field("generator");
    set.inputs = static_cast<std::size_t>(parse_int(field("inputs"), lineno));
    set.outputs = static_cast<std::size_t>(parse_int(field("outputs"), lineno));
    set.meta = static_cast<std::size_t>(parse_int(field("meta"), lineno));
    count = static_cast<std::size_t>(parse_int(field("count"), lineno));
    header_done = true;
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      if (header_done) throw ParseError("header line after sample data", lineno);
      const auto body = trim(s.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) throw ParseError("header line without key=value", lineno);
      header[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
      continue;
    }
    if (!header_done) {
      try {
        finish_header();
      } catch (const std::logic_error&) {
        throw ParseError("malformed header value", lineno);
      }
    }
    const auto fields = split(s, ' ');
    const std::size_t width = set.inputs + set.outputs + set.meta;
    if (fields.size() != width)
      throw ParseError("expected " + std::to_string(width) + " values, got " + std::to_string(fields.size()), lineno);
    LabeledSample sample;
    for (std::size_t i = 0; i < width; ++i) {
      const double v = parse_double(fields[i], lineno);
      (i < set.inputs ? sample.x : i < set.inputs + set.outputs ? sample.y : sample.meta).push_back(v);
    }
    set.samples.push_back(std::move(sample));
  }
  if (!header_done) {
    try {
      finish_header();
    } catch (const std::logic_error&) {
      throw ParseError("malformed header value", lineno);
    }
  }
  if (set.samples.size() != count)
    throw ParseError("header promises " + std::to_string(count) + " samples, file has " + std::to_string(set.samples.size()), lineno);
  if (expected && *expected != set.fingerprint) {
    const std::string msg = "sample set fingerprint " + hex64(set.fingerprint) + " does not match the configured system (" + hex64(*expected) + ")";
    if (!allow_mismatch) throw ValidationError(msg);
    warn(msg);
  }
  return set;
}

}  // namespace qlc
