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

#include "qlc/grnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

#include "qlc/error.hpp"
#include "qlc/optim.hpp"
#include "qlc/parallel.hpp"

namespace qlc {

namespace {

constexpr std::size_t kStateBlock = 64;

std::vector<double> flat(const RowMatrix& m) { return m.data; }

RowMatrix unflat(const std::vector<double>& v, std::size_t cols) {
  if (cols == 0 || v.size() % cols != 0) throw ParseError("stored matrix size is not a multiple of its width", 0);
  RowMatrix m(v.size() / cols, cols);
  m.data = v;
  return m;
}

}  // namespace

double grnn_spacing(std::size_t samples, std::size_t inputs) {
  if (samples == 0 || inputs == 0) throw ValidationError("spacing needs at least one sample and one input");
  return 2.0 / std::pow(static_cast<double>(samples), 1.0 / static_cast<double>(inputs));
}

GrnnModel::GrnnModel(Normalizer normalizer, RowMatrix inputs, RowMatrix outputs, double spacing)
    : normalizer_(std::move(normalizer)), inputs_(std::move(inputs)), outputs_(std::move(outputs)), spacing_(spacing) {}

GrnnModel GrnnModel::build(const RowMatrix& x, const RowMatrix& y) {
  if (x.rows == 0) throw ValidationError("GRNN needs at least one training sample");
  if (y.rows != x.rows) throw ValidationError("GRNN inputs and outputs have different sample counts");
  if (x.cols == 0 || y.cols == 0) throw ValidationError("GRNN needs at least one input and one output");
  Normalizer norm = x.rows >= 2 ? Normalizer::fit(x)
                                : Normalizer(std::vector<double>(x.row(0).begin(), x.row(0).end()),
                                             std::vector<double>(x.row(0).begin(), x.row(0).end()));
  const RowMatrix xn = norm.apply(x);
  std::vector<std::size_t> order(x.rows);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = xn.row(a), rb = xn.row(b);
    if (std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end())) return true;
    if (std::lexicographical_compare(rb.begin(), rb.end(), ra.begin(), ra.end())) return false;
    const auto ya = y.row(a), yb = y.row(b);
    return std::lexicographical_compare(ya.begin(), ya.end(), yb.begin(), yb.end());
  });
  RowMatrix si(x.rows, x.cols), so(y.rows, y.cols);
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::copy(xn.row(order[i]).begin(), xn.row(order[i]).end(), si.row(i).begin());
    std::copy(y.row(order[i]).begin(), y.row(order[i]).end(), so.row(i).begin());
  }
  return GrnnModel(std::move(norm), std::move(si), std::move(so), grnn_spacing(x.rows, x.cols));
}

void GrnnModel::set_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be positive and finite");
  sigma_ = sigma;
}

bool GrnnModel::predict_from_distances(std::span<const double> d2, double sigma, std::span<double> out) const {
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  const double scale = -1.0 / (2.0 * sigma * sigma);
  const std::size_t n_out = outputs();
  std::fill(out.begin(), out.end(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < size(); ++k) {
    const double u = std::exp(d2[k] * scale);
    if (u == 0.0) continue;
    total += u;
    const auto yk = outputs_.row(k);
    for (std::size_t j = 0; j < n_out; ++j) out[j] += u * yk[j];
  }
  if (total > 0.0) {
    for (double& v : out) v /= total;
    return false;
  }
  const auto nearest = static_cast<std::size_t>(std::min_element(d2.begin(), d2.end()) - d2.begin());
  std::copy(outputs_.row(nearest).begin(), outputs_.row(nearest).end(), out.begin());
  return true;
}

namespace {

void report_fallbacks(std::size_t count, std::size_t* fallbacks) {
  if (count == 0) return;
  if (fallbacks) *fallbacks += count;
  warn(std::to_string(count) + " GRNN prediction(s) had every pattern weight underflow; used the nearest stored sample");
}

}  // namespace

std::vector<double> GrnnModel::predict(std::span<const double> x, double sigma, std::size_t* fallbacks) const {
  const auto xn = normalizer_.apply(x);
  std::vector<double> d2(size());
  for (std::size_t k = 0; k < size(); ++k) {
    const auto r = inputs_.row(k);
    double s = 0.0;
    for (std::size_t j = 0; j < xn.size(); ++j) s += (xn[j] - r[j]) * (xn[j] - r[j]);
    d2[k] = s;
  }
  std::vector<double> out(outputs());
  report_fallbacks(predict_from_distances(d2, sigma, out) ? 1 : 0, fallbacks);
  return out;
}

std::vector<double> GrnnModel::predict(std::span<const double> x, std::size_t* fallbacks) const {
  if (!sigma_) throw ValidationError("GRNN sigma has not been set");
  return predict(x, *sigma_, fallbacks);
}

std::vector<RowMatrix> GrnnModel::predict_sweep(const RowMatrix& x, std::span<const double> sigmas,
                                                std::size_t* fallbacks) const {
  if (x.cols != inputs()) throw ValidationError("GRNN expects " + std::to_string(inputs()) + " inputs");
  std::vector<RowMatrix> out(sigmas.size(), RowMatrix(x.rows, outputs()));
  std::vector<double> d2(size());
  std::vector<double> xn(inputs());
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    normalizer_.apply(x.row(i), xn);
    for (std::size_t k = 0; k < size(); ++k) {
      const auto r = inputs_.row(k);
      double s = 0.0;
      for (std::size_t j = 0; j < xn.size(); ++j) s += (xn[j] - r[j]) * (xn[j] - r[j]);
      d2[k] = s;
    }
    for (std::size_t g = 0; g < sigmas.size(); ++g) count += predict_from_distances(d2, sigmas[g], out[g].row(i));
  }
  report_fallbacks(count, fallbacks);
  return out;
}

RowMatrix GrnnModel::predict(const RowMatrix& x, double sigma, std::size_t* fallbacks) const {
  const double s[1] = {sigma};
  return std::move(predict_sweep(x, s, fallbacks).front());
}

std::string GrnnModel::to_json() const {
  nlohmann::json doc;
  doc["format"] = "qlc-model";
  doc["version"] = 1;
  doc["type"] = "grnn";
  doc["inputs"] = inputs();
  doc["outputs"] = outputs();
  doc["spacing"] = spacing_;
  doc["sigma"] = sigma_ ? nlohmann::json(*sigma_) : nlohmann::json(nullptr);
  doc["normalizer"] = {{"min", std::vector<double>(normalizer_.min().begin(), normalizer_.min().end())},
                       {"max", std::vector<double>(normalizer_.max().begin(), normalizer_.max().end())}};
  doc["stored_inputs"] = flat(inputs_);
  doc["stored_outputs"] = flat(outputs_);
  return doc.dump() + "\n";
}

GrnnModel GrnnModel::from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format") != "qlc-model" || doc.at("type") != "grnn") throw ParseError("not a GRNN model document", 0);
    if (doc.at("version") != 1) throw ParseError("unsupported GRNN model version", 0);
    const auto n_in = doc.at("inputs").get<std::size_t>();
    const auto n_out = doc.at("outputs").get<std::size_t>();
    Normalizer norm(doc.at("normalizer").at("min").get<std::vector<double>>(),
                    doc.at("normalizer").at("max").get<std::vector<double>>());
    RowMatrix in = unflat(doc.at("stored_inputs").get<std::vector<double>>(), n_in);
    RowMatrix out = unflat(doc.at("stored_outputs").get<std::vector<double>>(), n_out);
    if (in.rows != out.rows || in.rows == 0 || norm.dim() != n_in) throw ParseError("inconsistent GRNN sizes", 0);
    GrnnModel model(std::move(norm), std::move(in), std::move(out), doc.at("spacing").get<double>());
    if (!doc.at("sigma").is_null()) model.set_sigma(doc.at("sigma").get<double>());
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed GRNN model: ") + e.what(), 0);
  }
}

std::vector<double> default_sigma_grid(double spacing) {
  std::vector<double> grid;
  const int points = 40;
  for (int i = 0; i < points; ++i) grid.push_back(spacing * std::pow(10.0, -3.0 + 3.0 * i / (points - 1)));
  grid.back() = spacing;
  grid.push_back(0.5 * spacing);
  std::sort(grid.begin(), grid.end());
  return grid;
}

LogInfidelity avg_log_infidelity(std::span<const double> fidelities) {
  if (fidelities.empty()) throw ValidationError("averaged log-infidelity of an empty list");
  double sum = 0.0;
  std::size_t clamped = 0;
  for (double f : fidelities) {
    if (!std::isfinite(f)) throw NumericError("non-finite fidelity");
    if (f >= 1.0) {
      f = 1.0 - 1e-12;
      ++clamped;
    }
    sum += std::log10(1.0 - f);
  }
  return {sum / static_cast<double>(fidelities.size()), clamped};
}

double fraction_above(std::span<const double> fidelities, double threshold) {
  if (fidelities.empty()) throw ValidationError("fraction of an empty list");
  const auto n = std::count_if(fidelities.begin(), fidelities.end(), [&](double f) { return f > threshold; });
  return static_cast<double>(n) / static_cast<double>(fidelities.size());
}

namespace {

RowMatrix inputs_of(std::span<const InitialStateParams> states) {
  RowMatrix x;
  for (const auto& s : states) x.append(s.as_input_vector());
  return x;
}

}  // namespace

std::vector<double> coefficient_fidelities(const ControlledSystem& system, std::span<const InitialStateParams> states,
                                           const RowMatrix& coeffs, unsigned threads) {
  if (coeffs.rows != states.size() || coeffs.cols != system.dim() - 1)
    throw ValidationError("need one row of free coefficients per state");
  Scheme scheme(system.controls().size());
  std::iota(scheme.begin(), scheme.end(), 0);
  std::vector<double> out(states.size());
  const std::size_t blocks = (states.size() + kStateBlock - 1) / kStateBlock;
  parallel_blocks(blocks, threads, [&](std::size_t b) {
    const std::size_t lo = b * kStateBlock, hi = std::min(states.size(), lo + kStateBlock);
    std::vector<FidelityJob> jobs;
    for (std::size_t i = lo; i < hi; ++i)
      jobs.push_back({eigen_coefficients(states[i]), LyapunovWeights::from_free(coeffs.row(i), system.goal(), kWeightFloor)});
    const auto f = final_fidelity_batch(system, jobs, scheme, system.default_dt());
    std::copy(f.begin(), f.end(), out.begin() + static_cast<std::ptrdiff_t>(lo));
  });
  return out;
}

std::vector<double> grnn_control_fidelities(const GrnnModel& model, const ControlledSystem& system,
                                            std::span<const InitialStateParams> states, double sigma,
                                            unsigned threads) {
  if (model.outputs() != system.dim() - 1) throw ValidationError("GRNN outputs do not match the system's free coefficients");
  return coefficient_fidelities(system, states, model.predict(inputs_of(states), sigma), threads);
}

SigmaTuning grnn_tune_sigma(const GrnnModel& model, std::span<const InitialStateParams> states,
                            const ControlledSystem& system, std::span<const double> grid, unsigned threads) {
  if (grid.empty()) throw ValidationError("sigma grid is empty");
  if (states.empty()) throw ValidationError("no validation states");
  if (model.outputs() != system.dim() - 1) throw ValidationError("GRNN outputs do not match the system's free coefficients");
  SigmaTuning t{grid.front(), {}, 0};
  const auto predictions = model.predict_sweep(inputs_of(states), grid, &t.fallbacks);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto fid = coefficient_fidelities(system, states, predictions[g], threads);
    t.curve.push_back({grid[g], avg_log_infidelity(fid).value, fraction_above(fid)});
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < t.curve.size(); ++g)
    if (t.curve[g].epsilon < t.curve[best].epsilon) best = g;
  t.best_sigma = t.curve[best].sigma;
  return t;
}

}  // namespace qlc
