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

#include "qlc/mlp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "qlc/error.hpp"
#include "qlc/rng.hpp"

namespace qlc {

namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const Mat>;
using RowVec = Eigen::Matrix<double, 1, Eigen::Dynamic>;

CMap view(const RowMatrix& m) { return CMap(m.data.data(), static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols)); }

CMap weight_view(const MlpNetwork& net, std::size_t l) {
  const auto& s = net.layer_sizes();
  return CMap(net.weight(l).data(), static_cast<Eigen::Index>(s[l]), static_cast<Eigen::Index>(s[l + 1]));
}

Eigen::Map<const RowVec> bias_view(const MlpNetwork& net, std::size_t l) {
  return Eigen::Map<const RowVec>(net.bias(l).data(), static_cast<Eigen::Index>(net.bias(l).size()));
}

void check_rows(const MlpNetwork& net, const RowMatrix& x, const RowMatrix& y) {
  if (x.rows == 0) throw ValidationError("sample set is empty");
  if (x.cols != net.inputs()) throw ValidationError("network expects " + std::to_string(net.inputs()) + " inputs, got " + std::to_string(x.cols));
  if (y.rows != x.rows || y.cols != net.outputs())
    throw ValidationError("target matrix shape does not match the network outputs");
}

// acts[0] = input, acts[l + 1] = output of neuron layer l.
std::vector<Mat> forward_all(const MlpNetwork& net, const Mat& x) {
  std::vector<Mat> acts;
  acts.reserve(net.layers() + 1);
  acts.push_back(x);
  for (std::size_t l = 0; l < net.layers(); ++l) {
    Mat z = acts.back() * weight_view(net, l);
    z.rowwise() += bias_view(net, l);
    acts.push_back((1.0 + (-z.array()).exp()).inverse().matrix());
  }
  return acts;
}

double batch_mse(const Mat& out, const CMap& y) {
  return (out - y).squaredNorm() / static_cast<double>(y.rows());
}

std::vector<double> backprop(const MlpNetwork& net, const std::vector<Mat>& acts, const CMap& y) {
  const double n = static_cast<double>(y.rows());
  std::vector<double> grad(net.parameter_count());
  std::vector<std::size_t> offset(net.layers());
  std::size_t pos = 0;
  for (std::size_t l = 0; l < net.layers(); ++l) {
    offset[l] = pos;
    pos += net.weight(l).size() + net.bias(l).size();
  }
  Mat delta = ((2.0 / n) * (acts.back() - y)).array() * acts.back().array() * (1.0 - acts.back().array());
  for (std::size_t l = net.layers(); l-- > 0;) {
    const auto& s = net.layer_sizes();
    Eigen::Map<Mat> gw(grad.data() + offset[l], static_cast<Eigen::Index>(s[l]), static_cast<Eigen::Index>(s[l + 1]));
    gw.noalias() = acts[l].transpose() * delta;
    Eigen::Map<RowVec> gb(grad.data() + offset[l] + net.weight(l).size(), static_cast<Eigen::Index>(s[l + 1]));
    gb = delta.colwise().sum();
    if (l > 0) {
      Mat back = delta * weight_view(net, l).transpose();
      delta = back.array() * acts[l].array() * (1.0 - acts[l].array());
    }
  }
  return grad;
}

double rate_of(const Mat& out, const RowMatrix& y) {
  std::size_t hit = 0;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const std::span<const double> o(out.row(i).data(), static_cast<std::size_t>(out.cols()));
    hit += argmax(o) == argmax(y.row(static_cast<std::size_t>(i)));
  }
  return static_cast<double>(hit) / static_cast<double>(out.rows());
}

Mat to_mat(const RowMatrix& m) { return view(m); }

}  // namespace

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

MlpNetwork::MlpNetwork(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw ValidationError("network needs an input size and at least one neuron layer");
  for (auto s : sizes_)
    if (s == 0) throw ValidationError("layer sizes must be positive");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    weights_.emplace_back(sizes_[l] * sizes_[l + 1], 0.0);
    biases_.emplace_back(sizes_[l + 1], 0.0);
  }
}

std::size_t MlpNetwork::parameter_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t l = 0; l < layers(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

std::vector<double> MlpNetwork::parameters() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  for (std::size_t l = 0; l < layers(); ++l) {
    p.insert(p.end(), weights_[l].begin(), weights_[l].end());
    p.insert(p.end(), biases_[l].begin(), biases_[l].end());
  }
  return p;
}

void MlpNetwork::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) throw ValidationError("parameter vector has the wrong length");
  std::size_t pos = 0;
  for (std::size_t l = 0; l < layers(); ++l) {
    for (auto* v : {&weights_[l], &biases_[l]}) {
      std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(pos), v->size(), v->begin());
      pos += v->size();
    }
  }
}

MlpNetwork mlp_init(std::vector<std::size_t> layer_sizes, std::uint64_t seed) {
  MlpNetwork net(std::move(layer_sizes));
  Rng rng(seed);
  for (std::size_t l = 0; l < net.layers(); ++l)
    for (double& w : net.weight(l)) w = rng.uniform(-0.5, 0.5);
  return net;
}

std::vector<double> mlp_forward(const MlpNetwork& net, std::span<const double> x) {
  if (x.size() != net.inputs())
    throw ValidationError("network expects " + std::to_string(net.inputs()) + " inputs, got " + std::to_string(x.size()));
  std::vector<double> cur(x.begin(), x.end());
  for (std::size_t l = 0; l < net.layers(); ++l) {
    const std::size_t n_in = net.layer_sizes()[l];
    const std::size_t n_out = net.layer_sizes()[l + 1];
    const auto w = net.weight(l);
    std::vector<double> next(net.bias(l).begin(), net.bias(l).end());
    for (std::size_t i = 0; i < n_in; ++i)
      for (std::size_t j = 0; j < n_out; ++j) next[j] += cur[i] * w[i * n_out + j];
    for (double& v : next) v = sigmoid(v);
    cur = std::move(next);
  }
  return cur;
}

RowMatrix mlp_forward(const MlpNetwork& net, const RowMatrix& x) {
  if (x.cols != net.inputs()) throw ValidationError("network expects " + std::to_string(net.inputs()) + " inputs");
  const auto acts = forward_all(net, to_mat(x));
  RowMatrix out(x.rows, net.outputs());
  Eigen::Map<Mat>(out.data.data(), static_cast<Eigen::Index>(out.rows), static_cast<Eigen::Index>(out.cols)) = acts.back();
  return out;
}

double mse(const MlpNetwork& net, const RowMatrix& x, const RowMatrix& y, const Normalizer& normalizer) {
  check_rows(net, x, y);
  const auto acts = forward_all(net, to_mat(normalizer.apply(x)));
  return batch_mse(acts.back(), view(y));
}

std::vector<double> mse_gradient(const MlpNetwork& net, const RowMatrix& x_normalized, const RowMatrix& y) {
  check_rows(net, x_normalized, y);
  return backprop(net, forward_all(net, to_mat(x_normalized)), view(y));
}

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

std::size_t classify(const MlpNetwork& net, std::span<const double> x, const Normalizer& normalizer) {
  return argmax(mlp_forward(net, normalizer.apply(x)));
}

double success_rate(const MlpNetwork& net, const RowMatrix& x, const RowMatrix& y, const Normalizer& normalizer) {
  check_rows(net, x, y);
  return rate_of(forward_all(net, to_mat(normalizer.apply(x))).back(), y);
}

void TrainConfig::validate() const {
  if (!(lr0 > 0.0)) throw ValidationError("lr0 must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ValidationError("momentum must lie in [0, 1)");
  if (!(lr_up > 1.0 && lr_down > 0.0 && lr_down < 1.0)) throw ValidationError("need lr_up > 1 > lr_down > 0");
  if (!(max_rise >= 0.0)) throw ValidationError("max_rise must be nonnegative");
  if (!(lr_max >= lr0)) throw ValidationError("lr_max must be at least lr0");
  if (max_iters < 0 || eval_every < 1) throw ValidationError("max_iters >= 0 and eval_every >= 1 required");
}

TrainHistory mlp_train(MlpNetwork net, const RowMatrix& train_x, const RowMatrix& train_y, const RowMatrix& test_x,
                       const RowMatrix& test_y, const Normalizer& normalizer, const TrainConfig& cfg) {
  cfg.validate();
  check_rows(net, train_x, train_y);
  check_rows(net, test_x, test_y);
  const Mat xn = to_mat(normalizer.apply(train_x));
  const Mat tn = to_mat(normalizer.apply(test_x));
  const CMap y = view(train_y);
  const CMap ty = view(test_y);

  std::vector<double> params = net.parameters();
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<double> trial(params.size());
  auto acts = forward_all(net, xn);
  double current = batch_mse(acts.back(), y);
  if (!std::isfinite(current)) throw TrainingError("training MSE is not finite at iteration 0");
  std::vector<double> grad = backprop(net, acts, y);
  double lr = cfg.lr0;

  TrainHistory h{.records = {}, .best = net, .best_iteration = 0, .best_test_mse = 0.0, .accepted_steps = 0, .rejected_steps = 0, .accepted_mse = {}};
  auto evaluate = [&](int iteration) {
    const auto test_out = forward_all(net, tn).back();
    const double test_mse = batch_mse(test_out, ty);
    h.records.push_back({iteration, current, test_mse, rate_of(acts.back(), train_y), rate_of(test_out, test_y), lr});
    if (h.records.size() == 1 || test_mse < h.best_test_mse) {
      h.best_test_mse = test_mse;
      h.best_iteration = iteration;
      h.best = net;
    }
  };
  evaluate(0);

  for (int it = 1; it <= cfg.max_iters; ++it) {
    std::vector<double> step(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      step[i] = cfg.momentum * velocity[i] - lr * grad[i];
      trial[i] = params[i] + step[i];
    }
    net.set_parameters(trial);
    auto trial_acts = forward_all(net, xn);
    const double trial_mse = batch_mse(trial_acts.back(), y);
    if (!std::isfinite(trial_mse)) throw TrainingError("training MSE is not finite at iteration " + std::to_string(it));
    if (trial_mse < current) {
      params.swap(trial);
      velocity.swap(step);
      acts = std::move(trial_acts);
      current = trial_mse;
      grad = backprop(net, acts, y);
      lr = std::min(lr * cfg.lr_up, cfg.lr_max);
      ++h.accepted_steps;
      h.accepted_mse.push_back(current);
    } else {
      net.set_parameters(params);
      const bool plain = std::all_of(velocity.begin(), velocity.end(), [](double v) { return v == 0.0; });
      if (plain || trial_mse > current * (1.0 + cfg.max_rise)) lr *= cfg.lr_down;
      std::fill(velocity.begin(), velocity.end(), 0.0);
      ++h.rejected_steps;
    }
    if (it % cfg.eval_every == 0 || it == cfg.max_iters) evaluate(it);
  }
  return h;
}

std::string mlp_to_json(const MlpNetwork& net, const Normalizer& normalizer) {
  nlohmann::json doc;
  doc["format"] = "qlc-model";
  doc["version"] = 1;
  doc["type"] = "mlp";
  doc["layer_sizes"] = net.layer_sizes();
  doc["weights"] = nlohmann::json::array();
  doc["biases"] = nlohmann::json::array();
  for (std::size_t l = 0; l < net.layers(); ++l) {
    doc["weights"].push_back(std::vector<double>(net.weight(l).begin(), net.weight(l).end()));
    doc["biases"].push_back(std::vector<double>(net.bias(l).begin(), net.bias(l).end()));
  }
  doc["normalizer"] = {{"min", std::vector<double>(normalizer.min().begin(), normalizer.min().end())},
                       {"max", std::vector<double>(normalizer.max().begin(), normalizer.max().end())}};
  return doc.dump(1) + "\n";
}

std::pair<MlpNetwork, Normalizer> mlp_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format") != "qlc-model" || doc.at("type") != "mlp") throw ParseError("not an MLP model document", 0);
    if (doc.at("version") != 1) throw ParseError("unsupported MLP model version", 0);
    MlpNetwork net(doc.at("layer_sizes").get<std::vector<std::size_t>>());
    const auto& w = doc.at("weights");
    const auto& b = doc.at("biases");
    if (w.size() != net.layers() || b.size() != net.layers()) throw ParseError("layer count mismatch", 0);
    for (std::size_t l = 0; l < net.layers(); ++l) {
      const auto wl = w[l].get<std::vector<double>>();
      const auto bl = b[l].get<std::vector<double>>();
      if (wl.size() != net.weight(l).size() || bl.size() != net.bias(l).size())
        throw ParseError("parameter shape mismatch in layer " + std::to_string(l), 0);
      std::copy(wl.begin(), wl.end(), net.weight(l).begin());
      std::copy(bl.begin(), bl.end(), net.bias(l).begin());
    }
    Normalizer norm(doc.at("normalizer").at("min").get<std::vector<double>>(),
                    doc.at("normalizer").at("max").get<std::vector<double>>());
    if (norm.dim() != net.inputs()) throw ParseError("normalizer size does not match the input layer", 0);
    return {std::move(net), std::move(norm)};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed MLP model: ") + e.what(), 0);
  }
}

}  // namespace qlc
