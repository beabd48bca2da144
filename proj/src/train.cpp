// Copyright 2026 The urnn-equiv Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "urnn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "urnn/parallel.hpp"

namespace urnn {

namespace {

void check_shapes(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) throw DimensionMismatch(std::string("adam: shape mismatch in ") + what);
}

double loss_or_diverge(const RnnParams& params, std::span<const Sequence> seqs,
                       std::size_t epoch) {
  double loss = 0.0;
  try {
    loss = batch_loss(params, seqs);
  } catch (const OverflowError& e) {
    throw DivergenceError(std::string("training diverged: ") + e.what(), epoch);
  }
  if (!std::isfinite(loss)) {
    throw DivergenceError("training diverged: non-finite loss at epoch " + std::to_string(epoch),
                          epoch);
  }
  return loss;
}

}  // namespace

std::string_view to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::kNone:
      return "none";
    case ConstraintKind::kContractive:
      return "contractive";
    case ConstraintKind::kUnitary:
      return "unitary";
  }
  return "unknown";
}

ConstraintKind parse_constraint(std::string_view name) {
  if (name == "none" || name == "rnn") return ConstraintKind::kNone;
  if (name == "contractive") return ConstraintKind::kContractive;
  if (name == "unitary" || name == "urnn") return ConstraintKind::kUnitary;
  throw InvalidInput("unknown constraint '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidInput("train: learning rate must be positive");
  if (batch_size == 0) throw InvalidInput("train: batch size must be at least 1");
  if (constraint.kind == ConstraintKind::kContractive &&
      !(constraint.cap > 0.0 && constraint.cap < 1.0)) {
    throw InvalidInput("train: contractive cap must lie in (0, 1)");
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw InvalidInput("train: validation fraction must lie in (0, 1)");
  }
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) ||
      !(adam.eps > 0.0)) {
    throw InvalidInput("train: invalid Adam hyperparameters");
  }
}

AdamState AdamState::fresh(const RnnParams& params) {
  return AdamState{RnnGradients::zeros_like(params), RnnGradients::zeros_like(params), 0};
}

void adam_update(std::span<double> theta, std::span<double> m, std::span<double> v,
                 std::span<const double> g, std::uint64_t t, double lr, const AdamConfig& cfg) {
  check_shapes(theta, g, "gradient");
  check_shapes(theta, m, "first moment");
  check_shapes(theta, v, "second moment");
  const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double m_hat = m[i] / bias1;
    const double v_hat = v[i] / bias2;
    theta[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

void adam_step(RnnParams& params, AdamState& state, const RnnGradients& grads,
               const TrainConfig& config) {
  ++state.t;
  const double lr = config.learning_rate;
  adam_update(params.w.data(), state.m.w.data(), state.v.w.data(), grads.w.data(), state.t, lr,
              config.adam);
  adam_update(params.f.data(), state.m.f.data(), state.v.f.data(), grads.f.data(), state.t, lr,
              config.adam);
  adam_update(params.b, state.m.b, state.v.b, grads.b, state.t, lr, config.adam);
  adam_update(params.c.data(), state.m.c.data(), state.v.c.data(), grads.c.data(), state.t, lr,
              config.adam);
}

RnnParams project_params(const RnnParams& params, const Constraint& constraint) {
  switch (constraint.kind) {
    case ConstraintKind::kNone:
      return params;
    case ConstraintKind::kContractive: {
      RnnParams out = params;
      out.w = singular_value_clip(params.w, constraint.cap);
      return out;
    }
    case ConstraintKind::kUnitary: {
      RnnParams out = params;
      out.w = polar_orthogonal_projection(params.w);
      return out;
    }
  }
  return params;
}

double constraint_residual(const RnnParams& params, const Constraint& constraint) {
  switch (constraint.kind) {
    case ConstraintKind::kNone:
      return 0.0;
    case ConstraintKind::kContractive:
      return spectral_norm(params.w);
    case ConstraintKind::kUnitary:
      return orthogonality_residual(params.w);
  }
  return 0.0;
}

RnnParams init_student(std::size_t hidden_units, std::size_t m, std::size_t p,
                       const Constraint& constraint, std::uint64_t seed) {
  if (hidden_units == 0) throw InvalidInput("init_student: hidden units must be positive");
  std::mt19937_64 rng(derive_seed(seed, 0x5747));
  const double scale = 1.0 / std::sqrt(static_cast<double>(hidden_units));
  std::normal_distribution<double> gauss(0.0, scale);
  RnnParams params = RnnParams::zeros(hidden_units, m, p, Activation::kRelu);
  for (double& v : params.w.data()) v = gauss(rng);
  for (double& v : params.f.data()) v = gauss(rng);
  for (double& v : params.c.data()) v = gauss(rng);
  return project_params(params, constraint);
}

double optimal_r2(std::span<const Sequence> test, double noise_power) {
  if (test.empty()) throw InvalidInput("optimal_r2: empty test set");
  const std::size_t p = test.front().y.cols();
  double total_var = 0.0;
  for (std::size_t c = 0; c < p; ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const Sequence& s : test) {
      for (std::size_t k = 0; k < s.y.rows(); ++k) sum += s.y(k, c);
      count += s.y.rows();
    }
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (const Sequence& s : test) {
      for (std::size_t k = 0; k < s.y.rows(); ++k) ss += (s.y(k, c) - mean) * (s.y(k, c) - mean);
    }
    total_var += ss / static_cast<double>(count);
  }
  if (!(total_var > 0.0)) throw InvalidInput("optimal_r2: targets have zero variance");
  return 1.0 - noise_power * static_cast<double>(p) / total_var;
}

Evaluation evaluate(const RnnParams& params, std::span<const Sequence> test,
                    double noise_power) {
  if (test.empty()) throw InvalidInput("evaluate: empty test set");
  std::size_t rows = 0;
  for (const Sequence& s : test) {
    if (!s.has_targets()) throw InvalidInput("evaluate: sequence has no targets");
    rows += s.y.rows();
  }
  const std::size_t p = params.output_dim();
  Matrix pred(rows, p), truth(rows, p);
  std::size_t offset = 0;
  for (const Sequence& s : test) {
    const Matrix y = rnn_map(params, s.x);
    if (s.y.cols() != p) throw DimensionMismatch("evaluate: target width mismatch");
    std::copy(y.data().begin(), y.data().end(), pred.row(offset).begin());
    std::copy(s.y.data().begin(), s.y.data().end(), truth.row(offset).begin());
    offset += s.y.rows();
  }
  return Evaluation{r_squared(pred, truth), optimal_r2(test, noise_power)};
}

TrainResult train(const RnnParams& init, const Dataset& data, const TrainConfig& config) {
  config.validate();
  init.validate();
  if (config.hidden_units != 0 && config.hidden_units != init.state_dim()) {
    throw InvalidInput("train: hidden_units does not match the initial state dimension");
  }
  if (data.train.empty()) throw InvalidInput("train: empty training set");
  const Sequence& first = data.train.front();
  if (first.x.cols() != init.input_dim() || first.y.cols() != init.output_dim()) {
    throw DimensionMismatch("train: model dimensions do not match the dataset");
  }
  const auto t0 = std::chrono::steady_clock::now();

  // Seeded validation split.
  const std::size_t total = data.train.size();
  const auto n_val = static_cast<std::size_t>(
      std::llround(config.validation_fraction * static_cast<double>(total)));
  if (n_val == 0) throw InvalidInput("train: validation split is empty");
  if (n_val >= total) throw InvalidInput("train: validation split leaves no training data");
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 split_rng(derive_seed(config.seed, 1));
  std::shuffle(order.begin(), order.end(), split_rng);
  std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(val_idx.begin(), val_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::vector<Sequence> val_set, train_set;
  for (std::size_t i : val_idx) val_set.push_back(data.train[i]);
  for (std::size_t i : train_idx) train_set.push_back(data.train[i]);

  RnnParams params = project_params(init, config.constraint);
  AdamState adam = AdamState::fresh(params);
  TrainResult result{params, {}};
  TrainReport& rep = result.report;
  rep.seed = config.seed;
  rep.best_validation_loss = std::numeric_limits<double>::infinity();
  rep.stopping_reason = "max_epochs";

  std::mt19937_64 shuffle_rng(derive_seed(config.seed, 2));
  std::vector<std::size_t> perm(train_set.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), shuffle_rng);
    for (std::size_t start = 0; start < perm.size(); start += config.batch_size) {
      const std::size_t stop = std::min(start + config.batch_size, perm.size());
      std::vector<Sequence> batch;
      batch.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) batch.push_back(train_set[perm[i]]);
      RnnGradients grads;
      try {
        grads = bptt_gradients(params, batch, config.threads);
      } catch (const OverflowError& e) {
        throw DivergenceError(std::string("training diverged: ") + e.what(), epoch);
      }
      if (!std::isfinite(grads.max_abs())) {
        throw DivergenceError("training diverged: non-finite gradient at epoch " +
                                  std::to_string(epoch),
                              epoch);
      }
      adam_step(params, adam, grads, config);
      params = project_params(params, config.constraint);
      if (config.constraint.kind != ConstraintKind::kNone) {
        rep.max_step_residual =
            std::max(rep.max_step_residual, constraint_residual(params, config.constraint));
      }
    }
    const double train_loss = loss_or_diverge(params, train_set, epoch);
    const double val_loss = loss_or_diverge(params, val_set, epoch);
    rep.train_loss.push_back(train_loss);
    rep.validation_loss.push_back(val_loss);
    rep.test_r2.push_back(data.test.empty()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : evaluate(params, data.test, data.noise_power).r2);
    rep.constraint_residual.push_back(constraint_residual(params, config.constraint));
    rep.epochs_run = epoch;
    if (val_loss < rep.best_validation_loss) {
      rep.best_validation_loss = val_loss;
      rep.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      rep.stopping_reason = "early_stop";
      break;
    }
  }
  rep.final_constraint_residual = constraint_residual(result.params, config.constraint);
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace urnn
