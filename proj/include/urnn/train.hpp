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

// Minibatch Adam over BPTT gradients with an optional projection of the
// transition matrix after every step, plus validation-based early stopping.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "urnn/error.hpp"
#include "urnn/rnn.hpp"
#include "urnn/synth.hpp"

namespace urnn {

enum class ConstraintKind { kNone, kContractive, kUnitary };

std::string_view to_string(ConstraintKind k);
ConstraintKind parse_constraint(std::string_view name);

struct Constraint {
  ConstraintKind kind = ConstraintKind::kNone;
  double cap = 0.999;  // spectral-norm cap for kContractive
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t batch_size = 10;
  std::size_t max_epochs = 200;
  Constraint constraint;
  AdamConfig adam;
  std::size_t patience = 10;
  double validation_fraction = 0.15;
  std::uint64_t seed = 0;
  std::size_t hidden_units = 0;
  // Workers for per-sequence gradients inside a minibatch.
  std::size_t threads = 1;

  void validate() const;
};

struct AdamState {
  RnnGradients m;
  RnnGradients v;
  std::uint64_t t = 0;

  static AdamState fresh(const RnnParams& params);
};

// One Adam update on a flat parameter block. `t` is the step count after
// this update (>= 1).
void adam_update(std::span<double> theta, std::span<double> m, std::span<double> v,
                 std::span<const double> g, std::uint64_t t, double lr, const AdamConfig& cfg);

// Adam step on W, F, b, C. h_init is held fixed at its initial value.
void adam_step(RnnParams& params, AdamState& state, const RnnGradients& grads,
               const TrainConfig& config);

// Projects W: polar factor for kUnitary, singular-value clip for
// kContractive, untouched for kNone.
RnnParams project_params(const RnnParams& params, const Constraint& constraint);

// ||W^T W - I||_max for kUnitary, ||W|| for kContractive, 0 otherwise.
double constraint_residual(const RnnParams& params, const Constraint& constraint);

// Gaussian W (std 1/sqrt(n)) projected per the constraint, Gaussian F and C
// (std 1/sqrt(n)), zero b and h_init, relu.
RnnParams init_student(std::size_t hidden_units, std::size_t m, std::size_t p,
                       const Constraint& constraint, std::uint64_t seed);

class DivergenceError : public NumericalFailure {
 public:
  DivergenceError(const std::string& what, std::size_t epoch)
      : NumericalFailure(what), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

struct TrainReport {
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  std::vector<double> test_r2;
  // Constraint residual of W at the end of each epoch.
  std::vector<double> constraint_residual;
  // Largest residual observed immediately after any projection.
  double max_step_residual = 0.0;
  double final_constraint_residual = 0.0;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;  // 1-based epoch of the returned parameters
  double best_validation_loss = 0.0;
  std::string stopping_reason;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
};

struct TrainResult {
  RnnParams params;
  TrainReport report;
};

TrainResult train(const RnnParams& init, const Dataset& data, const TrainConfig& config);

struct Evaluation {
  double r2 = 0.0;
  double optimal_r2 = 0.0;
};

// 1 - noise variance / pooled target variance: the R^2 a perfect model of
// the clean system would score on `test`.
double optimal_r2(std::span<const Sequence> test, double noise_power);

// Channel-averaged R^2 over the concatenated sequences.
Evaluation evaluate(const RnnParams& params, std::span<const Sequence> test,
                    double noise_power);

}  // namespace urnn
