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

// Synthetic slowly-varying ReLU systems and noisy input/output datasets.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "urnn/error.hpp"
#include "urnn/linalg.hpp"
#include "urnn/rnn.hpp"

namespace urnn {

struct SystemSpec {
  std::size_t n = 4;
  std::size_t m = 2;
  std::size_t p = 2;
  double epsilon = 0.01;
  std::uint64_t seed = 0;
  double activation_target = 0.6;
  double input_std = 1.0;
  double input_sparsity = 1.0;  // probability an input entry is nonzero
  double calibration_tol = 0.05;
  std::size_t calibration_max_iter = 200;
  // Probe inputs for bias calibration are drawn from the same law as the
  // dataset inputs.
  std::size_t probe_sequences = 10;
  std::size_t probe_length = 500;

  void validate() const;
};

class CalibrationFailure : public NumericalFailure {
 public:
  CalibrationFailure(const std::string& what, Vector fractions)
      : NumericalFailure(what), fractions_(std::move(fractions)) {}
  const Vector& fractions() const { return fractions_; }

 private:
  Vector fractions_;
};

struct CalibrationResult {
  RnnParams params;
  Vector fractions;  // per unit, fraction of probe steps with h_i > 0
  std::size_t iterations = 0;
};

// Fraction of time steps on which each unit is strictly positive.
Vector activity_fractions(const RnnParams& params, std::span<const Matrix> probe);

// Per-unit damped quantile shift: b_i -= step_i * q_i with q_i the
// (1 - target)-quantile of unit i's pre-activation over the probe runs.
// step_i starts at 1 and halves whenever unit i's activity error changes
// sign. Stops once every unit is within target +/- tol; throws
// CalibrationFailure after max_iter rounds.
CalibrationResult bias_calibrate(const RnnParams& params, std::span<const Matrix> probe,
                                 double target, double tol, std::size_t max_iter);

// Gaussian (std input_std) inputs with entries kept with probability
// input_sparsity.
Matrix sample_inputs(const SystemSpec& spec, std::size_t t_len, std::uint64_t seed,
                     std::size_t index);

struct GeneratedSystem {
  RnnParams params;
  CalibrationResult calibration;
  double min_singular_value = 0.0;
  double max_singular_value = 0.0;
};

// W = I - eps A^T A / ||A||^2, Gaussian F, C, b, relu; b then calibrated.
GeneratedSystem generate_system(const SystemSpec& spec);

struct Dataset {
  std::vector<Sequence> train;
  std::vector<Sequence> test;
  double snr_db = 0.0;  // +inf for noiseless targets
  // Mean square of the clean outputs after removing each channel's mean.
  double clean_signal_power = 0.0;
  double noise_power = 0.0;  // variance of the added noise
  double empirical_snr_db = 0.0;
  SystemSpec spec;
  std::uint64_t seed = 0;
  std::size_t t_len = 0;
};

Dataset generate_dataset(const RnnParams& params, const SystemSpec& spec, std::size_t n_train,
                         std::size_t n_test, std::size_t t_len, double snr_db,
                         std::uint64_t seed);

}  // namespace urnn
