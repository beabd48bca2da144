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

// Hidden-unit sweeps comparing unconstrained, contractive and unitary
// students trained on data from a synthetic slowly-varying ReLU system.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "urnn/synth.hpp"
#include "urnn/train.hpp"

namespace urnn {

struct ModeGrid {
  ConstraintKind mode = ConstraintKind::kNone;
  std::vector<std::size_t> hidden_units;
};

struct ExperimentConfig {
  SystemSpec system;
  std::size_t n_train = 700;
  std::size_t n_test = 300;
  std::size_t t_len = 1000;
  double snr_db = 20.0;
  std::vector<ModeGrid> grids;
  std::vector<std::uint64_t> seeds;  // one realization of the true system each
  TrainConfig train;
  std::size_t threads = 1;
  bool record_wall_time = false;

  void validate() const;
};

// Full-scale sweep: n_true = 4, m = p = 2, eps = 0.01, T = 1000, 700/300
// sequences, 30 realizations, hidden units 2..14 for rnn and urnn.
ExperimentConfig paper_preset();
// Laptop-scale sweep: eps = 0.05, T = 200, 100/50 sequences, 3 seeds,
// rnn at {2, 4, 8} and urnn at {4, 8, 16}.
ExperimentConfig desk_preset();

// "rnn", "contractive", "urnn".
std::string mode_label(ConstraintKind k);

struct ExperimentRow {
  std::string mode;
  std::size_t hidden_units = 0;
  double adjusted_units = 0.0;  // hidden_units / 2 for urnn
  std::uint64_t seed = 0;
  double test_r2 = 0.0;
  double optimal_r2 = 0.0;
  std::size_t epochs = 0;
  double wall_time = 0.0;
  double max_step_residual = 0.0;
  std::string status;  // "ok" or the failure message
};

struct CellSummary {
  std::string mode;
  std::size_t hidden_units = 0;
  double adjusted_units = 0.0;
  double median_test_r2 = 0.0;
  double max_test_r2 = 0.0;
  double median_optimal_r2 = 0.0;
  std::size_t runs = 0;
  std::size_t failures = 0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;  // sorted by (mode, hidden_units, seed)
  std::vector<CellSummary> summary;
  bool any_failed = false;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

std::string rows_to_csv(const std::vector<ExperimentRow>& rows, bool include_wall_time);
nlohmann::json summary_to_json(const ExperimentConfig& config, const ExperimentResult& result);
nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace urnn
