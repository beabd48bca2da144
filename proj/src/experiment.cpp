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

#include "urnn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "urnn/io.hpp"
#include "urnn/parallel.hpp"

using nlohmann::json;

namespace urnn {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

struct Realization {
  RnnParams truth;
  Dataset data;
};

struct Cell {
  ConstraintKind mode;
  std::size_t units;
  std::size_t realization;
};

}  // namespace

std::string mode_label(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::kNone:
      return "rnn";
    case ConstraintKind::kContractive:
      return "contractive";
    case ConstraintKind::kUnitary:
      return "urnn";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  system.validate();
  train.validate();
  if (grids.empty()) throw InvalidInput("experiment: no constraint modes selected");
  for (const ModeGrid& g : grids) {
    if (g.hidden_units.empty()) throw InvalidInput("experiment: empty hidden-unit grid");
    if (std::find(g.hidden_units.begin(), g.hidden_units.end(), 0u) != g.hidden_units.end()) {
      throw InvalidInput("experiment: hidden units must be positive");
    }
  }
  if (seeds.empty()) throw InvalidInput("experiment: no seeds");
  if (n_train == 0 || n_test == 0 || t_len == 0) {
    throw InvalidInput("experiment: dataset sizes must be positive");
  }
}

ExperimentConfig paper_preset() {
  ExperimentConfig c;
  c.system.n = 4;
  c.system.m = 2;
  c.system.p = 2;
  c.system.epsilon = 0.01;
  c.n_train = 700;
  c.n_test = 300;
  c.t_len = 1000;
  c.snr_db = 20.0;
  const std::vector<std::size_t> grid{2, 4, 6, 8, 10, 12, 14};
  c.grids = {{ConstraintKind::kNone, grid}, {ConstraintKind::kUnitary, grid}};
  c.seeds.resize(30);
  std::iota(c.seeds.begin(), c.seeds.end(), 1);
  return c;
}

ExperimentConfig desk_preset() {
  ExperimentConfig c = paper_preset();
  c.system.epsilon = 0.05;
  c.n_train = 100;
  c.n_test = 50;
  c.t_len = 200;
  c.grids = {{ConstraintKind::kNone, {2, 4, 8}}, {ConstraintKind::kUnitary, {4, 8, 16}}};
  c.seeds = {1, 2, 3};
  return c;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t threads = std::max<std::size_t>(1, config.threads);

  std::vector<Realization> realizations(config.seeds.size());
  parallel_for(config.seeds.size(), threads, [&](std::size_t i) {
    SystemSpec spec = config.system;
    spec.seed = config.seeds[i];
    realizations[i].truth = generate_system(spec).params;
    realizations[i].data = generate_dataset(realizations[i].truth, spec, config.n_train,
                                            config.n_test, config.t_len, config.snr_db,
                                            derive_seed(config.seeds[i], 0xDA7A));
  });

  std::vector<Cell> cells;
  for (const ModeGrid& g : config.grids) {
    for (std::size_t units : g.hidden_units) {
      for (std::size_t r = 0; r < realizations.size(); ++r) cells.push_back({g.mode, units, r});
    }
  }

  std::vector<ExperimentRow> rows(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const Realization& real = realizations[cell.realization];
    ExperimentRow& row = rows[i];
    row.mode = mode_label(cell.mode);
    row.hidden_units = cell.units;
    row.adjusted_units = cell.mode == ConstraintKind::kUnitary
                             ? static_cast<double>(cell.units) / 2.0
                             : static_cast<double>(cell.units);
    row.seed = config.seeds[cell.realization];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      TrainConfig tc = config.train;
      tc.constraint.kind = cell.mode;
      tc.hidden_units = cell.units;
      tc.seed = derive_seed(row.seed, 1000 * static_cast<std::uint64_t>(cell.mode) + cell.units);
      const RnnParams init =
          init_student(cell.units, config.system.m, config.system.p, tc.constraint, tc.seed);
      const TrainResult tr = train(init, real.data, tc);
      const Evaluation ev = evaluate(tr.params, real.data.test, real.data.noise_power);
      row.test_r2 = ev.r2;
      row.optimal_r2 = ev.optimal_r2;
      row.epochs = tr.report.epochs_run;
      row.max_step_residual = tr.report.max_step_residual;
      row.status = "ok";
    } catch (const std::exception& e) {
      row.test_r2 = std::numeric_limits<double>::quiet_NaN();
      row.optimal_r2 = std::numeric_limits<double>::quiet_NaN();
      row.status = e.what();
    }
    row.wall_time = config.record_wall_time
                        ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                              .count()
                        : 0.0;
  });

  std::sort(rows.begin(), rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
    return std::tie(a.mode, a.hidden_units, a.seed) < std::tie(b.mode, b.hidden_units, b.seed);
  });

  ExperimentResult result;
  std::map<std::pair<std::string, std::size_t>, std::vector<const ExperimentRow*>> groups;
  for (const ExperimentRow& row : rows) groups[{row.mode, row.hidden_units}].push_back(&row);
  for (const auto& [key, members] : groups) {
    CellSummary s;
    s.mode = key.first;
    s.hidden_units = key.second;
    s.adjusted_units = members.front()->adjusted_units;
    std::vector<double> r2, opt;
    s.max_test_r2 = -std::numeric_limits<double>::infinity();
    for (const ExperimentRow* r : members) {
      ++s.runs;
      if (r->status != "ok") {
        ++s.failures;
        continue;
      }
      r2.push_back(r->test_r2);
      opt.push_back(r->optimal_r2);
      s.max_test_r2 = std::max(s.max_test_r2, r->test_r2);
    }
    s.median_test_r2 = median(r2);
    s.median_optimal_r2 = median(opt);
    if (r2.empty()) s.max_test_r2 = std::numeric_limits<double>::quiet_NaN();
    result.any_failed = result.any_failed || s.failures > 0;
    result.summary.push_back(s);
  }
  result.rows = std::move(rows);
  return result;
}

std::string rows_to_csv(const std::vector<ExperimentRow>& rows, bool include_wall_time) {
  auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("nan"); };
  std::string out = "mode,hidden_units,adjusted_units,seed,test_r2,optimal_r2,epochs,wall_time\n";
  for (const ExperimentRow& r : rows) {
    out += r.mode + "," + std::to_string(r.hidden_units) + "," + num(r.adjusted_units) + "," +
           std::to_string(r.seed) + "," + num(r.test_r2) + "," + num(r.optimal_r2) + "," +
           std::to_string(r.epochs) + "," + (include_wall_time ? num(r.wall_time) : "0") + "\n";
  }
  return out;
}

json config_to_json(const ExperimentConfig& config) {
  json grids = json::array();
  for (const ModeGrid& g : config.grids) {
    grids.push_back({{"mode", mode_label(g.mode)}, {"hidden_units", g.hidden_units}});
  }
  const TrainConfig& t = config.train;
  return json{{"system", spec_to_json(config.system)},
              {"n_train", config.n_train},
              {"n_test", config.n_test},
              {"T", config.t_len},
              {"snr_db", config.snr_db},
              {"grids", grids},
              {"seeds", config.seeds},
              {"train",
               {{"learning_rate", t.learning_rate},
                {"batch_size", t.batch_size},
                {"max_epochs", t.max_epochs},
                {"contractive_cap", t.constraint.cap},
                {"beta1", t.adam.beta1},
                {"beta2", t.adam.beta2},
                {"adam_eps", t.adam.eps},
                {"patience", t.patience},
                {"validation_fraction", t.validation_fraction}}}};
}

json summary_to_json(const ExperimentConfig& config, const ExperimentResult& result) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json cells = json::array();
  for (const CellSummary& s : result.summary) {
    cells.push_back({{"mode", s.mode},
                     {"hidden_units", s.hidden_units},
                     {"adjusted_units", s.adjusted_units},
                     {"median_test_r2", num(s.median_test_r2)},
                     {"max_test_r2", num(s.max_test_r2)},
                     {"median_optimal_r2", num(s.median_optimal_r2)},
                     {"runs", s.runs},
                     {"failures", s.failures}});
  }
  json failures = json::array();
  for (const ExperimentRow& r : result.rows) {
    if (r.status != "ok") {
      failures.push_back({{"mode", r.mode},
                          {"hidden_units", r.hidden_units},
                          {"seed", r.seed},
                          {"error", r.status}});
    }
  }
  return json{{"format_version", kFormatVersion},
              {"config", config_to_json(config)},
              {"cells", cells},
              {"failures", failures},
              {"any_failed", result.any_failed}};
}

}  // namespace urnn
