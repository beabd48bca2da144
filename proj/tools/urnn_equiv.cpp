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

// urnn-equiv: command-line driver for system generation, unitary embedding,
// equivalence checks, training sweeps and the converse witnesses.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "urnn/equivalence.hpp"
#include "urnn/error.hpp"
#include "urnn/experiment.hpp"
#include "urnn/io.hpp"
#include "urnn/linalg.hpp"
#include "urnn/parallel.hpp"
#include "urnn/rnn.hpp"
#include "urnn/synth.hpp"
#include "urnn/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kFail = 1, kUsage = 2, kIo = 3, kNumerical = 4 };

double parse_snr(const std::string& text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw urnn::InvalidInput("--snr-db: not a number: " + text);
  }
}

std::size_t resolve_threads(std::size_t flag) {
  return flag > 0 ? flag : urnn::default_thread_count();
}

void write_report(const std::string& path, const json& j) {
  if (!path.empty()) urnn::atomic_write_file(path, urnn::dump_report(j));
}

// ---------------------------------------------------------------- gen-system

struct GenSystemArgs {
  urnn::SystemSpec spec;
  std::string out = "model.json";
};

void add_gen_system(CLI::App& app, GenSystemArgs& a) {
  CLI::App* c = app.add_subcommand("gen-system", "Generate a slowly-varying relu system");
  c->add_option("--n", a.spec.n, "State dimension")->capture_default_str();
  c->add_option("--m", a.spec.m, "Input dimension")->capture_default_str();
  c->add_option("--p", a.spec.p, "Output dimension")->capture_default_str();
  c->add_option("--epsilon", a.spec.epsilon, "Distance of W from the identity")
      ->capture_default_str();
  c->add_option("--seed", a.spec.seed, "Random seed")->capture_default_str();
  c->add_option("--activity", a.spec.activation_target, "Target fraction of active steps")
      ->capture_default_str();
  c->add_option("--input-std", a.spec.input_std, "Input standard deviation")
      ->capture_default_str();
  c->add_option("--sparsity", a.spec.input_sparsity, "Probability an input entry is nonzero")
      ->capture_default_str();
  c->add_option("--out", a.out, "Output model file")->capture_default_str();
}

int run_gen_system(const GenSystemArgs& a) {
  const urnn::GeneratedSystem g = urnn::generate_system(a.spec);
  json meta{{"generator", urnn::spec_to_json(a.spec)},
            {"singular_value_min", g.min_singular_value},
            {"singular_value_max", g.max_singular_value},
            {"activity_fractions", g.calibration.fractions},
            {"calibration_iterations", g.calibration.iterations}};
  urnn::save_model(a.out, g.params, meta);
  std::printf("wrote %s: n=%zu m=%zu p=%zu singular values in [%.17g, %.17g]\n", a.out.c_str(),
              a.spec.n, a.spec.m, a.spec.p, g.min_singular_value, g.max_singular_value);
  return kOk;
}

// ------------------------------------------------------------------ gen-data

struct GenDataArgs {
  std::string model;
  std::string out = "data";
  std::size_t n_train = 700;
  std::size_t n_test = 300;
  std::size_t t_len = 1000;
  std::string snr = "20";
  std::uint64_t seed = 0;
  std::optional<double> input_std;
  std::optional<double> sparsity;
};

void add_gen_data(CLI::App& app, GenDataArgs& a) {
  CLI::App* c = app.add_subcommand("gen-data", "Simulate a model to produce a noisy dataset");
  c->add_option("--model", a.model, "Model file")->required();
  c->add_option("--out", a.out, "Output dataset directory")->capture_default_str();
  c->add_option("--n-train", a.n_train, "Training sequences")->capture_default_str();
  c->add_option("--n-test", a.n_test, "Test sequences")->capture_default_str();
  c->add_option("--T", a.t_len, "Sequence length")->capture_default_str();
  c->add_option("--snr-db", a.snr, "Output SNR in dB, or inf")->capture_default_str();
  c->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  c->add_option("--input-std", a.input_std,
                 "Input standard deviation (default: the model's generator setting or 1)");
  c->add_option("--sparsity", a.sparsity,
                "Probability an input entry is nonzero (default: generator setting or 1)");
}

int run_gen_data(const GenDataArgs& a) {
  const urnn::RnnParams params = urnn::load_model(a.model);
  const json model = json::parse(urnn::read_file(a.model));
  urnn::SystemSpec spec;
  if (model.contains("metadata") && model["metadata"].contains("generator")) {
    spec = urnn::spec_from_json(model["metadata"]["generator"]);
  }
  spec.n = params.state_dim();
  spec.m = params.input_dim();
  spec.p = params.output_dim();
  if (a.input_std) spec.input_std = *a.input_std;
  if (a.sparsity) spec.input_sparsity = *a.sparsity;
  const double snr = parse_snr(a.snr);
  const urnn::Dataset ds =
      urnn::generate_dataset(params, spec, a.n_train, a.n_test, a.t_len, snr, a.seed);
  urnn::save_dataset(a.out, ds, json{{"model_hash", urnn::params_digest(params)}});
  std::printf("wrote %s: %zu train / %zu test, T=%zu, empirical SNR %.4f dB\n", a.out.c_str(),
              ds.train.size(), ds.test.size(), ds.t_len, ds.empirical_snr_db);
  return kOk;
}

// --------------------------------------------------------------------- embed

struct EmbedArgs {
  std::string model;
  std::string out = "urnn.json";
  double bound_m = 10.0;
};

void add_embed(CLI::App& app, EmbedArgs& a) {
  CLI::App* c = app.add_subcommand("embed", "Build the 2n-state unitary embedding of a model");
  c->add_option("--model", a.model, "Contractive relu model")->required();
  c->add_option("--bound-m", a.bound_m, "Input norm bound M")->capture_default_str();
  c->add_option("--out", a.out, "Output model file")->capture_default_str();
}

int run_embed(const EmbedArgs& a) {
  const urnn::RnnParams source = urnn::load_model(a.model);
  const urnn::EmbeddingRecord rec = urnn::unitary_embedding(source, a.bound_m);
  const double residual = urnn::orthogonality_residual(rec.urnn.w);
  json meta{{"source_hash", rec.source_hash},
            {"rho", rec.rho},
            {"input_bound_m", rec.input_bound_m},
            {"state_bound_mh", rec.state_bound_mh},
            {"orthogonality_residual", residual}};
  urnn::save_model(a.out, rec.urnn, meta);
  std::printf("rho = %.17g\nM_h = %.17g\northogonality residual = %.3e\nwrote %s (%zu states)\n",
              rec.rho, rec.state_bound_mh, residual, a.out.c_str(), rec.urnn.state_dim());
  return kOk;
}

// -------------------------------------------------------------------- verify

struct VerifyArgs {
  std::string model_a;
  std::string model_b;
  double bound_m = 10.0;
  std::size_t trials = 20;
  std::size_t t_len = 200;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string report = "report.json";
};

void add_verify(CLI::App& app, VerifyArgs& a) {
  CLI::App* c = app.add_subcommand("verify", "Compare two models on bounded random inputs");
  c->add_option("--a", a.model_a, "First model")->required();
  c->add_option("--b", a.model_b, "Second model")->required();
  c->add_option("--bound-m", a.bound_m, "Input norm bound M")->capture_default_str();
  c->add_option("--trials", a.trials, "Random input sequences")->capture_default_str();
  c->add_option("--T", a.t_len, "Sequence length")->capture_default_str();
  c->add_option("--tol", a.tol, "Maximum allowed output deviation")->capture_default_str();
  c->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  c->add_option("--threads", a.threads, "Worker threads (0: URNN_EQUIV_THREADS or all cores)");
  c->add_option("--report", a.report, "Report file")->capture_default_str();
}

int run_verify(const VerifyArgs& a) {
  const urnn::RnnParams pa = urnn::load_model(a.model_a);
  const urnn::RnnParams pb = urnn::load_model(a.model_b);
  const urnn::EquivalenceReport rep = urnn::verify_equivalence(
      pa, pb, a.bound_m, a.trials, a.t_len, a.tol, a.seed, resolve_threads(a.threads));
  json j = urnn::to_json(rep);
  j["model_a"] = {{"path", a.model_a}, {"hash", urnn::params_digest(pa)}};
  j["model_b"] = {{"path", a.model_b}, {"hash", urnn::params_digest(pb)}};
  write_report(a.report, j);
  std::printf("max deviation %.3e (tol %.1e): %s\n", rep.max_abs_deviation, rep.tolerance,
              rep.passed ? "PASS" : "FAIL");
  return rep.passed ? kOk : kFail;
}

// --------------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string init;
  std::string out = "trained.json";
  std::string report = "train_report.json";
  std::string constraint = "none";
  urnn::TrainConfig config;
  bool timing = false;
};

void add_train(CLI::App& app, TrainArgs& a) {
  CLI::App* c = app.add_subcommand("train", "Train a student network on a dataset");
  c->add_option("--data", a.data, "Dataset directory")->required();
  c->add_option("--units", a.config.hidden_units, "Hidden units")->required();
  c->add_option("--constraint", a.constraint, "none | contractive | unitary")
      ->capture_default_str();
  c->add_option("--cap", a.config.constraint.cap, "Spectral-norm cap for contractive training")
      ->capture_default_str();
  c->add_option("--lr", a.config.learning_rate, "Adam learning rate")->capture_default_str();
  c->add_option("--batch", a.config.batch_size, "Minibatch size")->capture_default_str();
  c->add_option("--max-epochs", a.config.max_epochs, "Epoch limit")->capture_default_str();
  c->add_option("--patience", a.config.patience, "Early-stopping patience in epochs")
      ->capture_default_str();
  c->add_option("--val-frac", a.config.validation_fraction, "Validation fraction")
      ->capture_default_str();
  c->add_option("--seed", a.config.seed, "Random seed")->capture_default_str();
  c->add_option("--threads", a.config.threads, "Gradient worker threads")->capture_default_str();
  c->add_option("--init", a.init, "Initial model (default: random)");
  c->add_option("--out", a.out, "Trained model file")->capture_default_str();
  c->add_option("--report", a.report, "Training report file")->capture_default_str();
  c->add_flag("--timing", a.timing, "Record wall-clock time in the report");
}

json train_config_json(const urnn::TrainConfig& t) {
  return json{{"hidden_units", t.hidden_units},
              {"constraint", urnn::to_string(t.constraint.kind)},
              {"contractive_cap", t.constraint.cap},
              {"learning_rate", t.learning_rate},
              {"batch_size", t.batch_size},
              {"max_epochs", t.max_epochs},
              {"patience", t.patience},
              {"validation_fraction", t.validation_fraction},
              {"beta1", t.adam.beta1},
              {"beta2", t.adam.beta2},
              {"adam_eps", t.adam.eps},
              {"seed", t.seed}};
}

int run_train(TrainArgs& a) {
  a.config.constraint.kind = urnn::parse_constraint(a.constraint);
  const urnn::Dataset ds = urnn::load_dataset(a.data);
  const std::size_t m = ds.spec.m, p = ds.spec.p;
  urnn::RnnParams init;
  if (a.init.empty()) {
    init = urnn::init_student(a.config.hidden_units, m, p, a.config.constraint, a.config.seed);
  } else {
    init = urnn::load_model(a.init);
    if (init.state_dim() != a.config.hidden_units) {
      throw urnn::DimensionMismatch("--init model has " + std::to_string(init.state_dim()) +
                                    " states but --units is " +
                                    std::to_string(a.config.hidden_units));
    }
  }
  const urnn::TrainResult tr = urnn::train(init, ds, a.config);
  const urnn::Evaluation ev = urnn::evaluate(tr.params, ds.test, ds.noise_power);
  json j = urnn::to_json(tr.report, a.timing);
  j["config"] = train_config_json(a.config);
  j["data"] = a.data;
  j["init"] = a.init.empty() ? json("random") : json(a.init);
  j["final_test_r2"] = ev.r2;
  j["optimal_r2"] = ev.optimal_r2;
  urnn::save_model(a.out, tr.params, json{{"train", train_config_json(a.config)}});
  write_report(a.report, j);
  std::printf("%s after %zu epochs (best %zu): test R2 %.4f, optimal %.4f\n",
              tr.report.stopping_reason.c_str(), tr.report.epochs_run, tr.report.best_epoch,
              ev.r2, ev.optimal_r2);
  return kOk;
}

// ---------------------------------------------------------------------- eval

struct EvalArgs {
  std::string model;
  std::string data;
  std::string report;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  CLI::App* c = app.add_subcommand("eval", "Evaluate a model on a dataset's test split");
  c->add_option("--model", a.model, "Model file")->required();
  c->add_option("--data", a.data, "Dataset directory")->required();
  c->add_option("--report", a.report, "Optional report file");
}

int run_eval(const EvalArgs& a) {
  const urnn::RnnParams params = urnn::load_model(a.model);
  const urnn::Dataset ds = urnn::load_dataset(a.data);
  const urnn::Evaluation ev = urnn::evaluate(params, ds.test, ds.noise_power);
  write_report(a.report, json{{"format_version", urnn::kFormatVersion},
                              {"model", a.model},
                              {"model_hash", urnn::params_digest(params)},
                              {"data", a.data},
                              {"test_r2", ev.r2},
                              {"optimal_r2", ev.optimal_r2}});
  std::printf("test R2 %.6f, optimal R2 %.6f\n", ev.r2, ev.optimal_r2);
  return kOk;
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string preset = "desk";
  std::string out = "experiment";
  std::vector<std::uint64_t> seeds;
  std::size_t max_epochs = 0;
  std::size_t threads = 0;
  bool timing = false;
};

void add_experiment(CLI::App& app, ExperimentArgs& a) {
  CLI::App* c = app.add_subcommand("experiment", "Hidden-unit sweep over constraint modes");
  c->add_option("--preset", a.preset, "desk | paper")
      ->check(CLI::IsMember({"desk", "paper"}))
      ->capture_default_str();
  c->add_option("--out", a.out, "Output directory")->capture_default_str();
  c->add_option("--seeds", a.seeds, "Override the realization seeds");
  c->add_option("--max-epochs", a.max_epochs, "Override the epoch limit");
  c->add_option("--threads", a.threads, "Worker threads (0: URNN_EQUIV_THREADS or all cores)");
  c->add_flag("--timing", a.timing, "Record wall-clock time per cell");
}

int run_experiment(const ExperimentArgs& a) {
  urnn::ExperimentConfig cfg = a.preset == "paper" ? urnn::paper_preset() : urnn::desk_preset();
  if (!a.seeds.empty()) cfg.seeds = a.seeds;
  if (a.max_epochs > 0) cfg.train.max_epochs = a.max_epochs;
  cfg.threads = resolve_threads(a.threads);
  cfg.record_wall_time = a.timing;
  if (!fs::is_directory(a.out)) throw urnn::IoError("output directory does not exist: " + a.out);
  const urnn::ExperimentResult res = urnn::run_experiment(cfg);
  json summary = urnn::summary_to_json(cfg, res);
  summary["preset"] = a.preset;
  urnn::atomic_write_file(fs::path(a.out) / "results.csv", urnn::rows_to_csv(res.rows, a.timing));
  urnn::atomic_write_file(fs::path(a.out) / "summary.json", urnn::dump_report(summary));
  std::printf("%-12s %6s %8s %10s %10s %8s\n", "mode", "units", "adjusted", "median_r2",
              "max_r2", "failed");
  for (const urnn::CellSummary& s : res.summary) {
    std::printf("%-12s %6zu %8.1f %10.4f %10.4f %8zu\n", s.mode.c_str(), s.hidden_units,
                s.adjusted_units, s.median_test_r2, s.max_test_r2, s.failures);
  }
  if (res.any_failed) {
    std::fprintf(stderr, "error: some cells failed; see summary.json\n");
    return kNumerical;
  }
  return kOk;
}

// ------------------------------------------------------------------ converse

struct ConverseArgs {
  double w_c = 0.9;
  std::size_t grid = 61;
  double bound_m = 10.0;
  std::size_t candidates = 100;
  std::uint64_t seed = 0;
  std::vector<double> x_grid{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::string report = "converse.json";
};

void add_converse(CLI::App& app, ConverseArgs& a, CLI::App*& relu, CLI::App*& sigmoid) {
  CLI::App* c = app.add_subcommand("converse", "Witnesses that equivalence needs 2n states");
  c->require_subcommand(1);
  relu = c->add_subcommand("relu", "Grid search over 1-state URNNs against the relu witness");
  relu->add_option("--wc", a.w_c, "Witness weight in (0,1)")->capture_default_str();
  relu->add_option("--grid", a.grid, "Grid points per parameter")->capture_default_str();
  relu->add_option("--bound-m", a.bound_m, "Input bound for the contrast embedding")
      ->capture_default_str();
  relu->add_option("--report", a.report, "Report file")->capture_default_str();
  sigmoid = c->add_subcommand("sigmoid", "Fixed-point mismatch against random sigmoid URNNs");
  sigmoid->add_option("--wc", a.w_c, "Reference weight in (0,1)")->capture_default_str();
  sigmoid->add_option("--candidates", a.candidates, "Random scalar candidates")
      ->capture_default_str();
  sigmoid->add_option("--seed", a.seed, "Candidate seed")->capture_default_str();
  sigmoid->add_option("--x", a.x_grid, "Constant-input probes")->capture_default_str();
  sigmoid->add_option("--report", a.report, "Report file")->capture_default_str();
}

int run_converse_relu(const ConverseArgs& a) {
  const urnn::RnnParams witness = urnn::converse_relu_witness(1, a.w_c);
  const urnn::OneStateGap gap = urnn::one_state_urnn_gap(witness, a.grid);
  const urnn::EmbeddingRecord emb = urnn::unitary_embedding(witness, a.bound_m);
  const std::vector<urnn::Matrix> probes = urnn::one_state_probe_set();
  const double emb_dev = urnn::probe_set_deviation(witness, emb.urnn, probes);
  json j{{"format_version", urnn::kFormatVersion},
         {"kind", "relu"},
         {"w_c", a.w_c},
         {"grid_resolution", a.grid},
         {"candidates", gap.candidates},
         {"gap", gap.gap},
         {"best_candidate",
          {{"w", gap.best_w}, {"f", gap.best_f}, {"b", gap.best_b}, {"c", gap.best_c}}},
         {"embedding_states", emb.urnn.state_dim()},
         {"embedding_bound_m", a.bound_m},
         {"embedding_deviation", emb_dev},
         {"probe_sequences", probes.size()}};
  write_report(a.report, j);
  std::printf("1-state URNN gap: %.6g over %zu candidates (best w=%g f=%g b=%g c=%g)\n",
              gap.gap, gap.candidates, gap.best_w, gap.best_f, gap.best_b, gap.best_c);
  std::printf("2-state embedding deviation: %.3e\n", emb_dev);
  return kOk;
}

int run_converse_sigmoid(const ConverseArgs& a) {
  if (a.candidates == 0) throw urnn::InvalidInput("--candidates must be positive");
  urnn::sigmoid_reference(a.w_c);
  json rows = json::array();
  double min_gap = std::numeric_limits<double>::infinity();
  std::size_t admissible = 0;
  for (std::size_t i = 0; i < a.candidates; ++i) {
    const urnn::RnnParams cand = urnn::random_sigmoid_candidate(a.seed, i);
    const urnn::MismatchReport rep = urnn::sigmoid_mismatch_witness(a.w_c, cand, a.x_grid);
    json r = urnn::to_json(rep);
    r["candidate"] = {{"w", cand.w(0, 0)}, {"f", cand.f(0, 0)}, {"b", cand.b[0]},
                      {"c", cand.c(0, 0)}};
    rows.push_back(r);
    if (rep.max_gap) {
      ++admissible;
      min_gap = std::min(min_gap, *rep.max_gap);
    }
  }
  json j{{"format_version", urnn::kFormatVersion},
         {"kind", "sigmoid"},
         {"w_c", a.w_c},
         {"seed", a.seed},
         {"x_grid", a.x_grid},
         {"candidates", rows},
         {"admissible_candidates", admissible},
         {"min_max_gap", admissible > 0 ? json(min_gap) : json(nullptr)}};
  write_report(a.report, j);
  if (admissible > 0) {
    std::printf("%zu/%zu candidates admissible; smallest max_gap %.6g\n", admissible,
                a.candidates, min_gap);
  } else {
    std::printf("no admissible candidates\n");
  }
  return kOk;
}

// ----------------------------------------------------------------------- dof

struct DofArgs {
  std::uint64_t n = 4, m = 2, p = 2;
};

void add_dof(CLI::App& app, DofArgs& a) {
  CLI::App* c = app.add_subcommand("dof", "Parameter counts of an RNN and its 2n-state URNN");
  c->add_option("--n", a.n, "State dimension")->capture_default_str();
  c->add_option("--m", a.m, "Input dimension")->capture_default_str();
  c->add_option("--p", a.p, "Output dimension")->capture_default_str();
}

int run_dof(const DofArgs& a) {
  const std::uint64_t rnn = urnn::dof_count(a.n, a.m, a.p, urnn::DofKind::kRnn);
  const std::uint64_t ur = urnn::dof_count(a.n, a.m, a.p, urnn::DofKind::kUrnnDouble);
  std::printf("rnn  (n=%llu): %llu\nurnn (2n=%llu): %llu\nratio: %.6f\n",
              static_cast<unsigned long long>(a.n), static_cast<unsigned long long>(rnn),
              static_cast<unsigned long long>(2 * a.n), static_cast<unsigned long long>(ur),
              static_cast<double>(ur) / static_cast<double>(rnn));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unitary/contractive RNN equivalence toolkit"};
  app.require_subcommand(1);
  GenSystemArgs gen_system;
  GenDataArgs gen_data;
  EmbedArgs embed;
  VerifyArgs verify;
  TrainArgs train;
  EvalArgs eval;
  ExperimentArgs experiment;
  ConverseArgs converse;
  DofArgs dof;
  CLI::App* converse_relu = nullptr;
  CLI::App* converse_sigmoid = nullptr;
  add_gen_system(app, gen_system);
  add_gen_data(app, gen_data);
  add_embed(app, embed);
  add_verify(app, verify);
  add_train(app, train);
  add_eval(app, eval);
  add_experiment(app, experiment);
  add_converse(app, converse, converse_relu, converse_sigmoid);
  add_dof(app, dof);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (app.got_subcommand("gen-system")) return run_gen_system(gen_system);
    if (app.got_subcommand("gen-data")) return run_gen_data(gen_data);
    if (app.got_subcommand("embed")) return run_embed(embed);
    if (app.got_subcommand("verify")) return run_verify(verify);
    if (app.got_subcommand("train")) return run_train(train);
    if (app.got_subcommand("eval")) return run_eval(eval);
    if (app.got_subcommand("experiment")) return run_experiment(experiment);
    if (converse_relu->parsed()) return run_converse_relu(converse);
    if (converse_sigmoid->parsed()) return run_converse_sigmoid(converse);
    if (app.got_subcommand("dof")) return run_dof(dof);
  } catch (const urnn::InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const urnn::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  } catch (const urnn::NumericalFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumerical;
  }
  return kUsage;
}
