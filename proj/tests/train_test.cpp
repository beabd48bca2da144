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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "test_util.hpp"
#include "urnn/error.hpp"
#include "urnn/io.hpp"
#include "urnn/synth.hpp"
#include "urnn/train.hpp"

namespace urnn {
namespace {

using testing::random_matrix;

Dataset dataset_from(const RnnParams& teacher, std::size_t n_train, std::size_t n_test,
                     std::size_t t_len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Dataset ds;
  for (std::size_t i = 0; i < n_train + n_test; ++i) {
    (i < n_train ? ds.train : ds.test).push_back(testing::random_sequence(teacher, t_len, rng));
  }
  ds.spec.n = teacher.state_dim();
  ds.spec.m = teacher.input_dim();
  ds.spec.p = teacher.output_dim();
  ds.snr_db = std::numeric_limits<double>::infinity();
  ds.t_len = t_len;
  return ds;
}

TEST(Adam, ZeroGradientLeavesParameters) {
  std::mt19937_64 rng(1);
  RnnParams p = testing::random_contractive_relu(3, 2, 2, 0.5, rng);
  const RnnParams before = p;
  AdamState s = AdamState::fresh(p);
  adam_step(p, s, RnnGradients::zeros_like(p), TrainConfig{});
  EXPECT_EQ(p, before);
  EXPECT_EQ(s.t, 1u);
}

TEST(Adam, FirstStepHandValue) {
  double theta = 0.0, m = 0.0, v = 0.0;
  const double g = 1.0;
  adam_update({&theta, 1}, {&m, 1}, {&v, 1}, {&g, 1}, 1, 0.01, AdamConfig{});
  EXPECT_NEAR(theta, -0.01 / (1.0 + 1e-8), 1e-18);
}

TEST(Adam, ConstantGradientStepBound) {
  double theta = 0.0, m = 0.0, v = 0.0;
  const double g = 3.7;
  double prev = theta;
  for (std::uint64_t t = 1; t <= 2; ++t) {
    adam_update({&theta, 1}, {&m, 1}, {&v, 1}, {&g, 1}, t, 0.01, AdamConfig{});
    EXPECT_LE(std::abs(theta - prev), 0.01 * (1.0 + 1e-12));
    prev = theta;
  }
}

TEST(Adam, ShapeMismatchThrows) {
  double theta[2] = {0, 0}, m[2] = {0, 0}, v[2] = {0, 0}, g[1] = {1};
  EXPECT_THROW(adam_update(theta, m, v, std::span<const double>(g, 1), 1, 0.01, AdamConfig{}),
               DimensionMismatch);
}

TEST(Project, UnitaryOnOrthogonalIsNoOp) {
  std::mt19937_64 rng(2);
  RnnParams p = testing::random_contractive_relu(4, 2, 2, 0.5, rng);
  p.w = testing::random_orthogonal(4, rng);
  const RnnParams q = project_params(p, {ConstraintKind::kUnitary});
  EXPECT_LE(max_abs_diff(q.w, p.w), 1e-12);
}

TEST(Project, ContractiveClipsTopSingularValue) {
  const Matrix u = Matrix{{0.6, -0.8}, {0.8, 0.6}};
  const Matrix w = u * Matrix{{1.3, 0}, {0, 0.4}};
  RnnParams p = RnnParams::zeros(2, 1, 1, Activation::kRelu);
  p.w = w;
  const SvdFactors f = svd(project_params(p, {ConstraintKind::kContractive, 0.999}).w);
  EXPECT_NEAR(f.s[0], 0.999, 1e-12);
  EXPECT_NEAR(f.s[1], 0.4, 1e-12);
}

TEST(Project, NoneIsBitIdentical) {
  std::mt19937_64 rng(3);
  RnnParams p = testing::random_contractive_relu(3, 1, 1, 0.5, rng);
  p.w = random_matrix(3, 3, rng);
  EXPECT_EQ(project_params(p, {ConstraintKind::kNone}), p);
}

TEST(Constraint, ParseNames) {
  EXPECT_EQ(parse_constraint("none"), ConstraintKind::kNone);
  EXPECT_EQ(parse_constraint("rnn"), ConstraintKind::kNone);
  EXPECT_EQ(parse_constraint("contractive"), ConstraintKind::kContractive);
  EXPECT_EQ(parse_constraint("unitary"), ConstraintKind::kUnitary);
  EXPECT_EQ(parse_constraint("urnn"), ConstraintKind::kUnitary);
  EXPECT_THROW(parse_constraint("lstm"), InvalidInput);
}

TEST(InitStudent, RespectsConstraint) {
  const RnnParams u = init_student(6, 2, 3, {ConstraintKind::kUnitary}, 5);
  EXPECT_LE(orthogonality_residual(u.w), 1e-12);
  const RnnParams c = init_student(6, 2, 3, {ConstraintKind::kContractive, 0.9}, 5);
  EXPECT_LE(spectral_norm(c.w), 0.9 + 1e-12);
  EXPECT_EQ(c.b, Vector(6, 0.0));
  EXPECT_EQ(init_student(6, 2, 3, {}, 5), init_student(6, 2, 3, {}, 5));
}

TEST(Train, ScalarLinearTeacherIsLearned) {
  RnnParams teacher = RnnParams::zeros(1, 1, 1, Activation::kIdentity);
  teacher.w(0, 0) = 0.5;
  teacher.f(0, 0) = 1.0;
  teacher.c(0, 0) = 1.0;
  const Dataset ds = dataset_from(teacher, 40, 10, 30, 4);
  RnnParams student = RnnParams::zeros(1, 1, 1, Activation::kIdentity);
  student.w(0, 0) = 0.1;
  student.f(0, 0) = 0.3;
  student.c(0, 0) = 0.7;
  TrainConfig cfg;
  cfg.max_epochs = 500;
  cfg.patience = 500;
  cfg.seed = 1;
  const TrainResult r = train(student, ds, cfg);
  EXPECT_LE(r.report.train_loss.back(), 1e-6);
  EXPECT_GT(evaluate(r.params, ds.test, 0.0).r2, 0.999);
}

TEST(Train, UnitaryResidualEveryEpoch) {
  SystemSpec spec;
  spec.seed = 1;
  const RnnParams teacher = generate_system(spec).params;
  const Dataset ds = generate_dataset(teacher, spec, 30, 10, 60, 20.0, 2);
  TrainConfig cfg;
  cfg.constraint.kind = ConstraintKind::kUnitary;
  cfg.max_epochs = 8;
  cfg.seed = 3;
  const TrainResult r = train(init_student(6, 2, 2, cfg.constraint, 3), ds, cfg);
  ASSERT_EQ(r.report.constraint_residual.size(), r.report.epochs_run);
  for (double v : r.report.constraint_residual) EXPECT_LE(v, 1e-8);
  EXPECT_LE(r.report.max_step_residual, 1e-12);
  EXPECT_LE(orthogonality_residual(r.params.w), 1e-12);
}

TEST(Train, ContractiveStaysInsideCap) {
  SystemSpec spec;
  spec.seed = 2;
  const RnnParams teacher = generate_system(spec).params;
  const Dataset ds = generate_dataset(teacher, spec, 30, 10, 60, 20.0, 2);
  TrainConfig cfg;
  cfg.constraint = {ConstraintKind::kContractive, 0.999};
  cfg.max_epochs = 5;
  const TrainResult r = train(init_student(4, 2, 2, cfg.constraint, 1), ds, cfg);
  for (double v : r.report.constraint_residual) EXPECT_LE(v, 0.999 + 1e-12);
}

TEST(Train, DeterministicReport) {
  SystemSpec spec;
  spec.seed = 3;
  const RnnParams teacher = generate_system(spec).params;
  const Dataset ds = generate_dataset(teacher, spec, 20, 10, 50, 20.0, 2);
  TrainConfig cfg;
  cfg.max_epochs = 4;
  cfg.seed = 11;
  const RnnParams init = init_student(4, 2, 2, cfg.constraint, 11);
  const TrainResult a = train(init, ds, cfg);
  const TrainResult b = train(init, ds, cfg);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(dump_report(to_json(a.report, false)), dump_report(to_json(b.report, false)));
  cfg.threads = 3;
  EXPECT_EQ(train(init, ds, cfg).params, a.params);
}

TEST(Train, BestValidationIsNonIncreasing) {
  SystemSpec spec;
  spec.seed = 4;
  const RnnParams teacher = generate_system(spec).params;
  const Dataset ds = generate_dataset(teacher, spec, 20, 5, 50, 20.0, 2);
  TrainConfig cfg;
  cfg.max_epochs = 10;
  const TrainResult r = train(init_student(3, 2, 2, cfg.constraint, 0), ds, cfg);
  double best = std::numeric_limits<double>::infinity();
  for (double v : r.report.validation_loss) best = std::min(best, v);
  EXPECT_EQ(best, r.report.best_validation_loss);
  EXPECT_EQ(r.report.validation_loss[r.report.best_epoch - 1], best);
}

TEST(Train, DivergenceIsReported) {
  RnnParams teacher = RnnParams::zeros(2, 1, 1, Activation::kIdentity);
  teacher.w = Matrix::identity(2) * 0.5;
  teacher.f = Matrix{{1}, {1}};
  teacher.c = Matrix{{1, 1}};
  const Dataset ds = dataset_from(teacher, 20, 2, 2000, 5);
  RnnParams student = teacher;
  student.w = Matrix::identity(2) * 1.5;
  TrainConfig cfg;
  cfg.max_epochs = 3;
  EXPECT_THROW(train(student, ds, cfg), DivergenceError);
}

TEST(Train, RejectsBadConfig) {
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
}

TEST(Evaluate, TeacherOnOwnData) {
  SystemSpec spec;
  spec.seed = 5;
  const RnnParams teacher = generate_system(spec).params;
  const Dataset clean =
      generate_dataset(teacher, spec, 0, 20, 200, std::numeric_limits<double>::infinity(), 6);
  EXPECT_EQ(evaluate(teacher, clean.test, 0.0).r2, 1.0);
  const Dataset noisy = generate_dataset(teacher, spec, 0, 300, 1000, 20.0, 6);
  const Evaluation ev = evaluate(teacher, noisy.test, noisy.noise_power);
  EXPECT_NEAR(ev.r2, 0.99, 0.01);
  EXPECT_NEAR(ev.optimal_r2, 0.99, 0.01);
}

TEST(Evaluate, ZeroPredictorOnZeroMeanTargets) {
  RnnParams zero = RnnParams::zeros(2, 1, 1, Activation::kRelu);
  std::mt19937_64 rng(7);
  std::vector<Sequence> test;
  for (int i = 0; i < 20; ++i) test.push_back({random_matrix(500, 1, rng), random_matrix(500, 1, rng)});
  EXPECT_NEAR(evaluate(zero, test, 0.0).r2, 0.0, 0.01);
}

}  // namespace
}  // namespace urnn
