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
#include <random>

#include "test_util.hpp"
#include "urnn/equivalence.hpp"
#include "urnn/error.hpp"

namespace urnn {
namespace {

using testing::random_contractive_relu;
using testing::random_matrix;

RnnParams scalar_relu(double w, double f, double b, double c) {
  RnnParams p = RnnParams::zeros(1, 1, 1, Activation::kRelu);
  p.w(0, 0) = w;
  p.f(0, 0) = f;
  p.b[0] = b;
  p.c(0, 0) = c;
  return p;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

TEST(Embedding, ScalarZeroWeightHandConstruction) {
  const EmbeddingRecord rec = unitary_embedding(scalar_relu(0, 1, 0, 1), 1.0);
  EXPECT_DOUBLE_EQ(rec.state_bound_mh, 1.0);
  EXPECT_EQ(rec.urnn.w, (Matrix{{0, 1}, {1, 0}}));
  EXPECT_EQ(rec.urnn.b, (Vector{0, -1}));
  EXPECT_EQ(rec.urnn.f, (Matrix{{1}, {0}}));
  EXPECT_EQ(rec.urnn.c, (Matrix{{1, 0}}));
  EXPECT_EQ(rec.urnn.activation, Activation::kRelu);
}

TEST(Embedding, ScalarPointSix) {
  const EmbeddingRecord rec = unitary_embedding(scalar_relu(0.6, 1, 0.5, 1), 1.0);
  EXPECT_NEAR(rec.urnn.w(1, 0), 0.8, 1e-15);
  EXPECT_NEAR(rec.urnn.w(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(rec.urnn.w(0, 1), 0.8, 1e-15);
  EXPECT_NEAR(rec.urnn.w(1, 1), -0.6, 1e-15);
  EXPECT_LE(orthogonality_residual(rec.urnn.w), 1e-15);
  EXPECT_NEAR(rec.state_bound_mh, (1.0 + 0.5) / 0.4, 1e-12);
}

TEST(Embedding, RandomSourcesAreOrthogonalAndEquivalent) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::size_t> dim(1, 8), io(1, 3);
  std::uniform_real_distribution<double> rho(0.05, 0.95);
  for (int s = 0; s < 10; ++s) {
    const RnnParams src = random_contractive_relu(dim(rng), io(rng), io(rng), rho(rng), rng);
    const EmbeddingRecord rec = unitary_embedding(src, 10.0);
    EXPECT_EQ(rec.urnn.state_dim(), 2 * src.state_dim());
    EXPECT_LE(orthogonality_residual(rec.urnn.w), 1e-12);
    const EquivalenceReport rep = verify_equivalence(src, rec.urnn, 10.0, 5, 200, 1e-8, s, 1);
    EXPECT_TRUE(rep.passed) << rep.max_abs_deviation;
    const HiddenBlockReport hb = check_hidden_blocks(src, rec, 5, 200, s);
    EXPECT_LE(hb.max_second_block, 1e-12);
    EXPECT_LE(hb.max_first_block_gap, 1e-9);
  }
}

TEST(Embedding, Preconditions) {
  RnnParams sig = scalar_relu(0.5, 1, 0, 1);
  sig.activation = Activation::kSigmoid;
  EXPECT_THROW(unitary_embedding(sig, 1.0), UnsupportedActivation);
  EXPECT_THROW(unitary_embedding(scalar_relu(1.0, 1, 0, 1), 1.0), PreconditionError);
  EXPECT_THROW(unitary_embedding(scalar_relu(0.5, 1, 0, 1), 0.0), PreconditionError);
  RnnParams warm = scalar_relu(0.5, 1, 0, 1);
  warm.h_init[0] = 1.0;
  EXPECT_THROW(unitary_embedding(warm, 1.0), PreconditionError);
}

TEST(Embedding, DigestTracksParameters) {
  const RnnParams a = scalar_relu(0.5, 1, 0, 1);
  RnnParams b = a;
  EXPECT_EQ(params_digest(a), params_digest(b));
  b.c(0, 0) = 1.0000001;
  EXPECT_NE(params_digest(a), params_digest(b));
}

TEST(Verify, SelfComparisonIsExact) {
  std::mt19937_64 rng(32);
  const RnnParams p = random_contractive_relu(3, 2, 2, 0.8, rng);
  const EquivalenceReport rep = verify_equivalence(p, p, 10.0, 10, 100, 0.0, 1, 1);
  EXPECT_EQ(rep.max_abs_deviation, 0.0);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.per_trial_deviations.size(), 10u);
  EXPECT_EQ(rep.edge_probe_deviations.size(), 4u);
}

TEST(Verify, PaperScaleLengthPasses) {
  std::mt19937_64 rng(33);
  const RnnParams src = random_contractive_relu(4, 2, 2, 0.9, rng);
  const EmbeddingRecord rec = unitary_embedding(src, 10.0);
  EXPECT_TRUE(verify_equivalence(src, rec.urnn, 10.0, 50, 1000, 1e-8, 3, 1).passed);
}

TEST(Verify, PerturbedOutputFails) {
  std::mt19937_64 rng(34);
  const RnnParams a = random_contractive_relu(3, 2, 2, 0.8, rng);
  RnnParams b = a;
  b.c = b.c * 1.01;
  const EquivalenceReport rep = verify_equivalence(a, b, 10.0, 10, 100, 1e-8, 1, 1);
  EXPECT_FALSE(rep.passed);
  EXPECT_GT(rep.max_abs_deviation, 1e-3);
}

TEST(Verify, IndependentOfThreadCount) {
  std::mt19937_64 rng(35);
  const RnnParams a = random_contractive_relu(3, 2, 2, 0.8, rng);
  RnnParams b = a;
  b.b[0] += 1e-3;
  const EquivalenceReport r1 = verify_equivalence(a, b, 5.0, 12, 80, 1e-8, 9, 1);
  const EquivalenceReport r4 = verify_equivalence(a, b, 5.0, 12, 80, 1e-8, 9, 4);
  EXPECT_EQ(r1.per_trial_deviations, r4.per_trial_deviations);
}

TEST(Verify, BallSamplesRespectBound) {
  for (std::size_t trial = 0; trial < 5; ++trial) {
    const Matrix x = sample_ball_sequence(3, 2.5, 100, 7, trial);
    for (std::size_t k = 0; k < x.rows(); ++k) EXPECT_LE(norm2(x.row(k)), 2.5);
  }
}

TEST(Dof, FormulaValues) {
  EXPECT_EQ(dof_count(4, 2, 2, DofKind::kRnn), 32u);
  EXPECT_EQ(dof_count(4, 2, 2, DofKind::kUrnnDouble), 60u);
  EXPECT_EQ(dof_count(1, 1, 1, DofKind::kRnn), 3u);
  EXPECT_EQ(dof_count(1, 1, 1, DofKind::kUrnnDouble), 5u);
  for (std::uint64_t n = 1; n <= 64; ++n) {
    for (std::uint64_t mp = 0; mp <= 6; ++mp) {
      EXPECT_LT(dof_count(n, mp, mp, DofKind::kUrnnDouble),
                2 * dof_count(n, mp, mp, DofKind::kRnn));
    }
  }
}

TEST(ReluWitness, ScalarForm) {
  const RnnParams w = converse_relu_witness(1, 0.9);
  EXPECT_EQ(w, scalar_relu(0.9, 1, 0, 1));
  EXPECT_THROW(converse_relu_witness(1, 1.5), InvalidInput);
}

TEST(ReluWitness, BlockDiagonalChannelsAreSeparate) {
  const RnnParams w = converse_relu_witness(3, 0.9);
  Matrix x(30, 3);
  for (std::size_t k = 0; k < 30; ++k) x(k, 1) = 1.0 + std::sin(static_cast<double>(k));
  const Matrix y = rnn_map(w, x);
  for (std::size_t k = 0; k < 30; ++k) {
    EXPECT_EQ(y(k, 0), 0.0);
    EXPECT_EQ(y(k, 2), 0.0);
  }
  EXPECT_GT(y.max_abs(), 0.0);
}

TEST(ReluWitness, ActivePhaseIsLinear) {
  const RnnParams w = converse_relu_witness(1, 0.9);
  const Matrix y = rnn_map(w, Matrix(100, 1, 10.0));
  double h = 0.0;
  for (std::size_t k = 0; k < 100; ++k) {
    h = 0.9 * h + 10.0;
    EXPECT_DOUBLE_EQ(y(k, 0), h);
  }
}

TEST(OneStateGap, CoarseGridGapDominatesEmbedding) {
  const RnnParams w = converse_relu_witness(1, 0.9);
  const OneStateGap gap = one_state_urnn_gap(w, 13);
  const EmbeddingRecord rec = unitary_embedding(w, 10.0);
  const std::vector<Matrix> probes = one_state_probe_set();
  const double emb = probe_set_deviation(w, rec.urnn, probes);
  EXPECT_LE(emb, 1e-8);
  EXPECT_GE(gap.gap, 0.01);
  EXPECT_GE(gap.gap, 100.0 * emb);
  EXPECT_EQ(gap.candidates, 2u * 13 * 13 * 13);
  const RnnParams best = scalar_relu(gap.best_w, gap.best_f, gap.best_b, gap.best_c);
  EXPECT_NEAR(probe_set_deviation(w, best, probes), gap.gap, 1e-12);
}

TEST(OneStateGap, IntegratorDeviationGrowsWithLength) {
  const RnnParams w = converse_relu_witness(1, 0.9);
  const RnnParams integrator = scalar_relu(1.0, 1.0, 0.0, 1.0);
  double prev = 0.0;
  for (std::size_t t : {10, 50, 100}) {
    const Matrix x(t, 1, 10.0);
    const double d = (rnn_map(w, x) - rnn_map(integrator, x)).max_abs();
    EXPECT_GT(d, prev);
    prev = d;
  }
}

TEST(OneStateGap, RejectsNonScalarWitness) {
  EXPECT_THROW(one_state_urnn_gap(converse_relu_witness(2, 0.9), 5), InvalidInput);
}

TEST(SigmoidWitness, DefaultCandidateMismatch) {
  RnnParams cand = RnnParams::zeros(1, 1, 1, Activation::kSigmoid);
  cand.w(0, 0) = 1.0;
  cand.f(0, 0) = 1.0;
  cand.c(0, 0) = 1.0;
  const std::vector<double> grid{-1, -0.5, 0, 0.5, 1};
  const MismatchReport rep = sigmoid_mismatch_witness(0.9, cand, grid);
  ASSERT_EQ(rep.g_c_values.size(), 5u);
  ASSERT_TRUE(rep.max_gap.has_value());
  EXPECT_GT(*rep.max_gap, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double h = rep.g_c_values[i][1];
    EXPECT_NEAR(sigmoid(0.9 * h + grid[i]), h, 1e-12);
    const double s = sigmoid(0.9 * h + grid[i]);
    EXPECT_NEAR(rep.g_c_values[i][0], 0.9 * s * (1 - s), 1e-12);
  }
}

TEST(SigmoidWitness, UnobservableCandidateHasNoAdmissibleProbes) {
  RnnParams cand = RnnParams::zeros(1, 1, 1, Activation::kSigmoid);
  cand.w(0, 0) = -1.0;
  cand.f(0, 0) = 1.0;
  const std::vector<double> grid{-1, 0, 1};
  const MismatchReport rep = sigmoid_mismatch_witness(0.9, cand, grid);
  for (bool ok : rep.controllable_observable_at) EXPECT_FALSE(ok);
  EXPECT_FALSE(rep.max_gap.has_value());
}

TEST(SigmoidWitness, FixedPointMapMatchesImplicitDerivative) {
  const RnnParams ref = sigmoid_reference(0.9);
  for (double x : {-1.0, 0.0, 0.7}) {
    const double d = 1e-6;
    const double hp = fixed_point(ref, Vector{x + d})[0];
    const double hm = fixed_point(ref, Vector{x - d})[0];
    const double h = fixed_point(ref, Vector{x})[0];
    const double s = sigmoid(0.9 * h + x);
    const double slope = s * (1 - s) / (1 - 0.9 * s * (1 - s));
    EXPECT_NEAR((hp - hm) / (2 * d), slope, 1e-4);
  }
}

TEST(SigmoidWitness, RandomCandidatesAllMismatch) {
  const std::vector<double> grid{-1, -0.5, 0, 0.5, 1};
  for (std::size_t i = 0; i < 100; ++i) {
    const MismatchReport rep =
        sigmoid_mismatch_witness(0.9, random_sigmoid_candidate(0, i), grid);
    ASSERT_TRUE(rep.max_gap.has_value());
    EXPECT_GT(*rep.max_gap, 1e-3);
  }
}

TEST(SigmoidWitness, Preconditions) {
  RnnParams cand = RnnParams::zeros(1, 1, 1, Activation::kSigmoid);
  cand.w(0, 0) = 0.5;
  const std::vector<double> grid{0};
  EXPECT_THROW(sigmoid_mismatch_witness(0.9, cand, grid), PreconditionError);
  cand.w(0, 0) = 1.0;
  EXPECT_THROW(sigmoid_mismatch_witness(1.5, cand, grid), InvalidInput);
  cand.activation = Activation::kRelu;
  EXPECT_THROW(sigmoid_mismatch_witness(0.9, cand, grid), UnsupportedActivation);
}

}  // namespace
}  // namespace urnn
