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

// Input-output equivalence between contractive ReLU RNNs and orthogonal
// ("unitary") RNNs: the 2n-state embedding, sampled verification of
// equivalence, parameter counting, and numerical witnesses for the
// converse directions.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urnn/linalg.hpp"
#include "urnn/rnn.hpp"

namespace urnn {

// Result of embedding an n-state contractive ReLU RNN into a 2n-state RNN
// with orthogonal transition matrix.
struct EmbeddingRecord {
  RnnParams urnn;
  std::string source_hash;
  double rho = 0.0;             // ||W_source||
  double input_bound_m = 0.0;   // equivalence holds for ||x[k]||_2 <= this
  double state_bound_mh = 0.0;  // (||F|| M + ||b||) / (1 - rho)
};

// Hex digest of the parameter bytes (FNV-1a, 64 bit).
std::string params_digest(const RnnParams& params);

// Builds
//
//   W_u = [ W   W2 ]   F_u = [ F ]   b_u = [   b   ]   C_u = [ C  0 ]
//         [ W3  W4 ]         [ 0 ]         [ -M_h 1 ]
//
// with W3 = sqrt(I - W^T W) and [W2; W4] completing the first block column
// to an orthogonal matrix. The second half of the state then stays at zero
// for every input bounded by M, and the first half tracks the source.
//
// Throws UnsupportedActivation for non-relu sources and PreconditionError
// when ||W|| >= 1 - 1e-9, h_init != 0, or M is not positive.
EmbeddingRecord unitary_embedding(const RnnParams& source, double input_bound_m);

struct EquivalenceReport {
  std::size_t trials = 0;
  double max_abs_deviation = 0.0;
  std::vector<double> per_trial_deviations;  // random trials, in trial order
  std::vector<double> edge_probe_deviations;  // zeros, +M e1, -M e1, impulse
  bool passed = false;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  std::size_t t_len = 0;
  double input_bound_m = 0.0;
};

// The random input sequences used by verify_equivalence: trial i draws each
// x[k] uniformly from the radius-M l2 ball with a stream seeded by
// derive_seed(seed, i).
Matrix sample_ball_sequence(std::size_t input_dim, double bound_m, std::size_t t_len,
                            std::uint64_t seed, std::size_t trial);

// The four deterministic probes: all zeros, constant +M e1, constant -M e1,
// and an impulse M e1 at k = 0.
std::vector<Matrix> edge_probe_sequences(std::size_t input_dim, double bound_m,
                                         std::size_t t_len);

// Largest entry-wise |y_a - y_b| for one input sequence.
double output_deviation(const RnnParams& a, const RnnParams& b, const Matrix& x);

EquivalenceReport verify_equivalence(const RnnParams& a, const RnnParams& b, double input_bound_m,
                                     std::size_t trials, std::size_t t_len, double tol,
                                     std::uint64_t seed, std::size_t threads = 0);

// Per-step check of the embedding's internal state on the same inputs
// verify_equivalence draws: how far the second state block strays from zero
// and how far the first block strays from the source's state.
struct HiddenBlockReport {
  double max_second_block = 0.0;
  double max_first_block_gap = 0.0;
};

HiddenBlockReport check_hidden_blocks(const RnnParams& source, const EmbeddingRecord& embedding,
                                      std::size_t trials, std::size_t t_len, std::uint64_t seed);

enum class DofKind { kRnn, kUrnnDouble };

// n^2 + (p+m) n for a general RNN; n(2n-1) + 2n(p+m) for a 2n-state URNN.
std::uint64_t dof_count(std::uint64_t n, std::uint64_t m, std::uint64_t p, DofKind kind);

// Separable ReLU system W = w_c I, F = I, b = 0, C = I with m = p = n.
RnnParams converse_relu_witness(std::size_t n, double w_c);

// Probe inputs shared by the one-state search and its 2-state contrast.
std::vector<Matrix> one_state_probe_set();

struct OneStateGap {
  double gap = 0.0;  // min over the grid of the max output deviation
  double best_w = 0.0, best_f = 0.0, best_b = 0.0, best_c = 0.0;
  std::size_t candidates = 0;
};

// Exhaustive search over 1-state orthogonal ReLU RNNs (w in {+1, -1};
// f, b, c on a uniform grid over [-3, 3]) for the one closest to a scalar
// witness on one_state_probe_set().
OneStateGap one_state_urnn_gap(const RnnParams& witness, std::size_t grid_resolution);

// max over probes of output_deviation(a, b, probe).
double probe_set_deviation(const RnnParams& a, const RnnParams& b,
                           std::span<const Matrix> probes);

struct MismatchReport {
  std::vector<double> x_grid;
  std::vector<std::array<double, 2>> g_c_values;
  std::vector<std::array<double, 2>> g_u_values;
  std::vector<bool> controllable_observable_at;
  // Empty when no probe is both controllable and observable.
  std::optional<double> max_gap;
};

// Scalar sigmoid reference h = sig(w_c h + x), y = h.
RnnParams sigmoid_reference(double w_c);

// Scalar sigmoid URNN with w_u = +/-1 and f_u, b_u, c_u uniform on [-2, 2],
// drawn from derive_seed(seed, index).
RnnParams random_sigmoid_candidate(std::uint64_t seed, std::size_t index);

// Compares operating-point invariants of the sigmoid reference and an
// orthogonal sigmoid candidate with scalar input/output. At each x* the
// first component is the linearization's transition gain (its determinant,
// i.e. eigenvalue product, for multi-state candidates) and the second is the
// steady-state output.
MismatchReport sigmoid_mismatch_witness(double w_c, const RnnParams& candidate,
                                        std::span<const double> x_grid);

}  // namespace urnn
