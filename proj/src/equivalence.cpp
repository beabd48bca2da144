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

#include "urnn/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <random>
#include <string>

#include "urnn/error.hpp"
#include "urnn/parallel.hpp"

namespace urnn {

namespace {

void hash_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
}

void hash_doubles(std::uint64_t& h, std::span<const double> v) {
  const std::uint64_t len = v.size();
  hash_bytes(h, &len, sizeof(len));
  hash_bytes(h, v.data(), v.size_bytes());
}

double determinant(Matrix a) {
  const std::size_t n = a.rows();
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    }
    if (a(piv, col) == 0.0) return 0.0;
    if (piv != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a(piv, k), a(col, k));
      det = -det;
    }
    det *= a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a(r, col) / a(col, col);
      for (std::size_t k = col; k < n; ++k) a(r, k) -= factor * a(col, k);
    }
  }
  return det;
}

Matrix constant_sequence(std::size_t t_len, std::size_t input_dim, double value) {
  Matrix x(t_len, input_dim);
  for (std::size_t k = 0; k < t_len; ++k) x(k, 0) = value;
  return x;
}

void check_io_dims(const RnnParams& a, const RnnParams& b) {
  a.validate();
  b.validate();
  if (a.input_dim() != b.input_dim() || a.output_dim() != b.output_dim()) {
    throw DimensionMismatch("networks differ in input/output dimensions");
  }
}

// Deviation of the scalar orthogonal candidate (w, f, b, c) from precomputed
// reference outputs; stops early once `abort_above` is exceeded.
double scalar_candidate_deviation(double w, double f, double b, double c,
                                  std::span<const Matrix> probes,
                                  std::span<const Matrix> reference, double abort_above) {
  double worst = 0.0;
  for (std::size_t s = 0; s < probes.size(); ++s) {
    const Matrix& x = probes[s];
    const Matrix& y = reference[s];
    double h = 0.0;
    for (std::size_t k = 0; k < x.rows(); ++k) {
      const double z = w * h + f * x(k, 0) + b;
      h = z > 0.0 ? z : 0.0;
      worst = std::max(worst, std::abs(c * h - y(k, 0)));
      if (worst > abort_above) return worst;
    }
  }
  return worst;
}

}  // namespace

std::string params_digest(const RnnParams& params) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  const std::uint64_t dims[3] = {params.state_dim(), params.input_dim(), params.output_dim()};
  hash_bytes(h, dims, sizeof(dims));
  hash_doubles(h, params.w.data());
  hash_doubles(h, params.f.data());
  hash_doubles(h, params.b);
  hash_doubles(h, params.c.data());
  hash_doubles(h, params.h_init);
  const auto act = to_string(params.activation);
  hash_bytes(h, act.data(), act.size());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Embedding

EmbeddingRecord unitary_embedding(const RnnParams& source, double input_bound_m) {
  source.validate();
  if (source.activation != Activation::kRelu) {
    throw UnsupportedActivation("unitary_embedding: source activation is " +
                                std::string(to_string(source.activation)) +
                                " (unsupported activation; only relu networks admit the embedding)");
  }
  if (!(input_bound_m > 0.0) || !std::isfinite(input_bound_m)) {
    throw PreconditionError("unitary_embedding: input bound M must be positive");
  }
  if (std::any_of(source.h_init.begin(), source.h_init.end(), [](double v) { return v != 0.0; })) {
    throw PreconditionError("unitary_embedding: source h_init must be zero");
  }
  const std::size_t n = source.state_dim();
  const std::size_t m = source.input_dim();
  const std::size_t p = source.output_dim();

  const double rho = spectral_norm(source.w);
  if (rho >= 1.0 - 1e-9) {
    throw PreconditionError("unitary_embedding: source is not contractive (||W|| = " +
                            std::to_string(rho) + ")");
  }
  const double mh = (spectral_norm(source.f) * input_bound_m + norm2(source.b)) / (1.0 - rho);

  const Matrix w3 = symmetric_psd_sqrt(Matrix::identity(n) - source.w.transpose() * source.w);
  const Matrix first_cols = vconcat(source.w, w3);
  const Matrix completion = orthonormal_complete(first_cols);

  EmbeddingRecord rec;
  rec.urnn.activation = Activation::kRelu;
  rec.urnn.w = hconcat(first_cols, completion);
  rec.urnn.f = vconcat(source.f, Matrix(n, m));
  rec.urnn.b.assign(2 * n, -mh);
  std::copy(source.b.begin(), source.b.end(), rec.urnn.b.begin());
  rec.urnn.c = hconcat(source.c, Matrix(p, n));
  rec.urnn.h_init.assign(2 * n, 0.0);
  rec.source_hash = params_digest(source);
  rec.rho = rho;
  rec.input_bound_m = input_bound_m;
  rec.state_bound_mh = mh;
  return rec;
}

// ---------------------------------------------------------------------------
// Verification

Matrix sample_ball_sequence(std::size_t input_dim, double bound_m, std::size_t t_len,
                            std::uint64_t seed, std::size_t trial) {
  std::mt19937_64 rng(derive_seed(seed, trial));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix x(t_len, input_dim);
  Vector dir(input_dim);
  for (std::size_t k = 0; k < t_len; ++k) {
    double nrm = 0.0;
    do {
      for (double& d : dir) d = gauss(rng);
      nrm = norm2(dir);
    } while (nrm == 0.0);
    const double radius = bound_m * std::pow(unif(rng), 1.0 / static_cast<double>(input_dim));
    for (std::size_t j = 0; j < input_dim; ++j) x(k, j) = radius * dir[j] / nrm;
  }
  return x;
}

std::vector<Matrix> edge_probe_sequences(std::size_t input_dim, double bound_m,
                                         std::size_t t_len) {
  std::vector<Matrix> probes;
  probes.emplace_back(t_len, input_dim);
  probes.push_back(constant_sequence(t_len, input_dim, bound_m));
  probes.push_back(constant_sequence(t_len, input_dim, -bound_m));
  Matrix impulse(t_len, input_dim);
  impulse(0, 0) = bound_m;
  probes.push_back(std::move(impulse));
  return probes;
}

double output_deviation(const RnnParams& a, const RnnParams& b, const Matrix& x) {
  return max_abs_diff(rnn_map(a, x), rnn_map(b, x));
}

EquivalenceReport verify_equivalence(const RnnParams& a, const RnnParams& b, double input_bound_m,
                                     std::size_t trials, std::size_t t_len, double tol,
                                     std::uint64_t seed, std::size_t threads) {
  check_io_dims(a, b);
  if (t_len == 0) throw InvalidInput("verify_equivalence: T must be positive");
  if (!(input_bound_m > 0.0)) throw InvalidInput("verify_equivalence: M must be positive");
  if (!(tol >= 0.0)) throw InvalidInput("verify_equivalence: tolerance must be non-negative");
  const std::size_t m = a.input_dim();

  EquivalenceReport rep;
  rep.trials = trials;
  rep.tolerance = tol;
  rep.seed = seed;
  rep.t_len = t_len;
  rep.input_bound_m = input_bound_m;
  rep.per_trial_deviations.assign(trials, 0.0);
  parallel_for(trials, threads == 0 ? default_thread_count() : threads, [&](std::size_t i) {
    const Matrix x = sample_ball_sequence(m, input_bound_m, t_len, seed, i);
    rep.per_trial_deviations[i] = output_deviation(a, b, x);
  });
  for (const Matrix& x : edge_probe_sequences(m, input_bound_m, t_len)) {
    rep.edge_probe_deviations.push_back(output_deviation(a, b, x));
  }
  for (double d : rep.per_trial_deviations) rep.max_abs_deviation = std::max(rep.max_abs_deviation, d);
  for (double d : rep.edge_probe_deviations) rep.max_abs_deviation = std::max(rep.max_abs_deviation, d);
  rep.passed = rep.max_abs_deviation <= tol;
  return rep;
}

HiddenBlockReport check_hidden_blocks(const RnnParams& source, const EmbeddingRecord& embedding,
                                      std::size_t trials, std::size_t t_len, std::uint64_t seed) {
  const std::size_t n = source.state_dim();
  if (embedding.urnn.state_dim() != 2 * n) {
    throw DimensionMismatch("check_hidden_blocks: embedding is not 2n-dimensional");
  }
  std::vector<Matrix> inputs;
  for (std::size_t i = 0; i < trials; ++i) {
    inputs.push_back(
        sample_ball_sequence(source.input_dim(), embedding.input_bound_m, t_len, seed, i));
  }
  for (Matrix& x : edge_probe_sequences(source.input_dim(), embedding.input_bound_m, t_len)) {
    inputs.push_back(std::move(x));
  }
  HiddenBlockReport rep;
  for (const Matrix& x : inputs) {
    const Trajectory src = forward(source, x);
    const Trajectory emb = forward(embedding.urnn, x);
    for (std::size_t k = 0; k < t_len; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        rep.max_first_block_gap =
            std::max(rep.max_first_block_gap, std::abs(emb.h(k, i) - src.h(k, i)));
        rep.max_second_block = std::max(rep.max_second_block, std::abs(emb.h(k, n + i)));
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Degrees of freedom

std::uint64_t dof_count(std::uint64_t n, std::uint64_t m, std::uint64_t p, DofKind kind) {
  if (n == 0) throw InvalidInput("dof_count: n must be positive");
  switch (kind) {
    case DofKind::kRnn:
      return n * n + (p + m) * n;
    case DofKind::kUrnnDouble:
      return n * (2 * n - 1) + 2 * n * (p + m);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// ReLU converse

RnnParams converse_relu_witness(std::size_t n, double w_c) {
  if (n == 0) throw InvalidInput("converse_relu_witness: n must be positive");
  if (!(w_c > 0.0 && w_c < 1.0)) {
    throw InvalidInput("converse_relu_witness: w_c must lie in (0, 1)");
  }
  RnnParams p = RnnParams::zeros(n, n, n, Activation::kRelu);
  p.w = Matrix::identity(n) * w_c;
  p.f = Matrix::identity(n);
  p.c = Matrix::identity(n);
  return p;
}

std::vector<Matrix> one_state_probe_set() {
  constexpr std::size_t kLen = 100;
  constexpr double kBound = 10.0;
  std::vector<Matrix> probes;
  // Large constant inputs keep both systems in the active phase; these are
  // the most discriminating probes and come first so the search can prune.
  probes.push_back(constant_sequence(kLen, 1, kBound));
  probes.push_back(constant_sequence(kLen, 1, 1.0));
  probes.push_back(constant_sequence(kLen, 1, -kBound));
  Matrix impulse(kLen, 1);
  impulse(0, 0) = kBound;
  probes.push_back(std::move(impulse));
  std::mt19937_64 rng(20190501);
  std::uniform_real_distribution<double> unif(-kBound, kBound);
  for (int s = 0; s < 4; ++s) {
    Matrix x(kLen, 1);
    for (std::size_t k = 0; k < kLen; ++k) x(k, 0) = unif(rng);
    probes.push_back(std::move(x));
  }
  return probes;
}

double probe_set_deviation(const RnnParams& a, const RnnParams& b,
                           std::span<const Matrix> probes) {
  check_io_dims(a, b);
  double worst = 0.0;
  for (const Matrix& x : probes) worst = std::max(worst, output_deviation(a, b, x));
  return worst;
}

OneStateGap one_state_urnn_gap(const RnnParams& witness, std::size_t grid_resolution) {
  witness.validate();
  if (witness.state_dim() != 1 || witness.input_dim() != 1 || witness.output_dim() != 1) {
    throw InvalidInput("one_state_urnn_gap: witness must be a scalar system");
  }
  if (grid_resolution < 2) throw InvalidInput("one_state_urnn_gap: grid resolution must be >= 2");
  const std::vector<Matrix> probes = one_state_probe_set();
  std::vector<Matrix> reference;
  reference.reserve(probes.size());
  for (const Matrix& x : probes) reference.push_back(rnn_map(witness, x));

  std::vector<double> grid(grid_resolution);
  for (std::size_t i = 0; i < grid_resolution; ++i) {
    grid[i] = -3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(grid_resolution - 1);
  }
  OneStateGap best;
  best.gap = std::numeric_limits<double>::infinity();
  for (const double w : {1.0, -1.0}) {
    for (const double f : grid) {
      for (const double b : grid) {
        for (const double c : grid) {
          ++best.candidates;
          const double dev = scalar_candidate_deviation(w, f, b, c, probes, reference, best.gap);
          if (dev < best.gap) {
            best.gap = dev;
            best.best_w = w;
            best.best_f = f;
            best.best_b = b;
            best.best_c = c;
          }
        }
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Sigmoid converse

RnnParams sigmoid_reference(double w_c) {
  if (!(w_c > 0.0 && w_c < 1.0)) throw InvalidInput("sigmoid reference: w_c must lie in (0, 1)");
  RnnParams p = RnnParams::zeros(1, 1, 1, Activation::kSigmoid);
  p.w(0, 0) = w_c;
  p.f(0, 0) = 1.0;
  p.c(0, 0) = 1.0;
  return p;
}

RnnParams random_sigmoid_candidate(std::uint64_t seed, std::size_t index) {
  std::mt19937_64 rng(derive_seed(seed, index));
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  RnnParams p = RnnParams::zeros(1, 1, 1, Activation::kSigmoid);
  p.w(0, 0) = (rng() & 1u) ? 1.0 : -1.0;
  p.f(0, 0) = unif(rng);
  p.b[0] = unif(rng);
  p.c(0, 0) = unif(rng);
  return p;
}

MismatchReport sigmoid_mismatch_witness(double w_c, const RnnParams& candidate,
                                        std::span<const double> x_grid) {
  const RnnParams reference = sigmoid_reference(w_c);
  candidate.validate();
  if (candidate.activation != Activation::kSigmoid) {
    throw UnsupportedActivation("sigmoid_mismatch_witness: candidate must use sigmoid");
  }
  if (candidate.input_dim() != 1 || candidate.output_dim() != 1) {
    throw DimensionMismatch("sigmoid_mismatch_witness: candidate needs scalar input and output");
  }
  if (!certify(candidate.w).is_unitary) {
    throw PreconditionError("sigmoid_mismatch_witness: candidate transition is not orthogonal");
  }

  MismatchReport rep;
  rep.x_grid.assign(x_grid.begin(), x_grid.end());
  for (const double x : x_grid) {
    const double xs[1] = {x};
    const LinearSystem ref_lin = linearize(reference, xs);
    const LinearSystem cand_lin = linearize(candidate, xs);
    rep.g_c_values.push_back({ref_lin.a(0, 0), ref_lin.h_star[0]});
    const double gain = candidate.state_dim() == 1 ? cand_lin.a(0, 0) : determinant(cand_lin.a);
    rep.g_u_values.push_back({gain, cand_lin.y_star[0]});
    const Reachability r = ctrb_obsv(cand_lin);
    rep.controllable_observable_at.push_back(r.controllable && r.observable);
  }
  for (std::size_t i = 0; i < rep.x_grid.size(); ++i) {
    if (!rep.controllable_observable_at[i]) continue;
    const double gap = std::max(std::abs(rep.g_c_values[i][0] - rep.g_u_values[i][0]),
                                std::abs(rep.g_c_values[i][1] - rep.g_u_values[i][1]));
    rep.max_gap = std::max(rep.max_gap.value_or(0.0), gap);
  }
  return rep;
}

}  // namespace urnn
