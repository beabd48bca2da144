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

// Shared fixtures for the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "urnn/linalg.hpp"
#include "urnn/rnn.hpp"

namespace urnn::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                            double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = gauss(rng);
  return m;
}

inline Vector random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Vector v(n);
  for (double& x : v) x = gauss(rng);
  return v;
}

inline Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
  return polar_orthogonal_projection(random_matrix(n, n, rng));
}

// Relu system with ||W|| = rho and standard normal F, b, C.
inline RnnParams random_contractive_relu(std::size_t n, std::size_t m, std::size_t p, double rho,
                                         std::mt19937_64& rng) {
  RnnParams params = RnnParams::zeros(n, m, p, Activation::kRelu);
  const Matrix w = random_matrix(n, n, rng);
  params.w = w * (rho / spectral_norm(w));
  params.f = random_matrix(n, m, rng);
  params.b = random_vector(n, rng);
  params.c = random_matrix(p, n, rng);
  return params;
}

inline Sequence random_sequence(const RnnParams& target, std::size_t t_len, std::mt19937_64& rng) {
  Sequence s;
  s.x = random_matrix(t_len, target.input_dim(), rng);
  s.y = rnn_map(target, s.x);
  return s;
}

// Largest per-entry relative error between BPTT and central differences of
// batch_loss with step h over W, F, b, C. Entries where both magnitudes are
// below `floor` are compared in absolute terms.
inline double gradient_check(const RnnParams& params, const std::vector<Sequence>& batch,
                             double h = 1e-6, double floor = 1e-8) {
  const RnnGradients g = bptt_gradients(params, batch);
  double worst = 0.0;
  auto check = [&](auto&& entry, double analytic) {
    RnnParams p = params;
    double& v = entry(p);
    const double orig = v;
    v = orig + h;
    const double lp = batch_loss(p, batch);
    v = orig - h;
    const double lm = batch_loss(p, batch);
    const double fd = (lp - lm) / (2.0 * h);
    const double scale = std::max({std::abs(fd), std::abs(analytic), floor});
    worst = std::max(worst, std::abs(fd - analytic) / scale);
  };
  const std::size_t n = params.state_dim(), m = params.input_dim(), q = params.output_dim();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      check([i, j](RnnParams& p) -> double& { return p.w(i, j); }, g.w(i, j));
    }
    for (std::size_t j = 0; j < m; ++j) {
      check([i, j](RnnParams& p) -> double& { return p.f(i, j); }, g.f(i, j));
    }
    check([i](RnnParams& p) -> double& { return p.b[i]; }, g.b[i]);
  }
  for (std::size_t r = 0; r < q; ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      check([r, j](RnnParams& p) -> double& { return p.c(r, j); }, g.c(r, j));
    }
  }
  return worst;
}

// Best orthogonal 2x2 approximation found by scanning rotations and
// reflections at `angles` evenly spaced angles.
inline Matrix angle_grid_polar(const Matrix& m, std::size_t angles) {
  Matrix best;
  double best_dist = INFINITY;
  for (std::size_t k = 0; k < angles; ++k) {
    const double t = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(angles);
    const double c = std::cos(t), s = std::sin(t);
    for (const Matrix& q : {Matrix{{c, -s}, {s, c}}, Matrix{{c, s}, {s, -c}}}) {
      const double d = (q - m).frobenius();
      if (d < best_dist) {
        best_dist = d;
        best = q;
      }
    }
  }
  return best;
}

}  // namespace urnn::testing
