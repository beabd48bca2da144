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

// Elman-style recurrent network
//
//   h[k] = act(W h[k-1] + F x[k] + b),   y[k] = C h[k],   h[-1] = h_init
//
// together with its gradients, fixed points, linearizations and the linear
// system theory (transfer functions, rank tests) used to reason about
// input-output equivalence.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "urnn/linalg.hpp"

namespace urnn {

enum class Activation { kRelu, kSigmoid, kIdentity };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

double activate(Activation a, double z);
// ReLU derivative at 0 is taken to be 0.
double activate_derivative(Activation a, double z);
// Global Lipschitz constant: 1 for relu/identity, 1/4 for sigmoid.
double lipschitz_constant(Activation a);

struct RnnParams {
  Matrix w;  // n x n
  Matrix f;  // n x m
  Vector b;  // n
  Matrix c;  // p x n
  Vector h_init;  // n
  Activation activation = Activation::kRelu;

  static RnnParams zeros(std::size_t n, std::size_t m, std::size_t p, Activation act);

  std::size_t state_dim() const { return w.rows(); }
  std::size_t input_dim() const { return f.cols(); }
  std::size_t output_dim() const { return c.rows(); }

  // Throws DimensionMismatch / InvalidInput when shapes disagree or any
  // entry is non-finite.
  void validate() const;

  friend bool operator==(const RnnParams&, const RnnParams&) = default;
};

// One input sequence (T x m) with optional targets (T x p; empty if absent).
struct Sequence {
  Matrix x;
  Matrix y;

  bool has_targets() const { return !y.empty(); }
  std::size_t length() const { return x.rows(); }

  friend bool operator==(const Sequence&, const Sequence&) = default;
};

struct Trajectory {
  Matrix y;  // T x p
  Matrix h;  // T x n
};

// Throws OverflowError naming the first time step with a non-finite state.
Trajectory forward(const RnnParams& params, const Matrix& x);
Matrix rnn_map(const RnnParams& params, const Matrix& x);

// Same shapes as RnnParams; used for gradients and optimizer moments.
struct RnnGradients {
  Matrix w, f, c;
  Vector b, h_init;

  static RnnGradients zeros_like(const RnnParams& p);
  RnnGradients& operator+=(const RnnGradients& o);
  RnnGradients& operator*=(double s);
  double max_abs() const;

  friend bool operator==(const RnnGradients&, const RnnGradients&) = default;
};

// Gradient of the mean-squared error of a single sequence (mean over time
// steps and output channels) by backpropagation through time.
RnnGradients sequence_gradients(const RnnParams& params, const Sequence& seq);

// Mean over the batch of sequence_gradients(). Per-sequence gradients may be
// evaluated on several threads; the sum is always taken in index order.
RnnGradients bptt_gradients(const RnnParams& params, std::span<const Sequence> batch,
                            std::size_t threads = 1);

// Mean-squared error of the network over a batch (mean over batch, time,
// and output channel).
double batch_loss(const RnnParams& params, std::span<const Sequence> batch);

double mse(const Matrix& y_pred, const Matrix& y_true);
// 1 - SSE/SST with SSE and SST summed over output channels and SST taken
// about each channel's own mean. Throws InvalidInput if SST is zero.
double r_squared(const Matrix& y_pred, const Matrix& y_true);

// Picard iteration for h = act(W h + F x* + b) starting from 0. Requires
// ||W|| * Lip(act) < 1.
Vector fixed_point(const RnnParams& params, std::span<const double> x_star);

// First-order model around the fixed point under constant input x*:
// a = D W, b_in = D F, c_out = C with D = diag(act'(W h* + F x* + b)).
struct LinearSystem {
  Matrix a;
  Matrix b_in;
  Matrix c_out;
  Vector x_star;
  Vector h_star;
  Vector y_star;
};

LinearSystem linearize(const RnnParams& params, std::span<const double> x_star);

// Linear system from an RNN's raw matrices (A = W, B = F, C = C) with zero
// operating point.
LinearSystem linear_part(const RnnParams& params);

struct ComplexMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::complex<double>> data;

  std::complex<double> operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
};

// H(s) = C (sI - A)^{-1} B. Throws NumericalFailure when sI - A is singular.
ComplexMatrix transfer_function(const LinearSystem& sys, std::complex<double> s);

struct Reachability {
  bool controllable = false;
  bool observable = false;
};

Matrix controllability_matrix(const LinearSystem& sys);
Matrix observability_matrix(const LinearSystem& sys);
Reachability ctrb_obsv(const LinearSystem& sys);

// (T W T^-1, T F, T b, C T^-1, T h_init). Allowed for identity activation
// with any invertible T, and for relu with a positive diagonal T.
RnnParams similarity_transform(const RnnParams& params, const Matrix& t);

struct ContractionCertificate {
  double rho = 0.0;
  bool is_contractive = false;
  bool is_unitary = false;
};

ContractionCertificate certify(const Matrix& w);

}  // namespace urnn
