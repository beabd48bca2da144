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

#include "urnn/rnn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "urnn/error.hpp"
#include "urnn/parallel.hpp"

namespace urnn {

namespace {

constexpr std::size_t kFixedPointMaxIter = 100000;

void require_finite_vector(std::span<const double> v, const char* what) {
  if (!all_finite(v)) throw InvalidInput(std::string(what) + " has non-finite entries");
}

// Pre-activation W h + F x + b.
Vector pre_activation(const RnnParams& p, std::span<const double> h, std::span<const double> x) {
  Vector z = p.w * h;
  const Vector fx = p.f * x;
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += fx[i] + p.b[i];
  return z;
}

void check_sequence(const RnnParams& p, const Matrix& x) {
  if (x.rows() == 0) throw InvalidInput("sequence must have at least one time step");
  if (x.cols() != p.input_dim()) {
    throw DimensionMismatch("input has " + std::to_string(x.cols()) +
                            " channels, network expects " + std::to_string(p.input_dim()));
  }
  if (!x.all_finite()) throw InvalidInput("input sequence has non-finite entries");
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kRelu:
      return "relu";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kIdentity:
      return "identity";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "identity") return Activation::kIdentity;
  throw InvalidInput("unknown activation '" + std::string(name) + "'");
}

double activate(Activation a, double z) {
  switch (a) {
    case Activation::kRelu:
      return z > 0.0 ? z : 0.0;
    case Activation::kSigmoid:
      return 1.0 / (1.0 + std::exp(-z));
    case Activation::kIdentity:
      return z;
  }
  return z;
}

double activate_derivative(Activation a, double z) {
  switch (a) {
    case Activation::kRelu:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::kSigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    case Activation::kIdentity:
      return 1.0;
  }
  return 1.0;
}

double lipschitz_constant(Activation a) { return a == Activation::kSigmoid ? 0.25 : 1.0; }

// ---------------------------------------------------------------------------
// Parameters

RnnParams RnnParams::zeros(std::size_t n, std::size_t m, std::size_t p, Activation act) {
  return RnnParams{Matrix(n, n), Matrix(n, m), Vector(n, 0.0), Matrix(p, n), Vector(n, 0.0), act};
}

void RnnParams::validate() const {
  const std::size_t n = w.rows();
  if (n == 0) throw InvalidInput("RnnParams: state dimension must be positive");
  if (w.cols() != n) throw DimensionMismatch("RnnParams: W must be square");
  if (f.rows() != n) throw DimensionMismatch("RnnParams: F must have n rows");
  if (c.cols() != n) throw DimensionMismatch("RnnParams: C must have n columns");
  if (b.size() != n) throw DimensionMismatch("RnnParams: b must have length n");
  if (h_init.size() != n) throw DimensionMismatch("RnnParams: h_init must have length n");
  if (f.cols() == 0 || c.rows() == 0) {
    throw InvalidInput("RnnParams: input and output dimensions must be positive");
  }
  if (!w.all_finite() || !f.all_finite() || !c.all_finite() || !all_finite(b) ||
      !all_finite(h_init)) {
    throw InvalidInput("RnnParams: non-finite parameter entries");
  }
}

// ---------------------------------------------------------------------------
// Simulation

Trajectory forward(const RnnParams& params, const Matrix& x) {
  params.validate();
  check_sequence(params, x);
  const std::size_t steps = x.rows();
  const std::size_t n = params.state_dim();
  Trajectory out{Matrix(steps, params.output_dim()), Matrix(steps, n)};
  Vector h = params.h_init;
  for (std::size_t k = 0; k < steps; ++k) {
    Vector z = pre_activation(params, h, x.row(k));
    for (std::size_t i = 0; i < n; ++i) h[i] = activate(params.activation, z[i]);
    if (!all_finite(h)) {
      throw OverflowError("forward: non-finite hidden state at time step " + std::to_string(k), k);
    }
    std::copy(h.begin(), h.end(), out.h.row(k).begin());
    const Vector y = params.c * h;
    std::copy(y.begin(), y.end(), out.y.row(k).begin());
  }
  return out;
}

Matrix rnn_map(const RnnParams& params, const Matrix& x) { return forward(params, x).y; }

// ---------------------------------------------------------------------------
// Gradients

RnnGradients RnnGradients::zeros_like(const RnnParams& p) {
  return RnnGradients{Matrix(p.w.rows(), p.w.cols()), Matrix(p.f.rows(), p.f.cols()),
                      Matrix(p.c.rows(), p.c.cols()), Vector(p.b.size(), 0.0),
                      Vector(p.h_init.size(), 0.0)};
}

RnnGradients& RnnGradients::operator+=(const RnnGradients& o) {
  w += o.w;
  f += o.f;
  c += o.c;
  if (b.size() != o.b.size() || h_init.size() != o.h_init.size()) {
    throw DimensionMismatch("RnnGradients: shape mismatch");
  }
  for (std::size_t i = 0; i < b.size(); ++i) b[i] += o.b[i];
  for (std::size_t i = 0; i < h_init.size(); ++i) h_init[i] += o.h_init[i];
  return *this;
}

RnnGradients& RnnGradients::operator*=(double s) {
  w *= s;
  f *= s;
  c *= s;
  for (double& v : b) v *= s;
  for (double& v : h_init) v *= s;
  return *this;
}

double RnnGradients::max_abs() const {
  double m = std::max({w.max_abs(), f.max_abs(), c.max_abs()});
  for (double v : b) m = std::max(m, std::abs(v));
  for (double v : h_init) m = std::max(m, std::abs(v));
  return m;
}

RnnGradients sequence_gradients(const RnnParams& params, const Sequence& seq) {
  if (!seq.has_targets()) throw InvalidInput("bptt: sequence has no targets");
  const Trajectory traj = forward(params, seq.x);
  if (seq.y.rows() != seq.x.rows() || seq.y.cols() != params.output_dim()) {
    throw DimensionMismatch("bptt: target shape does not match network output");
  }
  const std::size_t steps = seq.x.rows();
  const std::size_t n = params.state_dim();
  const std::size_t m = params.input_dim();
  const std::size_t p = params.output_dim();
  const double norm = 2.0 / static_cast<double>(steps * p);

  RnnGradients g = RnnGradients::zeros_like(params);
  Vector dz_next(n, 0.0);  // dL/dz[k+1]
  Vector dh(n);
  Vector dy(p);
  for (std::size_t kk = steps; kk-- > 0;) {
    const auto h_k = traj.h.row(kk);
    for (std::size_t o = 0; o < p; ++o) dy[o] = norm * (traj.y(kk, o) - seq.y(kk, o));
    for (std::size_t o = 0; o < p; ++o) {
      for (std::size_t i = 0; i < n; ++i) g.c(o, i) += dy[o] * h_k[i];
    }
    // dh = C^T dy + W^T dz[k+1]
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t o = 0; o < p; ++o) acc += params.c(o, i) * dy[o];
      for (std::size_t j = 0; j < n; ++j) acc += params.w(j, i) * dz_next[j];
      dh[i] = acc;
    }
    const std::span<const double> h_prev =
        kk == 0 ? std::span<const double>(params.h_init) : traj.h.row(kk - 1);
    const Vector z = pre_activation(params, h_prev, seq.x.row(kk));
    for (std::size_t i = 0; i < n; ++i) {
      const double dz = dh[i] * activate_derivative(params.activation, z[i]);
      dz_next[i] = dz;
      if (dz == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) g.w(i, j) += dz * h_prev[j];
      for (std::size_t j = 0; j < m; ++j) g.f(i, j) += dz * seq.x(kk, j);
      g.b[i] += dz;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += params.w(j, i) * dz_next[j];
    g.h_init[i] = acc;
  }
  return g;
}

RnnGradients bptt_gradients(const RnnParams& params, std::span<const Sequence> batch,
                            std::size_t threads) {
  if (batch.empty()) throw InvalidInput("bptt: empty batch");
  std::vector<RnnGradients> parts(batch.size());
  parallel_for(batch.size(), threads,
               [&](std::size_t i) { parts[i] = sequence_gradients(params, batch[i]); });
  RnnGradients total = std::move(parts[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) total += parts[i];
  total *= 1.0 / static_cast<double>(batch.size());
  return total;
}

double batch_loss(const RnnParams& params, std::span<const Sequence> batch) {
  if (batch.empty()) throw InvalidInput("batch_loss: empty batch");
  double total = 0.0;
  for (const Sequence& seq : batch) {
    if (!seq.has_targets()) throw InvalidInput("batch_loss: sequence has no targets");
    total += mse(rnn_map(params, seq.x), seq.y);
  }
  return total / static_cast<double>(batch.size());
}

double mse(const Matrix& y_pred, const Matrix& y_true) {
  if (y_pred.rows() != y_true.rows() || y_pred.cols() != y_true.cols()) {
    throw DimensionMismatch("mse: shape mismatch");
  }
  if (y_true.empty()) throw InvalidInput("mse: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_pred.data()[i] - y_true.data()[i];
    s += d * d;
  }
  return s / static_cast<double>(y_true.size());
}

double r_squared(const Matrix& y_pred, const Matrix& y_true) {
  if (y_pred.rows() != y_true.rows() || y_pred.cols() != y_true.cols()) {
    throw DimensionMismatch("r_squared: shape mismatch");
  }
  if (y_true.empty()) throw InvalidInput("r_squared: empty input");
  const std::size_t rows = y_true.rows();
  double sse = 0.0, sst = 0.0;
  for (std::size_t c = 0; c < y_true.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < rows; ++r) mean += y_true(r, c);
    mean /= static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const double e = y_pred(r, c) - y_true(r, c);
      const double d = y_true(r, c) - mean;
      sse += e * e;
      sst += d * d;
    }
  }
  if (sst == 0.0) throw InvalidInput("r_squared: targets have zero variance; R^2 is undefined");
  return 1.0 - sse / sst;
}

// ---------------------------------------------------------------------------
// Fixed points and linearization

Vector fixed_point(const RnnParams& params, std::span<const double> x_star) {
  params.validate();
  if (x_star.size() != params.input_dim()) throw DimensionMismatch("fixed_point: x* length");
  require_finite_vector(x_star, "fixed_point: x*");
  const double gain = spectral_norm(params.w) * lipschitz_constant(params.activation);
  if (!(gain < 1.0)) {
    throw PreconditionError("fixed_point: state map is not a contraction (||W|| * Lip = " +
                            std::to_string(gain) + ")");
  }
  const std::size_t n = params.state_dim();
  Vector offset = params.f * x_star;
  for (std::size_t i = 0; i < n; ++i) offset[i] += params.b[i];

  Vector h(n, 0.0);
  Vector next(n);
  for (std::size_t iter = 0; iter < kFixedPointMaxIter; ++iter) {
    const Vector wh = params.w * h;
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = activate(params.activation, wh[i] + offset[i]);
      const double d = next[i] - h[i];
      diff += d * d;
    }
    const double scale = std::max(1.0, norm2(next));
    std::swap(h, next);
    if (std::sqrt(diff) <= 1e-13 * scale) return h;
  }
  throw NonConvergence("fixed_point: no convergence after " +
                       std::to_string(kFixedPointMaxIter) + " iterations");
}

LinearSystem linearize(const RnnParams& params, std::span<const double> x_star) {
  const Vector h_star = fixed_point(params, x_star);
  const Vector z = pre_activation(params, h_star, x_star);
  const std::size_t n = params.state_dim();
  Vector d(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (params.activation == Activation::kRelu && std::abs(z[i]) <= 1e-9) {
      throw PreconditionError("linearize: relu pre-activation of unit " + std::to_string(i) +
                              " sits on the kink; not differentiable");
    }
    d[i] = activate_derivative(params.activation, z[i]);
  }
  LinearSystem sys;
  sys.a = params.w;
  sys.b_in = params.f;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) sys.a(i, j) *= d[i];
    for (std::size_t j = 0; j < params.input_dim(); ++j) sys.b_in(i, j) *= d[i];
  }
  sys.c_out = params.c;
  sys.x_star.assign(x_star.begin(), x_star.end());
  sys.h_star = h_star;
  sys.y_star = params.c * h_star;
  return sys;
}

LinearSystem linear_part(const RnnParams& params) {
  params.validate();
  return LinearSystem{params.w,
                      params.f,
                      params.c,
                      Vector(params.input_dim(), 0.0),
                      Vector(params.state_dim(), 0.0),
                      Vector(params.output_dim(), 0.0)};
}

// ---------------------------------------------------------------------------
// Linear system theory

ComplexMatrix transfer_function(const LinearSystem& sys, std::complex<double> s) {
  using cd = std::complex<double>;
  const std::size_t n = sys.a.rows();
  const std::size_t m = sys.b_in.cols();
  const std::size_t p = sys.c_out.rows();
  if (!sys.a.is_square() || sys.b_in.rows() != n || sys.c_out.cols() != n) {
    throw DimensionMismatch("transfer_function: inconsistent system dimensions");
  }
  // Solve (sI - A) X = B by Gaussian elimination with partial pivoting.
  std::vector<cd> lhs(n * n);
  std::vector<cd> rhs(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) lhs[i * n + j] = -sys.a(i, j);
    lhs[i * n + i] += s;
    for (std::size_t j = 0; j < m; ++j) rhs[i * m + j] = sys.b_in(i, j);
  }
  const double scale = std::max({1.0, std::abs(s), sys.a.max_abs()});
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(lhs[r * n + col]) > std::abs(lhs[piv * n + col])) piv = r;
    }
    if (std::abs(lhs[piv * n + col]) <= 1e-12 * scale) {
      throw NumericalFailure("transfer_function: sI - A is singular (s is an eigenvalue of A)");
    }
    if (piv != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(lhs[piv * n + k], lhs[col * n + k]);
      for (std::size_t k = 0; k < m; ++k) std::swap(rhs[piv * m + k], rhs[col * m + k]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const cd factor = lhs[r * n + col] / lhs[col * n + col];
      if (factor == cd(0.0)) continue;
      for (std::size_t k = col; k < n; ++k) lhs[r * n + k] -= factor * lhs[col * n + k];
      for (std::size_t k = 0; k < m; ++k) rhs[r * m + k] -= factor * rhs[col * m + k];
    }
  }
  for (std::size_t r = n; r-- > 0;) {
    for (std::size_t k = 0; k < m; ++k) {
      cd acc = rhs[r * m + k];
      for (std::size_t j = r + 1; j < n; ++j) acc -= lhs[r * n + j] * rhs[j * m + k];
      rhs[r * m + k] = acc / lhs[r * n + r];
    }
  }
  ComplexMatrix h{p, m, std::vector<cd>(p * m)};
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      cd acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += sys.c_out(i, k) * rhs[k * m + j];
      h.data[i * m + j] = acc;
    }
  }
  return h;
}

Matrix controllability_matrix(const LinearSystem& sys) {
  const std::size_t n = sys.a.rows();
  Matrix block = sys.b_in;
  Matrix out = block;
  for (std::size_t k = 1; k < n; ++k) {
    block = sys.a * block;
    out = hconcat(out, block);
  }
  return out;
}

Matrix observability_matrix(const LinearSystem& sys) {
  const std::size_t n = sys.a.rows();
  Matrix block = sys.c_out;
  Matrix out = block;
  for (std::size_t k = 1; k < n; ++k) {
    block = block * sys.a;
    out = vconcat(out, block);
  }
  return out;
}

Reachability ctrb_obsv(const LinearSystem& sys) {
  const std::size_t n = sys.a.rows();
  constexpr double kRankTol = 1e-9;
  return Reachability{matrix_rank(controllability_matrix(sys), kRankTol) == n,
                      matrix_rank(observability_matrix(sys), kRankTol) == n};
}

RnnParams similarity_transform(const RnnParams& params, const Matrix& t) {
  params.validate();
  const std::size_t n = params.state_dim();
  if (t.rows() != n || t.cols() != n) throw DimensionMismatch("similarity_transform: T shape");
  if (params.activation == Activation::kSigmoid) {
    throw PreconditionError("similarity_transform: sigmoid networks are not invariant");
  }
  if (params.activation == Activation::kRelu) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && t(i, j) != 0.0) {
          throw PreconditionError("similarity_transform: relu requires a diagonal T");
        }
      }
      if (!(t(i, i) > 0.0)) {
        throw PreconditionError("similarity_transform: relu requires a positive diagonal T");
      }
    }
  }
  const Matrix t_inv = inverse(t);
  RnnParams out = params;
  out.w = t * params.w * t_inv;
  out.f = t * params.f;
  out.b = t * std::span<const double>(params.b);
  out.c = params.c * t_inv;
  out.h_init = t * std::span<const double>(params.h_init);
  return out;
}

ContractionCertificate certify(const Matrix& w) {
  if (!w.is_square()) throw DimensionMismatch("certify: W must be square");
  ContractionCertificate cert;
  cert.rho = spectral_norm(w);
  cert.is_contractive = cert.rho < 1.0;
  cert.is_unitary = orthogonality_residual(w) <= 1e-8;
  return cert;
}

}  // namespace urnn
