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

#include "urnn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "urnn/parallel.hpp"

namespace urnn {

namespace {

// Stream indices for derive_seed().
constexpr std::uint64_t kStreamA = 0;
constexpr std::uint64_t kStreamF = 1;
constexpr std::uint64_t kStreamC = 2;
constexpr std::uint64_t kStreamB = 3;
constexpr std::uint64_t kStreamProbe = 4;
constexpr std::uint64_t kStreamNoise = 5;
constexpr std::uint64_t kStreamInputs = 6;

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = gauss(rng);
  return m;
}

// Linear-interpolation quantile of `values` (modified in place).
double quantile(std::vector<double>& values, double q) {
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
  const double vlo = values[lo];
  if (hi == lo) return vlo;
  const double vhi = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
  return vlo + (pos - static_cast<double>(lo)) * (vhi - vlo);
}

// Pre-activations of every unit at every probe step, unit-major.
std::vector<std::vector<double>> probe_pre_activations(const RnnParams& params,
                                                       std::span<const Matrix> probe) {
  const std::size_t n = params.state_dim();
  std::vector<std::vector<double>> z(n);
  for (const Matrix& x : probe) {
    Vector h = params.h_init;
    for (std::size_t k = 0; k < x.rows(); ++k) {
      Vector pre = params.w * h;
      const Vector fx = params.f * x.row(k);
      for (std::size_t i = 0; i < n; ++i) {
        pre[i] += fx[i] + params.b[i];
        z[i].push_back(pre[i]);
        h[i] = activate(params.activation, pre[i]);
      }
      if (!all_finite(h)) throw OverflowError("bias calibration: state overflow", k);
    }
  }
  return z;
}

}  // namespace

void SystemSpec::validate() const {
  if (n == 0 || m == 0 || p == 0) throw InvalidInput("system spec: dimensions must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("system spec: epsilon must be in (0,1)");
  if (!(activation_target > 0.0 && activation_target < 1.0)) {
    throw InvalidInput("system spec: activation target must be in (0,1)");
  }
  if (!(input_std > 0.0)) throw InvalidInput("system spec: input std must be positive");
  if (!(input_sparsity > 0.0 && input_sparsity <= 1.0)) {
    throw InvalidInput("system spec: input sparsity must be in (0,1]");
  }
  if (!(calibration_tol > 0.0)) throw InvalidInput("system spec: calibration tol must be positive");
  if (probe_sequences == 0 || probe_length == 0) {
    throw InvalidInput("system spec: calibration probe must be nonempty");
  }
}

Vector activity_fractions(const RnnParams& params, std::span<const Matrix> probe) {
  if (probe.empty()) throw InvalidInput("activity_fractions: empty probe");
  Vector on(params.state_dim(), 0.0);
  std::size_t steps = 0;
  for (const Matrix& x : probe) {
    const Trajectory t = forward(params, x);
    for (std::size_t k = 0; k < t.h.rows(); ++k) {
      for (std::size_t i = 0; i < on.size(); ++i) on[i] += t.h(k, i) > 0.0 ? 1.0 : 0.0;
    }
    steps += t.h.rows();
  }
  for (double& v : on) v /= static_cast<double>(steps);
  return on;
}

CalibrationResult bias_calibrate(const RnnParams& params, std::span<const Matrix> probe,
                                 double target, double tol, std::size_t max_iter) {
  params.validate();
  if (params.activation != Activation::kRelu) {
    throw UnsupportedActivation("bias_calibrate: only relu networks are supported");
  }
  if (probe.empty()) throw InvalidInput("bias_calibrate: empty probe");
  if (!(target > 0.0 && target < 1.0) || !(tol > 0.0)) {
    throw InvalidInput("bias_calibrate: target must be in (0,1) and tol positive");
  }
  const std::size_t n = params.state_dim();
  CalibrationResult res{params, Vector(n, 0.0), 0};
  Vector step(n, 1.0);
  Vector prev_err(n, 0.0);
  for (std::size_t iter = 0;; ++iter) {
    auto z = probe_pre_activations(res.params, probe);
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      const auto on = std::count_if(z[i].begin(), z[i].end(), [](double v) { return v > 0.0; });
      res.fractions[i] = static_cast<double>(on) / static_cast<double>(z[i].size());
      ok = ok && std::abs(res.fractions[i] - target) <= tol;
    }
    res.iterations = iter;
    if (ok) return res;
    if (iter >= max_iter) {
      throw CalibrationFailure("bias_calibrate: no convergence after " +
                                   std::to_string(max_iter) + " iterations",
                               res.fractions);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double err = res.fractions[i] - target;
      if (prev_err[i] != 0.0 && (err > 0.0) != (prev_err[i] > 0.0)) step[i] *= 0.5;
      prev_err[i] = err;
      res.params.b[i] -= step[i] * quantile(z[i], 1.0 - target);
    }
  }
}

Matrix sample_inputs(const SystemSpec& spec, std::size_t t_len, std::uint64_t seed,
                     std::size_t index) {
  std::mt19937_64 rng(derive_seed(derive_seed(seed, kStreamInputs), index));
  std::normal_distribution<double> gauss(0.0, spec.input_std);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix x(t_len, spec.m);
  for (double& v : x.data()) {
    const double g = gauss(rng);
    if (spec.input_sparsity < 1.0) {
      v = unif(rng) < spec.input_sparsity ? g : 0.0;
    } else {
      v = g;
    }
  }
  return x;
}

GeneratedSystem generate_system(const SystemSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  const Matrix a = gaussian_matrix(n, n, derive_seed(spec.seed, kStreamA));
  const double a_norm = spectral_norm(a);

  RnnParams params = RnnParams::zeros(n, spec.m, spec.p, Activation::kRelu);
  params.w = Matrix::identity(n) - (spec.epsilon / (a_norm * a_norm)) * (a.transpose() * a);
  params.f = gaussian_matrix(n, spec.m, derive_seed(spec.seed, kStreamF));
  params.c = gaussian_matrix(spec.p, n, derive_seed(spec.seed, kStreamC));
  const Matrix b = gaussian_matrix(n, 1, derive_seed(spec.seed, kStreamB));
  params.b.assign(b.data().begin(), b.data().end());

  std::vector<Matrix> probe;
  for (std::size_t i = 0; i < spec.probe_sequences; ++i) {
    probe.push_back(
        sample_inputs(spec, spec.probe_length, derive_seed(spec.seed, kStreamProbe), i));
  }
  GeneratedSystem out;
  out.calibration = bias_calibrate(params, probe, spec.activation_target, spec.calibration_tol,
                                   spec.calibration_max_iter);
  out.params = out.calibration.params;
  const SvdFactors f = svd(out.params.w);
  out.max_singular_value = f.s.front();
  out.min_singular_value = f.s.back();
  return out;
}

Dataset generate_dataset(const RnnParams& params, const SystemSpec& spec, std::size_t n_train,
                         std::size_t n_test, std::size_t t_len, double snr_db,
                         std::uint64_t seed) {
  params.validate();
  spec.validate();
  if (t_len == 0) throw InvalidInput("generate_dataset: T must be positive");
  if (n_train + n_test == 0) throw InvalidInput("generate_dataset: no sequences requested");
  if (params.input_dim() != spec.m || params.output_dim() != spec.p) {
    throw DimensionMismatch("generate_dataset: spec dimensions do not match the system");
  }
  const bool noiseless = std::isinf(snr_db) && snr_db > 0.0;
  if (std::isnan(snr_db) || (std::isinf(snr_db) && !noiseless)) {
    throw InvalidInput("generate_dataset: SNR must be finite or +inf");
  }

  Dataset ds;
  ds.spec = spec;
  ds.seed = seed;
  ds.t_len = t_len;
  ds.snr_db = snr_db;

  std::vector<Sequence> all(n_train + n_test);
  Vector channel_mean(spec.p, 0.0);
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i].x = sample_inputs(spec, t_len, seed, i);
    all[i].y = rnn_map(params, all[i].x);
    for (std::size_t k = 0; k < t_len; ++k) {
      for (std::size_t c = 0; c < spec.p; ++c) channel_mean[c] += all[i].y(k, c);
    }
  }
  const double per_channel = static_cast<double>(all.size() * t_len);
  for (double& v : channel_mean) v /= per_channel;
  // Signal power is the pooled variance of the clean outputs, so that the
  // best achievable R^2 is 1 - 10^(-snr/10).
  double power = 0.0;
  for (const Sequence& s : all) {
    for (std::size_t k = 0; k < t_len; ++k) {
      for (std::size_t c = 0; c < spec.p; ++c) {
        const double d = s.y(k, c) - channel_mean[c];
        power += d * d;
      }
    }
  }
  const double count = per_channel * static_cast<double>(spec.p);
  ds.clean_signal_power = power / count;
  if (!(ds.clean_signal_power > 0.0)) {
    throw NumericalFailure("generate_dataset: system output is constant (degenerate)");
  }

  if (noiseless) {
    ds.noise_power = 0.0;
    ds.empirical_snr_db = std::numeric_limits<double>::infinity();
  } else {
    ds.noise_power = ds.clean_signal_power / std::pow(10.0, snr_db / 10.0);
    std::mt19937_64 rng(derive_seed(seed, kStreamNoise));
    std::normal_distribution<double> gauss(0.0, std::sqrt(ds.noise_power));
    double noise = 0.0;
    for (Sequence& s : all) {
      for (double& v : s.y.data()) {
        const double e = gauss(rng);
        v += e;
        noise += e * e;
      }
    }
    ds.empirical_snr_db = 10.0 * std::log10(ds.clean_signal_power / (noise / count));
  }
  ds.train.assign(std::make_move_iterator(all.begin()),
                  std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(n_train)));
  ds.test.assign(std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(n_train)),
                 std::make_move_iterator(all.end()));
  return ds;
}

}  // namespace urnn
