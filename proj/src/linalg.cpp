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

#include "urnn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "urnn/error.hpp"

namespace urnn {

namespace {

constexpr int kMaxSweeps = 60;
// Relative off-diagonal threshold below which Jacobi rotations are skipped.
constexpr double kJacobiTol = 1e-15;
constexpr double kNullColumnTol = 1e-14;

void require_finite(const Matrix& m, const char* op) {
  if (!m.all_finite()) {
    throw InvalidInput(std::string(op) + ": matrix has non-finite entries");
  }
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string(op) + ": shape " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                            "x" + std::to_string(b.cols()));
  }
}

// Flip column c of `primary` (and of `partner`, if given) so that its first
// entry that is nonzero is positive.
void fix_column_sign(Matrix& primary, Matrix* partner, std::size_t c) {
  for (std::size_t r = 0; r < primary.rows(); ++r) {
    const double v = primary(r, c);
    if (v == 0.0) continue;
    if (v < 0.0) {
      for (std::size_t k = 0; k < primary.rows(); ++k) primary(k, c) = -primary(k, c);
      if (partner != nullptr) {
        for (std::size_t k = 0; k < partner->rows(); ++k) (*partner)(k, c) = -(*partner)(k, c);
      }
    }
    return;
  }
}

std::vector<std::size_t> descending_order(const Vector& values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return idx;
}

Matrix permute_columns(const Matrix& m, const std::vector<std::size_t>& order) {
  Matrix out(m.rows(), order.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) = m(i, order[j]);
  }
  return out;
}

// Replace the columns of u flagged in `zero` with unit vectors orthogonal to
// all other columns.
void fill_null_columns(Matrix& u, const std::vector<bool>& zero) {
  std::vector<Vector> basis;
  for (std::size_t j = 0; j < u.cols(); ++j) {
    if (!zero[j]) basis.push_back(u.col(j));
  }
  for (std::size_t j = 0; j < u.cols(); ++j) {
    if (!zero[j]) continue;
    Vector best;
    double best_norm = -1.0;
    for (std::size_t e = 0; e < u.rows(); ++e) {
      Vector v(u.rows(), 0.0);
      v[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) {
          const double proj = dot(v, b);
          for (std::size_t k = 0; k < v.size(); ++k) v[k] -= proj * b[k];
        }
      }
      const double nv = norm2(v);
      if (nv > best_norm) {
        best_norm = nv;
        best = std::move(v);
      }
    }
    for (double& x : best) x /= best_norm;
    u.set_col(j, best);
    basis.push_back(std::move(best));
  }
}

// One-sided Jacobi for rows >= cols.
SvdFactors svd_tall(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  Matrix u = m;
  Matrix v = Matrix::identity(cols);
  // Columns below this norm are round-off left by rank deficiency; they are
  // neither rotated nor normalized.
  const double null_norm = kNullColumnTol * m.frobenius();
  const double null_norm2 = null_norm * null_norm;

  bool converged = cols < 2;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < cols; ++i) {
      for (std::size_t j = i + 1; j < cols; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t k = 0; k < rows; ++k) {
          const double ui = u(k, i), uj = u(k, j);
          alpha += ui * ui;
          beta += uj * uj;
          gamma += ui * uj;
        }
        if (gamma == 0.0 || std::abs(gamma) <= kJacobiTol * std::sqrt(alpha * beta)) continue;
        if (alpha <= null_norm2 || beta <= null_norm2) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (std::size_t k = 0; k < rows; ++k) {
          const double ui = u(k, i), uj = u(k, j);
          u(k, i) = c * ui - s * uj;
          u(k, j) = s * ui + c * uj;
        }
        for (std::size_t k = 0; k < cols; ++k) {
          const double vi = v(k, i), vj = v(k, j);
          v(k, i) = c * vi - s * vj;
          v(k, j) = s * vi + c * vj;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) {
    throw NonConvergence("svd: Jacobi sweeps did not converge within " +
                         std::to_string(kMaxSweeps) + " sweeps");
  }

  Vector s(cols);
  std::vector<bool> zero(cols, false);
  for (std::size_t j = 0; j < cols; ++j) {
    s[j] = norm2(u.col(j));
    if (s[j] <= null_norm || s[j] < 1e-300) {
      zero[j] = true;
      continue;
    }
    for (std::size_t k = 0; k < rows; ++k) u(k, j) /= s[j];
  }
  const auto order = descending_order(s);
  SvdFactors out;
  out.u = permute_columns(u, order);
  out.v = permute_columns(v, order);
  out.s.resize(cols);
  std::vector<bool> zero_sorted(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    out.s[j] = s[order[j]];
    zero_sorted[j] = zero[order[j]];
  }
  if (std::find(zero_sorted.begin(), zero_sorted.end(), true) != zero_sorted.end()) {
    fill_null_columns(out.u, zero_sorted);
  }
  for (std::size_t j = 0; j < cols; ++j) fix_column_sign(out.u, &out.v, j);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::column(std::span<const double> v) {
  Matrix m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.data_.begin());
  return m;
}

Vector Matrix::col(std::size_t c) const {
  Vector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void Matrix::set_col(std::size_t c, std::span<const double> v) {
  if (v.size() != rows_) throw DimensionMismatch("Matrix::set_col: length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

bool Matrix::all_finite() const { return urnn::all_finite(data_); }

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

double Matrix::frobenius() const { return norm2(data_); }

Matrix& Matrix::operator+=(const Matrix& o) {
  require_same_shape(*this, o, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  require_same_shape(*this, o, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("matmul: " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " times " + std::to_string(b.rows()) +
                            "x" + std::to_string(b.cols()));
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matvec: length mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Matrix hconcat(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw DimensionMismatch("hconcat: row count mismatch");
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
    for (std::size_t c = 0; c < b.cols(); ++c) out(r, a.cols() + c) = b(r, c);
  }
  return out;
}

Matrix vconcat(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw DimensionMismatch("vconcat: column count mismatch");
  Matrix out(a.rows() + b.rows(), a.cols());
  std::copy(a.data().begin(), a.data().end(), out.data().begin());
  std::copy(b.data().begin(), b.data().end(), out.data().begin() + a.size());
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double orthogonality_residual(const Matrix& a) {
  return max_abs_diff(a.transpose() * a, Matrix::identity(a.cols()));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) {
  // Scaled accumulation so huge or tiny entries do not overflow/underflow.
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double x : v) {
    const double r = x / scale;
    s += r * r;
  }
  return scale * std::sqrt(s);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// ---------------------------------------------------------------------------
// Factorizations

SvdFactors svd(const Matrix& m) {
  require_finite(m, "svd");
  if (m.empty()) throw InvalidInput("svd: empty matrix");
  if (m.rows() >= m.cols()) return svd_tall(m);
  SvdFactors t = svd_tall(m.transpose());
  SvdFactors out{std::move(t.v), std::move(t.s), std::move(t.u)};
  for (std::size_t j = 0; j < out.u.cols(); ++j) fix_column_sign(out.u, &out.v, j);
  return out;
}

SymmetricEigen symmetric_eigen(const Matrix& s) {
  require_finite(s, "symmetric_eigen");
  if (!s.is_square()) throw DimensionMismatch("symmetric_eigen: matrix is not square");
  const std::size_t n = s.rows();
  Matrix a = s;
  Matrix v = Matrix::identity(n);
  const double scale = std::max(a.frobenius(), 1e-300);

  auto off_diagonal = [&] {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) sum += a(i, j) * a(i, j);
      }
    }
    return std::sqrt(sum);
  };

  bool converged = off_diagonal() <= kJacobiTol * scale;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double sn = c * t;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
    converged = off_diagonal() <= kJacobiTol * scale;
  }
  if (!converged) {
    throw NonConvergence("symmetric_eigen: Jacobi sweeps did not converge within " +
                         std::to_string(kMaxSweeps) + " sweeps");
  }

  Vector diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
  const auto order = descending_order(diag);
  SymmetricEigen out;
  out.vectors = permute_columns(v, order);
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = diag[order[i]];
  for (std::size_t j = 0; j < n; ++j) fix_column_sign(out.vectors, nullptr, j);
  return out;
}

double spectral_norm(const Matrix& m) { return svd(m).s.front(); }

Matrix symmetric_psd_sqrt(const Matrix& s) {
  require_finite(s, "symmetric_psd_sqrt");
  if (!s.is_square()) throw DimensionMismatch("symmetric_psd_sqrt: matrix is not square");
  const double scale = std::max(1.0, s.max_abs());
  if (max_abs_diff(s, s.transpose()) > 1e-10 * scale) {
    throw InvalidInput("symmetric_psd_sqrt: matrix is not symmetric");
  }
  const Matrix sym = 0.5 * (s + s.transpose());
  const SymmetricEigen eig = symmetric_eigen(sym);
  const std::size_t n = s.rows();
  Vector root(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = eig.values[i];
    if (lambda < -1e-12 * scale) {
      throw InvalidInput("symmetric_psd_sqrt: matrix is indefinite (eigenvalue " +
                         std::to_string(lambda) + ")");
    }
    root[i] = std::sqrt(std::max(lambda, 0.0));
  }
  Matrix scaled = eig.vectors;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) scaled(r, c) *= root[c];
  }
  Matrix b = scaled * eig.vectors.transpose();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (b(i, j) + b(j, i));
      b(i, j) = b(j, i) = avg;
    }
  }
  return b;
}

Matrix orthonormal_complete(const Matrix& q) {
  require_finite(q, "orthonormal_complete");
  if (q.cols() > q.rows()) {
    throw InvalidInput("orthonormal_complete: more columns than rows");
  }
  if (orthogonality_residual(q) > 1e-8) {
    throw InvalidInput("orthonormal_complete: input columns are not orthonormal");
  }
  const std::size_t dim = q.rows();
  const std::size_t need = dim - q.cols();
  std::vector<Vector> basis;
  basis.reserve(dim);
  for (std::size_t j = 0; j < q.cols(); ++j) basis.push_back(q.col(j));

  Matrix r(dim, need);
  std::vector<bool> used(dim, false);
  for (std::size_t out_col = 0; out_col < need; ++out_col) {
    Vector best;
    double best_norm = -1.0;
    std::size_t best_index = 0;
    for (std::size_t e = 0; e < dim; ++e) {
      if (used[e]) continue;
      Vector v(dim, 0.0);
      v[e] = 1.0;
      // Two passes of classical Gram-Schmidt.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) {
          const double proj = dot(v, b);
          for (std::size_t k = 0; k < dim; ++k) v[k] -= proj * b[k];
        }
      }
      const double nv = norm2(v);
      if (nv > best_norm) {
        best_norm = nv;
        best = std::move(v);
        best_index = e;
      }
    }
    if (best_norm < 1e-8) {
      throw NumericalFailure("orthonormal_complete: could not find a complementary direction");
    }
    for (double& x : best) x /= best_norm;
    // Re-orthogonalize the normalized vector once more.
    for (const auto& b : basis) {
      const double proj = dot(best, b);
      for (std::size_t k = 0; k < dim; ++k) best[k] -= proj * b[k];
    }
    const double renorm = norm2(best);
    for (double& x : best) x /= renorm;
    used[best_index] = true;
    r.set_col(out_col, best);
    basis.push_back(std::move(best));
  }
  for (std::size_t j = 0; j < need; ++j) fix_column_sign(r, nullptr, j);
  return r;
}

Matrix polar_orthogonal_projection(const Matrix& m) {
  if (!m.is_square()) throw DimensionMismatch("polar_orthogonal_projection: matrix is not square");
  const SvdFactors f = svd(m);
  const double smax = f.s.front();
  const double smin = f.s.back();
  if (smax == 0.0 || smin <= 1e-12 * smax) {
    throw NumericalFailure("polar_orthogonal_projection: matrix is rank deficient");
  }
  return f.u * f.v.transpose();
}

Matrix singular_value_clip(const Matrix& m, double cap) {
  if (!(cap > 0.0) || !std::isfinite(cap)) {
    throw InvalidInput("singular_value_clip: cap must be positive");
  }
  if (!m.is_square()) throw DimensionMismatch("singular_value_clip: matrix is not square");
  const SvdFactors f = svd(m);
  if (f.s.front() <= cap) return m;
  Matrix us = f.u;
  for (std::size_t r = 0; r < us.rows(); ++r) {
    for (std::size_t c = 0; c < us.cols(); ++c) us(r, c) *= std::min(f.s[c], cap);
  }
  return us * f.v.transpose();
}

std::size_t matrix_rank(const Matrix& m, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("matrix_rank: tol must be positive");
  const SvdFactors f = svd(m);
  const double smax = f.s.front();
  if (smax == 0.0) return 0;
  return static_cast<std::size_t>(
      std::count_if(f.s.begin(), f.s.end(), [&](double s) { return s > tol * smax; }));
}

Matrix inverse(const Matrix& m) {
  require_finite(m, "inverse");
  if (!m.is_square()) throw DimensionMismatch("inverse: matrix is not square");
  const std::size_t n = m.rows();
  Matrix a = m;
  Matrix inv = Matrix::identity(n);
  const double scale = std::max(m.max_abs(), 1e-300);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    }
    if (std::abs(a(piv, col)) <= 1e-14 * scale) throw InvalidInput("inverse: matrix is singular");
    if (piv != col) {
      for (std::size_t k = 0; k < n; ++k) {
        std::swap(a(piv, k), a(col, k));
        std::swap(inv(piv, k), inv(col, k));
      }
    }
    const double d = a(col, col);
    for (std::size_t k = 0; k < n; ++k) {
      a(col, k) /= d;
      inv(col, k) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = a(r, col);
      if (factor == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        a(r, k) -= factor * a(col, k);
        inv(r, k) -= factor * inv(col, k);
      }
    }
  }
  return inv;
}

}  // namespace urnn
