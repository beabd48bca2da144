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

// Small dense real-matrix kernel. Sizes in this project stay below ~64x64,
// so everything is plain row-major storage and Jacobi-type factorizations.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace urnn {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Row-major nested initializer: Matrix{{1, 2}, {3, 4}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  static Matrix column(std::span<const double> v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  Vector col(std::size_t c) const;
  void set_col(std::size_t c, std::span<const double> v);

  Matrix transpose() const;
  bool all_finite() const;
  double max_abs() const;
  double frobenius() const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

// Stack blocks: [a b] and [a; b].
Matrix hconcat(const Matrix& a, const Matrix& b);
Matrix vconcat(const Matrix& a, const Matrix& b);

// max_ij |a_ij - b_ij|; shapes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);
// max_ij |(a^T a - I)_ij|.
double orthogonality_residual(const Matrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
bool all_finite(std::span<const double> v);

// Thin SVD: m = u diag(s) v^T with u (rows x k), v (cols x k),
// k = min(rows, cols), s descending.
struct SvdFactors {
  Matrix u;
  Vector s;
  Matrix v;
};

// Symmetric eigendecomposition s = vectors diag(values) vectors^T,
// values descending.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

// One-sided Jacobi SVD. Each column of u has its first nonzero entry
// positive. Throws InvalidInput on non-finite entries and NonConvergence
// if the sweep cap is reached.
SvdFactors svd(const Matrix& m);

// Cyclic Jacobi on a symmetric matrix; eigenvector columns follow the same
// sign rule as svd().
SymmetricEigen symmetric_eigen(const Matrix& s);

double spectral_norm(const Matrix& m);

// Symmetric PSD square root B with B B = s. Eigenvalues down to -1e-12
// (relative to the largest magnitude) are clamped to zero.
Matrix symmetric_psd_sqrt(const Matrix& s);

// Given q (rows x k) with orthonormal columns, returns r (rows x (rows-k))
// such that [q r] is orthogonal. Canonical basis vectors are orthogonalized
// against the current basis; at every step the one with the largest
// residual (lowest index on ties) is taken.
Matrix orthonormal_complete(const Matrix& q);

// Nearest orthogonal matrix in Frobenius norm, u v^T.
Matrix polar_orthogonal_projection(const Matrix& m);

// u diag(min(s, cap)) v^T; returns m itself when spectral_norm(m) <= cap.
Matrix singular_value_clip(const Matrix& m, double cap);

// Number of singular values above tol * sigma_1.
std::size_t matrix_rank(const Matrix& m, double tol);

// Gauss-Jordan with partial pivoting. Throws InvalidInput when a pivot falls
// below 1e-14 times the largest entry.
Matrix inverse(const Matrix& m);

}  // namespace urnn
