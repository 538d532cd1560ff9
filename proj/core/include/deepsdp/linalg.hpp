// Copyright 2026 The deepsdp Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>

namespace deepsdp::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real symmetric matrix. The input is always replaced by (A + A^T) / 2
/// so that entries(i, j) == entries(j, i) holds bit for bit.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(int dim);
  explicit SymMat(const Matrix& a);

  static SymMat Zero(int dim) { return SymMat(dim); }
  static SymMat Identity(int dim);
  static SymMat Diagonal(std::span<const double> diag);
  /// v v^T
  static SymMat Outer(const Vector& v);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }

  /// Writes a(i, j) and a(j, i) together.
  void set(int i, int j, double value);
  void add(int i, int j, double value);

  SymMat& operator+=(const SymMat& other);
  SymMat& operator-=(const SymMat& other);
  SymMat& operator*=(double s);

  /// Frobenius inner product trace(AB).
  double dot(const SymMat& other) const;
  double frobenius_norm() const { return m_.norm(); }
  bool is_finite() const { return m_.allFinite(); }

  /// E^T A E for a rectangular E with E.rows() == dim().
  SymMat congruence(const Matrix& e) const;

 private:
  Matrix m_;
};

SymMat operator+(SymMat a, const SymMat& b);
SymMat operator-(SymMat a, const SymMat& b);
SymMat operator*(double s, SymMat a);

struct EigenDecomposition {
  Vector values;   // descending
  Matrix vectors;  // column k belongs to values(k)
};

/// Cyclic Jacobi eigendecomposition. Throws InvalidMatrix on non-finite input.
EigenDecomposition eig_sym(const SymMat& a);

struct CholeskyResult {
  std::optional<Matrix> lower;  // L with L L^T = A + shift I
  int failed_pivot = 0;         // 1-based, only meaningful when !lower
  bool ok() const { return lower.has_value(); }
};

/// Cholesky of A + shift I. A non-positive pivot is reported, not thrown.
CholeskyResult chol_psd(const Matrix& a, double shift = 0.0);
inline CholeskyResult chol_psd(const SymMat& a, double shift = 0.0) {
  return chol_psd(a.matrix(), shift);
}

/// Solves L L^T x = rhs for a lower factor from chol_psd.
Vector chol_solve(const Matrix& lower, const Vector& rhs);

/// Number of eigenvalues above rel_tol * max(lambda_max, 1e-12).
int numeric_rank(const SymMat& a, double rel_tol = 1e-6);
int numeric_rank(const Vector& eigenvalues, double rel_tol = 1e-6);

/// Symmetric PSD square root; negative eigenvalues are clipped to zero.
Matrix psd_sqrt(const SymMat& a);

}  // namespace deepsdp::linalg
