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

#include "deepsdp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "deepsdp/errors.hpp"

namespace deepsdp::linalg {

SymMat::SymMat(int dim) : m_(Matrix::Zero(dim, dim)) {
  if (dim < 1) throw InvalidMatrix("SymMat dimension must be >= 1");
}

SymMat::SymMat(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw InvalidMatrix("SymMat needs a non-empty square matrix, got " +
                        std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()));
  }
  m_ = 0.5 * (a + a.transpose());
}

SymMat SymMat::Identity(int dim) {
  SymMat s(dim);
  s.m_.setIdentity();
  return s;
}

SymMat SymMat::Diagonal(std::span<const double> diag) {
  SymMat s(static_cast<int>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i) s.m_(i, i) = diag[i];
  return s;
}

SymMat SymMat::Outer(const Vector& v) { return SymMat(Matrix(v * v.transpose())); }

void SymMat::set(int i, int j, double value) {
  m_(i, j) = value;
  m_(j, i) = value;
}

void SymMat::add(int i, int j, double value) {
  m_(i, j) += value;
  if (i != j) m_(j, i) += value;
}

SymMat& SymMat::operator+=(const SymMat& other) {
  m_ += other.m_;
  return *this;
}

SymMat& SymMat::operator-=(const SymMat& other) {
  m_ -= other.m_;
  return *this;
}

SymMat& SymMat::operator*=(double s) {
  m_ *= s;
  return *this;
}

double SymMat::dot(const SymMat& other) const {
  return (m_.array() * other.m_.array()).sum();
}

SymMat SymMat::congruence(const Matrix& e) const {
  if (e.rows() != dim()) {
    throw InvalidMatrix("congruence: factor has " + std::to_string(e.rows()) +
                        " rows, matrix has dim " + std::to_string(dim()));
  }
  return SymMat(Matrix(e.transpose() * m_ * e));
}

SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
SymMat operator*(double s, SymMat a) { return a *= s; }

EigenDecomposition eig_sym(const SymMat& sym) {
  if (!sym.is_finite()) throw InvalidMatrix("eig_sym: non-finite entry");
  const int n = sym.dim();
  Matrix a = sym.matrix();
  Matrix v = Matrix::Identity(n, n);

  const double scale = std::max(a.norm(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= 1e-16 * scale) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that annihilates a(p, q).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i) > a(j, j); });
  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (int k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

CholeskyResult chol_psd(const Matrix& a, double shift) {
  const auto n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j) + shift;
    for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return CholeskyResult{std::nullopt, static_cast<int>(j) + 1};
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return CholeskyResult{std::move(l), 0};
}

Vector chol_solve(const Matrix& lower, const Vector& rhs) {
  Vector y = lower.triangularView<Eigen::Lower>().solve(rhs);
  return lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

int numeric_rank(const Vector& eigenvalues, double rel_tol) {
  if (eigenvalues.size() == 0) return 0;
  const double threshold = rel_tol * std::max(eigenvalues.maxCoeff(), 1e-12);
  return static_cast<int>((eigenvalues.array() > threshold).count());
}

int numeric_rank(const SymMat& a, double rel_tol) {
  return numeric_rank(eig_sym(a).values, rel_tol);
}

Matrix psd_sqrt(const SymMat& a) {
  const auto ed = eig_sym(a);
  const Vector root = ed.values.cwiseMax(0.0).cwiseSqrt();
  return ed.vectors * root.asDiagonal() * ed.vectors.transpose();
}

}  // namespace deepsdp::linalg
