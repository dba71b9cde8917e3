// Copyright 2026 The peakembed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the License for the specific language governing permissions
// and limitations under the License.

#pragma once

#include <array>
#include <complex>
#include <initializer_list>
#include <vector>

#include "peakembed/error.hpp"

namespace peakembed {

using Complex = std::complex<double>;

/// Largest supported ambient dimension. Points are stored inline, so hot
/// loops over millions of boundary samples never touch the heap.
inline constexpr int kMaxDim = 4;

/// A point or tangent vector of C^n, 1 <= n <= kMaxDim.
class CVector {
 public:
  CVector() = default;
  explicit CVector(int n);
  CVector(std::initializer_list<Complex> entries);

  static CVector basis(int n, int k);

  int size() const { return n_; }

  Complex& operator[](int k) { return v_[k]; }
  const Complex& operator[](int k) const { return v_[k]; }

  Complex* begin() { return v_.data(); }
  Complex* end() { return v_.data() + n_; }
  const Complex* begin() const { return v_.data(); }
  const Complex* end() const { return v_.data() + n_; }

  CVector& operator+=(const CVector& o);
  CVector& operator-=(const CVector& o);
  CVector& operator*=(Complex c);
  CVector& operator*=(double c);
  CVector& operator/=(double c);

  friend CVector operator+(CVector a, const CVector& b) { return a += b; }
  friend CVector operator-(CVector a, const CVector& b) { return a -= b; }
  friend CVector operator-(CVector a) { return a *= -1.0; }
  friend CVector operator*(CVector a, Complex c) { return a *= c; }
  friend CVector operator*(Complex c, CVector a) { return a *= c; }
  friend CVector operator*(CVector a, double c) { return a *= c; }
  friend CVector operator*(double c, CVector a) { return a *= c; }
  friend CVector operator/(CVector a, double c) { return a /= c; }

  bool operator==(const CVector& o) const;

 private:
  std::array<Complex, kMaxDim> v_{};
  int n_ = 0;
};

/// Sum of a_k * conj(b_k): linear in the first slot, conjugate-linear in the second.
Complex hermitian_inner(const CVector& a, const CVector& b);

/// Re<a, b>, the Euclidean pairing of the underlying real vectors.
double real_inner(const CVector& a, const CVector& b);

double norm_sq(const CVector& a);
double norm(const CVector& a);
double distance_sq(const CVector& a, const CVector& b);
double distance(const CVector& a, const CVector& b);

/// Dense complex matrix, row-major. Used for Jacobians (rows = map components).
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Complex& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const Complex& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  /// J * v as a plain vector of length rows().
  std::vector<Complex> apply(const CVector& v) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Complex> data_;
};

/// Euclidean norm of a complex vector of arbitrary length.
double norm(const std::vector<Complex>& v);

}  // namespace peakembed
