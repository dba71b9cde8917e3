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

#include "peakembed/cvector.hpp"

#include <cmath>
#include <string>

namespace peakembed {

CVector::CVector(int n) : n_(n) {
  if (n < 1 || n > kMaxDim) {
    throw DimensionError("CVector dimension " + std::to_string(n) + " outside [1, " +
                         std::to_string(kMaxDim) + "]");
  }
}

CVector::CVector(std::initializer_list<Complex> entries) : CVector(static_cast<int>(entries.size())) {
  int k = 0;
  for (const Complex& c : entries) v_[k++] = c;
}

CVector CVector::basis(int n, int k) {
  CVector e(n);
  e[k] = 1.0;
  return e;
}

CVector& CVector::operator+=(const CVector& o) {
  if (o.n_ != n_) throw DimensionError("CVector addition: dimension mismatch");
  for (int k = 0; k < n_; ++k) v_[k] += o.v_[k];
  return *this;
}

CVector& CVector::operator-=(const CVector& o) {
  if (o.n_ != n_) throw DimensionError("CVector subtraction: dimension mismatch");
  for (int k = 0; k < n_; ++k) v_[k] -= o.v_[k];
  return *this;
}

CVector& CVector::operator*=(Complex c) {
  for (int k = 0; k < n_; ++k) v_[k] *= c;
  return *this;
}

CVector& CVector::operator*=(double c) {
  for (int k = 0; k < n_; ++k) v_[k] *= c;
  return *this;
}

CVector& CVector::operator/=(double c) {
  for (int k = 0; k < n_; ++k) v_[k] /= c;
  return *this;
}

bool CVector::operator==(const CVector& o) const {
  if (o.n_ != n_) return false;
  for (int k = 0; k < n_; ++k) {
    if (v_[k] != o.v_[k]) return false;
  }
  return true;
}

Complex hermitian_inner(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw DimensionError("hermitian_inner: dimension mismatch");
  Complex acc = 0.0;
  for (int k = 0; k < a.size(); ++k) acc += a[k] * std::conj(b[k]);
  return acc;
}

double real_inner(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw DimensionError("real_inner: dimension mismatch");
  double acc = 0.0;
  for (int k = 0; k < a.size(); ++k) acc += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
  return acc;
}

double norm_sq(const CVector& a) {
  double acc = 0.0;
  for (const Complex& c : a) acc += std::norm(c);
  return acc;
}

double norm(const CVector& a) { return std::sqrt(norm_sq(a)); }

double distance_sq(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw DimensionError("distance: dimension mismatch");
  double acc = 0.0;
  for (int k = 0; k < a.size(); ++k) acc += std::norm(a[k] - b[k]);
  return acc;
}

double distance(const CVector& a, const CVector& b) { return std::sqrt(distance_sq(a, b)); }

std::vector<Complex> CMatrix::apply(const CVector& v) const {
  if (v.size() != cols_) throw DimensionError("CMatrix::apply: dimension mismatch");
  std::vector<Complex> out(rows_);
  for (int i = 0; i < rows_; ++i) {
    Complex acc = 0.0;
    for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

double norm(const std::vector<Complex>& v) {
  double acc = 0.0;
  for (const Complex& c : v) acc += std::norm(c);
  return std::sqrt(acc);
}

}  // namespace peakembed
