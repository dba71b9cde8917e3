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

#include <memory>
#include <string>
#include <vector>

#include "peakembed/covering.hpp"
#include "peakembed/domain.hpp"
#include "peakembed/peaks.hpp"

namespace peakembed {

/// Built-in initial maps h.
///   "scaled-identity":      h(z) = factor z,               p = n
///   "coordinate-embedding": h(z) = factor (z, z_1^2),      p = n + 1
struct InitialMapSpec {
  std::string kind = "scaled-identity";
  double factor = 0.5;
};

class InitialMap {
 public:
  InitialMap() = default;
  InitialMap(const InitialMapSpec& spec, const ConvexDomain& dom);

  const InitialMapSpec& spec() const { return spec_; }
  int p() const { return p_; }
  int n() const { return n_; }
  /// Upper bound on sup_S |h|.
  double sup_S_norm() const { return sup_; }

  void eval(const CVector& z, Complex* out) const;
  std::vector<Complex> eval(const CVector& z) const;
  /// Writes the p x n Jacobian into rows row0.. of jac.
  void jac(const CVector& z, CMatrix& jac, int row0) const;
  CMatrix jac(const CVector& z) const;

 private:
  InitialMapSpec spec_;
  int n_ = 1;
  int p_ = 1;
  double sup_ = 0.0;
};

/// One boosting step: the added map G = (g_1, ..., g_2s, 0, ..., 0).
struct Stage {
  int k = 0;
  double a = 0.0;
  double eps = 0.0;
  double delta = 0.0;  // bound required on K for this step
  PeakParams params;
  Covering covering;
  PeakField field;
  double coefficient_residual = 0.0;  // worst error in the orthogonality and norm identities
};

/// F_k = (0, ..., 0, h) + sum of the stage maps.
class MapState {
 public:
  MapState(ConvexDomain dom, InitialMap h, int s);

  const ConvexDomain& domain() const { return dom_; }
  const InitialMap& h() const { return h_; }
  int s() const { return s_; }
  int n() const { return dom_.dim(); }
  int components() const { return 2 * s_ + h_.p(); }
  std::size_t stage_count() const { return stages_.size(); }
  const Stage& stage(std::size_t i) const { return *stages_[i]; }

  void add_stage(std::shared_ptr<const Stage> st);
  /// The state after the first k stages (shares stage storage).
  MapState truncated(std::size_t k) const;

  void eval(const CVector& z, Complex* out) const;
  std::vector<Complex> eval(const CVector& z) const;
  /// Jacobian with values written to `values` when non-null.
  CMatrix jac(const CVector& z, std::vector<Complex>* values = nullptr) const;

  /// G_k(z) for stage index i (components 0..2s-1 only).
  std::vector<Complex> stage_values(std::size_t i, const CVector& z) const;

 private:
  ConvexDomain dom_;
  InitialMap h_;
  int s_;
  std::vector<std::shared_ptr<const Stage>> stages_;
};

std::vector<Complex> map_eval(const MapState& F, const CVector& z);
CMatrix map_jac(const MapState& F, const CVector& z);

/// Every stage term summed without pruning.
std::vector<Complex> map_eval_naive(const MapState& F, const CVector& z);

}  // namespace peakembed
