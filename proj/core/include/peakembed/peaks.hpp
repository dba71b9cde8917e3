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

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "peakembed/constants.hpp"
#include "peakembed/covering.hpp"
#include "peakembed/spatial.hpp"

namespace peakembed {

/// Terms with alpha1 m |z - c|^2 above this are dropped; each is below e^-60.
inline constexpr double kPruneThreshold = 60.0;

/// phi(z) = exp(-m <c - z, nu>) for a boundary center c with unit normal nu.
struct PeakFunction {
  CVector center;
  CVector normal;
  double m = 0.0;
};

Complex peak_eval(const PeakFunction& pk, const CVector& z);

/// Holomorphic gradient: component k is m conj(nu_k) phi(z).
CVector peak_grad(const PeakFunction& pk, const CVector& z);

/// g(z) = sum_j beta_j phi_j(z) over one family.
class PeakSum {
 public:
  PeakSum(int n, double m, double alpha1, double r1);

  void add(const CVector& center, const CVector& normal, Complex beta);

  std::size_t size() const { return coeffs_.size(); }
  double m() const { return m_; }
  double alpha1() const { return alpha1_; }
  double r1() const { return r1_; }
  PeakFunction peak(std::size_t j) const { return {centers_[j], normals_[j], m_}; }
  Complex coeff(std::size_t j) const { return coeffs_[j]; }

 private:
  int n_;
  double m_;
  double alpha1_;
  double r1_;
  std::vector<CVector> centers_;
  std::vector<CVector> normals_;
  std::vector<Complex> coeffs_;
};

/// Sum with pruning. The pointwise bound |phi| <= exp(-alpha1 m |z - c|^2)
/// only holds in the collar, so pruning by distance needs depth.hi < r1;
/// when m depth.lo >= threshold every term is below e^-threshold and the
/// sum is dropped. Otherwise all terms are summed.
Complex sum_eval(const PeakSum& g, const CVector& z, const DepthBounds& depth,
                 double prune_threshold = kPruneThreshold);

/// Every term, no pruning.
Complex sum_eval_naive(const PeakSum& g, const CVector& z);

/// All 2s sums of one stage evaluated together. Family i + s shares its
/// centers with family i, so each exponential is computed once.
class PeakField {
 public:
  PeakField() = default;
  /// coeffs[i][j] is beta_{i,j} for 0 <= i < 2s and j < N_(i mod s).
  PeakField(const Covering& cov, double m, std::vector<std::vector<Complex>> coeffs, double alpha1, double r1,
            double prune_threshold = kPruneThreshold);

  int dim() const { return n_; }
  int s() const { return s_; }
  int components() const { return 2 * s_; }
  double m() const { return m_; }
  double alpha1() const { return alpha1_; }
  double r1() const { return r1_; }
  double prune_threshold() const { return prune_; }
  /// Distance beyond which a collar term is below e^-threshold.
  double prune_radius() const { return prune_radius_; }
  std::size_t center_count() const { return family_.size(); }

  const PointCloud& centers() const { return centers_; }
  CVector normal(std::size_t c) const { return normals_[c]; }
  int family_of(std::size_t c) const { return family_[c]; }
  /// beta for component i (0 <= i < 2s) at global center c; zero unless
  /// i mod s is the family of c.
  Complex coeff(std::size_t c, int i) const;
  const std::vector<std::vector<Complex>>& coeffs() const { return coeffs_; }

  Complex phi(std::size_t c, const CVector& z) const;

  /// out[i] += g_i(z) for i < 2s.
  void add_values(const CVector& z, const DepthBounds& depth, Complex* out) const;
  /// jac(row0 + i, k) += d g_i / d z_k; values are added to `out` when non-null.
  void add_jacobian(const CVector& z, const DepthBounds& depth, CMatrix& jac, int row0, Complex* out = nullptr) const;

  /// Family i (0 <= i < 2s) as a standalone sum.
  PeakSum sum(int i) const;

  /// Global center indices within `radius` of z, ascending.
  std::vector<std::uint32_t> centers_within(const CVector& z, double radius) const;

 private:
  enum class Mode { kNone, kGrid, kAll };
  Mode mode(const DepthBounds& depth) const;
  template <class Visit>
  void visit_terms(const CVector& z, const DepthBounds& depth, Visit&& visit) const;

  int n_ = 1;
  int s_ = 0;
  double m_ = 0.0;
  double alpha1_ = 0.0;
  double r1_ = 0.0;
  double prune_ = kPruneThreshold;
  double prune_radius_ = 0.0;
  PointCloud centers_;
  std::vector<CVector> normals_;
  std::vector<CVector> conj_normals_;
  std::vector<int> family_;
  std::vector<std::uint32_t> local_;
  std::vector<Complex> beta_lo_;  // component family_[c]
  std::vector<Complex> beta_hi_;  // component family_[c] + s
  std::vector<std::vector<Complex>> coeffs_;
  SpatialGrid grid_;
};

struct PeakParams {
  double eta = 0.0;
  double m = 0.0;
  double r = 0.0;
  double C2 = 0.0;
  double C = 0.0;   // C2^(-1/16)
  double mu = 0.0;  // lambda sqrt(5/6)
  double alpha2 = 0.0;
  double lambda = 0.0;
  int halvings = 0;

  /// 16 alpha2 m r^2.
  double beta() const { return 16.0 * alpha2 * m * r * r; }
};

/// m r^2 = ln(C2 / eta) / (16 alpha2).
double mr2_for(double eta, double alpha2, double C2);

/// Starts at r = r_max with m from the relation above, then halves r (m
/// quadruples) while `check` returns a nonempty failure name. Throws
/// ConvergenceError after `max_halvings`.
PeakParams choose_params(double eta, double alpha2, double C2, double r_max, double lambda,
                         const std::function<std::string(const PeakParams&)>& check = {}, int max_halvings = 20);

/// (beta, beta') perpendicular to (fi, fis) with |beta|^2 + |beta'|^2 = (a^2 - |F|^2) / (2s).
std::pair<Complex, Complex> solve_coefficients(Complex fi, Complex fis, double a, double norm_F_center, int s);

/// Twice the largest value over `samples` of sum_j |phi_ij(z)| e^beta, summed
/// over centers at distance >= lambda r from z, with m set so that beta = 4/3.
/// Every exponent -m (Re<c - z, nu> - 16 alpha2 r^2) is nonpositive for those
/// centers, so the value bounds the same quantity at every larger beta.
double estimate_C2(const Covering& cov, const PointCloud& samples, const DomainConstants& c, double safety = 2.0);

struct ClauseMargin {
  double margin = std::numeric_limits<double>::infinity();  // threshold slack at the worst sample
  double worst_value = 0.0;
  std::size_t samples = 0;
  std::size_t violations = 0;
  int family = -1;
  CVector worst_point;

  bool passed() const { return violations == 0; }
  /// A sample violates when slack <= 0 (strict) or slack < 0.
  void record(double value, double slack, int fam, const CVector& z, bool strict = true);
};

/// Peak sum conclusions for every family i < 2s:
///   (a) |g_i| < eta on S outside every lambda r ball of family i,
///   (b) |g_i - beta_ij phi_ij| < eta on the closure inside B(c_ij, lambda r),
///   (c) |phi_ij| >= C eta^(1/16) on S inside B(c_ij, r),
///   (d) |phi_ij| < eta^(2/3) on the closure on the sphere of radius lambda r about c_ij.
struct PeakClauseReport {
  ClauseMargin a;
  ClauseMargin b;
  ClauseMargin c;
  ClauseMargin d;

  bool passed() const { return a.passed() && b.passed() && c.passed() && d.passed(); }
  /// "a", "b", "c" or "d" for the first failing clause, empty when all pass.
  std::string failed_clause() const;
};

struct PeakClauseOptions {
  std::size_t rim_points = 256;          // per center, for (d)
  std::size_t interior_per_center = 32;  // boundary points pushed inward per center, for (b)
  int depth_levels = 9;                  // depths r 10^(-l/2), l < depth_levels, for (b)
  std::uint64_t seed = 0;
};

/// `boundary_net` lies on S; `interior_shell` holds extra points of the
/// closure tested against (b).
PeakClauseReport check_peak_clauses(const ConvexDomain& dom, const Covering& cov, const PeakField& field,
                                    const PeakParams& params, const PointCloud& boundary_net,
                                    const std::vector<CVector>& interior_shell, const PeakClauseOptions& opts = {});

}  // namespace peakembed
