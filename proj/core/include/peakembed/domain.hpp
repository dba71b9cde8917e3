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
#include <optional>
#include <string>
#include <vector>

#include "peakembed/cvector.hpp"

namespace peakembed {

/// Serializable description of a built-in domain ("ball", "ellipsoid") or "custom".
struct DomainSpec {
  std::string kind = "custom";
  int n = 1;
  std::vector<double> semiaxes;  // ellipsoid only; one per complex coordinate
};

/// Lower/upper bounds on dist(z, S) for a point of the closure.
struct DepthBounds {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

/// A bounded strictly convex domain D = {rho < 0} in C^n.
///
/// The gradient convention packs the real gradient of rho into a complex
/// vector: component k is d(rho)/dx_k + i d(rho)/dy_k. With this convention
/// Re<v, grad> is the directional derivative of rho along v.
class ConvexDomain {
 public:
  using ScalarField = std::function<double(const CVector&)>;
  using VectorField = std::function<CVector(const CVector&)>;

  /// `rho_grad` may be empty, in which case central differences with step
  /// 1e-6 * diam are used. `interior` must satisfy rho(interior) < 0.
  ConvexDomain(int n, ScalarField rho, VectorField rho_grad, double diam, CVector interior);

  int dim() const { return n_; }
  double diam() const { return diam_; }
  const CVector& interior_point() const { return interior_; }
  const DomainSpec& spec() const { return spec_; }

  double rho(const CVector& z) const { return rho_(z); }
  CVector gradient(const CVector& z) const;

  /// Tolerance on |rho| for membership in S.
  double boundary_tolerance() const { return 1e-8 * diam_; }

  /// t > 0 with rho(interior + t u) = 0.
  double ray_exit(const CVector& u) const;

  /// Boundary point reached from the unit sphere of C^n: the linear image for
  /// built-in domains, the radial image from the interior point otherwise.
  CVector sphere_to_boundary(const CVector& unit) const;

  /// Upper bound on how much sphere_to_boundary stretches distances.
  double sphere_stretch() const { return stretch_; }

  DepthBounds depth_bounds(const CVector& z) const;

  /// sup of ||z|| over S.
  double max_boundary_norm() const { return max_norm_; }

 private:
  friend ConvexDomain make_ball(int n);
  friend ConvexDomain make_ellipsoid(std::vector<double> semiaxes);

  int n_;
  ScalarField rho_;
  VectorField grad_;
  double diam_;
  CVector interior_;
  DomainSpec spec_;
  double stretch_ = 1.0;
  double max_norm_ = 0.0;
};

/// The unit ball of C^n, rho(z) = ||z||^2 - 1.
ConvexDomain make_ball(int n);

/// {sum |z_k|^2 / a_k^2 < 1}.
ConvexDomain make_ellipsoid(std::vector<double> semiaxes);

ConvexDomain make_domain(const DomainSpec& spec);

CVector finite_difference_gradient(const ConvexDomain::ScalarField& rho, const CVector& z, double step);

/// Outward unit normal at a boundary point.
CVector outward_normal(const ConvexDomain& dom, const CVector& w);

/// Newton iteration along the gradient onto {rho = 0}.
CVector project_to_boundary(const ConvexDomain& dom, CVector z);

/// Foot point of z on S (the boundary point w with z - w parallel to the normal at w).
CVector closest_boundary_point(const ConvexDomain& dom, const CVector& z);

/// dist(z, S) through closest_boundary_point, using closed forms for the ball.
double boundary_distance(const ConvexDomain& dom, const CVector& z);

/// Random boundary points (Gaussian directions pushed to S), deterministic in `seed`.
std::vector<CVector> sample_boundary(const ConvexDomain& dom, std::size_t count, std::uint64_t seed);

/// Uniformly distributed random points of D, kept at least `margin` inside along rays.
std::vector<CVector> sample_interior(const ConvexDomain& dom, std::size_t count, std::uint64_t seed,
                                     double margin = 1e-3);

/// Flat storage for large point sets: 2n doubles per point.
class PointCloud {
 public:
  explicit PointCloud(int n = 1) : n_(n) {}

  int dim() const { return n_; }
  std::size_t size() const { return xy_.size() / (2 * static_cast<std::size_t>(n_)); }
  bool empty() const { return xy_.empty(); }
  void reserve(std::size_t count) { xy_.reserve(count * 2 * n_); }
  void push_back(const CVector& z);
  CVector operator[](std::size_t i) const;
  const double* raw(std::size_t i) const { return xy_.data() + i * 2 * n_; }

  std::vector<CVector> to_vector() const;
  static PointCloud from_vector(int n, const std::vector<CVector>& pts);

 private:
  int n_;
  std::vector<double> xy_;
};

/// Quasi-uniform boundary net with expected covering radius at most
/// net_covering_radius(dom, spacing). Structured for n = 1, 2 (equal-angle
/// circle, Hopf-coordinate grid on S^3); random for n >= 3. The seed only
/// moves the grid phases.
PointCloud boundary_net(const ConvexDomain& dom, double spacing, std::uint64_t seed);

/// Streams the points of boundary_net(dom, spacing, seed) without storing them.
void for_each_net_point(const ConvexDomain& dom, double spacing, std::uint64_t seed,
                        const std::function<void(const CVector&)>& visit);

/// Spacing whose net has covering radius `radius`.
double net_spacing_for_radius(const ConvexDomain& dom, double radius);

/// Covering radius of boundary_net(dom, spacing) (empirically validated for n = 2).
double net_covering_radius(const ConvexDomain& dom, double spacing);

/// Number of points boundary_net(dom, spacing) would produce, without building it.
std::size_t boundary_net_size(const ConvexDomain& dom, double spacing);

/// (2n-1)-dimensional measure of S estimated from the unit sphere and stretch.
double boundary_measure_bound(const ConvexDomain& dom);

}  // namespace peakembed
