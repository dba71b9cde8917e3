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

#include "peakembed/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "peakembed/rng.hpp"

namespace peakembed {
namespace {

constexpr double kPi = std::numbers::pi;

double sphere_area(int n) {
  // |S^{2n-1}| = 2 pi^n / (n-1)!
  double a = 2.0 * std::pow(kPi, n);
  for (int k = 2; k < n; ++k) a /= k;
  return a;
}

CVector random_unit(int n, Rng& rng) {
  CVector u(n);
  double nn = 0.0;
  do {
    for (int k = 0; k < n; ++k) u[k] = Complex(rng.normal(), rng.normal());
    nn = norm(u);
  } while (nn < 1e-12);
  return u / nn;
}

}  // namespace

ConvexDomain::ConvexDomain(int n, ScalarField rho, VectorField rho_grad, double diam, CVector interior)
    : n_(n), rho_(std::move(rho)), grad_(std::move(rho_grad)), diam_(diam), interior_(std::move(interior)) {
  if (n < 1 || n > kMaxDim) throw DimensionError("ConvexDomain: unsupported dimension " + std::to_string(n));
  if (!rho_) throw PreconditionError("ConvexDomain: defining function is empty");
  if (!(diam_ > 0.0)) throw PreconditionError("ConvexDomain: diameter must be positive");
  if (interior_.size() != n) throw DimensionError("ConvexDomain: interior point has wrong dimension");
  if (!(rho_(interior_) < 0.0)) throw PreconditionError("ConvexDomain: interior point is not inside the domain");
  spec_.kind = "custom";
  spec_.n = n;
  stretch_ = diam_ / 2.0;
  // Custom domains: estimate sup ||z|| on S by sampling rays.
  Rng rng(0x5eedu);
  double best = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const CVector u = random_unit(n_, rng);
    best = std::max(best, norm(interior_ + ray_exit(u) * u));
  }
  max_norm_ = best * (1.0 + 1e-3);
}

CVector ConvexDomain::gradient(const CVector& z) const {
  if (grad_) return grad_(z);
  return finite_difference_gradient(rho_, z, 1e-6 * diam_);
}

double ConvexDomain::ray_exit(const CVector& u) const {
  if (spec_.kind == "ball") return 1.0 / norm(u);
  if (spec_.kind == "ellipsoid") {
    double q = 0.0;
    for (int k = 0; k < n_; ++k) q += std::norm(u[k]) / (spec_.semiaxes[k] * spec_.semiaxes[k]);
    return 1.0 / std::sqrt(q);
  }
  const double un = norm(u);
  if (!(un > 0.0)) throw PreconditionError("ray_exit: zero direction");
  double lo = 0.0;
  double hi = diam_ / un;
  int guard = 0;
  while (rho_(interior_ + hi * u) <= 0.0) {
    hi *= 2.0;
    if (++guard > 60) throw ConvergenceError("ray_exit: domain appears unbounded along a ray");
  }
  for (int it = 0; it < 200 && (hi - lo) * un > 1e-15 * diam_; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (rho_(interior_ + mid * u) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CVector ConvexDomain::sphere_to_boundary(const CVector& unit) const {
  if (spec_.kind == "ball") return unit;
  if (spec_.kind == "ellipsoid") {
    CVector z(n_);
    for (int k = 0; k < n_; ++k) z[k] = spec_.semiaxes[k] * unit[k];
    return z;
  }
  return interior_ + ray_exit(unit) * unit;
}

DepthBounds ConvexDomain::depth_bounds(const CVector& z) const {
  if (spec_.kind == "ball") {
    const double d = std::max(0.0, 1.0 - norm(z));
    return {d, d};
  }
  if (spec_.kind == "ellipsoid") {
    double q = 0.0;
    for (int k = 0; k < n_; ++k) q += std::norm(z[k]) / (spec_.semiaxes[k] * spec_.semiaxes[k]);
    const double t = std::max(0.0, 1.0 - std::sqrt(q));
    const auto [amin, amax] = std::minmax_element(spec_.semiaxes.begin(), spec_.semiaxes.end());
    return {*amin * t, *amax * t};
  }
  return {};
}

ConvexDomain make_ball(int n) {
  ConvexDomain dom(
      n, [](const CVector& z) { return norm_sq(z) - 1.0; }, [](const CVector& z) { return 2.0 * z; }, 2.0,
      CVector(n));
  dom.spec_ = DomainSpec{"ball", n, {}};
  dom.stretch_ = 1.0;
  dom.max_norm_ = 1.0;
  return dom;
}

ConvexDomain make_ellipsoid(std::vector<double> semiaxes) {
  const int n = static_cast<int>(semiaxes.size());
  for (double a : semiaxes) {
    if (!(a > 0.0)) throw PreconditionError("make_ellipsoid: semiaxes must be positive");
  }
  std::vector<double> inv2(semiaxes.size());
  for (std::size_t k = 0; k < semiaxes.size(); ++k) inv2[k] = 1.0 / (semiaxes[k] * semiaxes[k]);
  const double amax = *std::max_element(semiaxes.begin(), semiaxes.end());
  ConvexDomain dom(
      n,
      [inv2](const CVector& z) {
        double q = 0.0;
        for (int k = 0; k < z.size(); ++k) q += std::norm(z[k]) * inv2[k];
        return q - 1.0;
      },
      [inv2](const CVector& z) {
        CVector g(z.size());
        for (int k = 0; k < z.size(); ++k) g[k] = 2.0 * inv2[k] * z[k];
        return g;
      },
      2.0 * amax, CVector(n));
  dom.spec_ = DomainSpec{"ellipsoid", n, std::move(semiaxes)};
  dom.stretch_ = amax;
  dom.max_norm_ = amax;
  return dom;
}

ConvexDomain make_domain(const DomainSpec& spec) {
  if (spec.kind == "ball") return make_ball(spec.n);
  if (spec.kind == "ellipsoid") return make_ellipsoid(spec.semiaxes);
  throw ConfigError("unknown domain kind '" + spec.kind + "'");
}

CVector finite_difference_gradient(const ConvexDomain::ScalarField& rho, const CVector& z, double step) {
  CVector g(z.size());
  for (int k = 0; k < z.size(); ++k) {
    CVector zp = z;
    CVector zm = z;
    zp[k] += step;
    zm[k] -= step;
    const double dx = (rho(zp) - rho(zm)) / (2.0 * step);
    zp = z;
    zm = z;
    zp[k] += Complex(0.0, step);
    zm[k] -= Complex(0.0, step);
    const double dy = (rho(zp) - rho(zm)) / (2.0 * step);
    g[k] = Complex(dx, dy);
  }
  return g;
}

CVector outward_normal(const ConvexDomain& dom, const CVector& w) {
  if (w.size() != dom.dim()) throw DimensionError("outward_normal: dimension mismatch");
  if (std::abs(dom.rho(w)) > dom.boundary_tolerance()) {
    throw PreconditionError("outward_normal: point is not on the boundary");
  }
  const CVector g = dom.gradient(w);
  const double gn = norm(g);
  if (!(gn > 1e-12)) throw PreconditionError("degenerate boundary point");
  return g / gn;
}

CVector project_to_boundary(const ConvexDomain& dom, CVector z) {
  const double target = 1e-3 * dom.boundary_tolerance();
  for (int it = 0; it < 100; ++it) {
    const double r = dom.rho(z);
    if (std::abs(r) <= target) return z;
    const CVector g = dom.gradient(z);
    const double gg = norm_sq(g);
    if (!(gg > 0.0)) throw ConvergenceError("project_to_boundary: vanishing gradient");
    z -= (r / gg) * g;
  }
  if (std::abs(dom.rho(z)) <= dom.boundary_tolerance()) return z;
  throw ConvergenceError("project_to_boundary: Newton iteration did not converge");
}

CVector closest_boundary_point(const ConvexDomain& dom, const CVector& z) {
  if (dom.spec().kind == "ball") {
    const double zn = norm(z);
    if (zn > 1e-300) return z / zn;
    return CVector::basis(dom.dim(), 0);
  }
  CVector w = project_to_boundary(dom, z);
  for (int it = 0; it < 200; ++it) {
    const CVector nu = outward_normal(dom, w);
    const double d = real_inner(w - z, nu);
    const CVector next = project_to_boundary(dom, z + d * nu);
    const double step = distance(next, w);
    w = next;
    if (step < 1e-14 * dom.diam()) break;
  }
  return w;
}

double boundary_distance(const ConvexDomain& dom, const CVector& z) {
  if (dom.spec().kind == "ball") return std::abs(1.0 - norm(z));
  return distance(z, closest_boundary_point(dom, z));
}

std::vector<CVector> sample_boundary(const ConvexDomain& dom, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw PreconditionError("sample_boundary: count must be >= 1");
  Rng rng(seed);
  std::vector<CVector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    CVector z = dom.sphere_to_boundary(random_unit(dom.dim(), rng));
    if (std::abs(dom.rho(z)) > 1e-3 * dom.boundary_tolerance()) z = project_to_boundary(dom, z);
    out.push_back(z);
  }
  return out;
}

std::vector<CVector> sample_interior(const ConvexDomain& dom, std::size_t count, std::uint64_t seed,
                                     double margin) {
  Rng rng(seed);
  std::vector<CVector> out;
  out.reserve(count);
  const double dim_real = 2.0 * dom.dim();
  for (std::size_t i = 0; i < count; ++i) {
    const CVector u = random_unit(dom.dim(), rng);
    const double t = std::pow(rng.uniform(), 1.0 / dim_real) * (1.0 - margin);
    out.push_back(dom.interior_point() + (t * dom.ray_exit(u)) * u);
  }
  return out;
}

void PointCloud::push_back(const CVector& z) {
  if (z.size() != n_) throw DimensionError("PointCloud::push_back: dimension mismatch");
  for (int k = 0; k < n_; ++k) {
    xy_.push_back(z[k].real());
    xy_.push_back(z[k].imag());
  }
}

CVector PointCloud::operator[](std::size_t i) const {
  CVector z(n_);
  const double* p = raw(i);
  for (int k = 0; k < n_; ++k) z[k] = Complex(p[2 * k], p[2 * k + 1]);
  return z;
}

std::vector<CVector> PointCloud::to_vector() const {
  std::vector<CVector> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i]);
  return out;
}

PointCloud PointCloud::from_vector(int n, const std::vector<CVector>& pts) {
  PointCloud pc(n);
  pc.reserve(pts.size());
  for (const CVector& z : pts) pc.push_back(z);
  return pc;
}

namespace {

// Unit-sphere nets, spacing h measured on the unit sphere.
template <class Emit>
void unit_sphere_net(int n, double h, std::uint64_t seed, Emit&& emit) {
  Rng rng(seed);
  if (n == 1) {
    const auto m = static_cast<std::size_t>(std::max(8.0, std::ceil(2.0 * kPi / h)));
    const double phase = rng.uniform() * 2.0 * kPi / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double t = phase + 2.0 * kPi * static_cast<double>(j) / static_cast<double>(m);
      emit(CVector{Complex(std::cos(t), std::sin(t))});
    }
    return;
  }
  if (n == 2) {
    const int rows = std::max(2, static_cast<int>(std::ceil(0.5 * kPi / h)));
    const double deta = 0.5 * kPi / rows;
    for (int a = 0; a < rows; ++a) {
      const double eta = (a + 0.5) * deta;
      const double c = std::cos(eta);
      const double s = std::sin(eta);
      const int n1 = std::max(1, static_cast<int>(std::ceil(2.0 * kPi * c / h)));
      const int n2 = std::max(1, static_cast<int>(std::ceil(2.0 * kPi * s / h)));
      const double o1 = rng.uniform() * 2.0 * kPi / n1;
      const double o2 = rng.uniform() * 2.0 * kPi / n2;
      for (int b = 0; b < n1; ++b) {
        const double x1 = o1 + 2.0 * kPi * b / n1;
        const Complex z1 = c * Complex(std::cos(x1), std::sin(x1));
        for (int e = 0; e < n2; ++e) {
          const double x2 = o2 + 2.0 * kPi * e / n2;
          emit(CVector{z1, s * Complex(std::cos(x2), std::sin(x2))});
        }
      }
    }
    return;
  }
  const auto count = static_cast<std::size_t>(std::ceil(sphere_area(n) / std::pow(h, 2 * n - 1)));
  for (std::size_t i = 0; i < count; ++i) emit(random_unit(n, rng));
}

}  // namespace

void for_each_net_point(const ConvexDomain& dom, double spacing, std::uint64_t seed,
                        const std::function<void(const CVector&)>& visit) {
  if (!(spacing > 0.0)) throw PreconditionError("boundary_net: spacing must be positive");
  const double h = spacing / dom.sphere_stretch();
  const bool exact = dom.spec().kind == "ball";
  unit_sphere_net(dom.dim(), h, seed, [&](const CVector& u) {
    CVector z = dom.sphere_to_boundary(u);
    if (!exact && std::abs(dom.rho(z)) > 1e-3 * dom.boundary_tolerance()) z = project_to_boundary(dom, z);
    visit(z);
  });
}

PointCloud boundary_net(const ConvexDomain& dom, double spacing, std::uint64_t seed) {
  PointCloud pc(dom.dim());
  pc.reserve(boundary_net_size(dom, spacing));
  for_each_net_point(dom, spacing, seed, [&](const CVector& z) { pc.push_back(z); });
  return pc;
}

double net_spacing_for_radius(const ConvexDomain& dom, double radius) {
  return radius / net_covering_radius(dom, 1.0);
}

double net_covering_radius(const ConvexDomain& dom, double spacing) {
  if (dom.dim() == 1) return 0.5 * spacing;
  if (dom.dim() == 2) return 0.9 * spacing;
  return spacing;
}

std::size_t boundary_net_size(const ConvexDomain& dom, double spacing) {
  const double h = spacing / dom.sphere_stretch();
  const int n = dom.dim();
  if (n == 1) return static_cast<std::size_t>(std::max(8.0, std::ceil(2.0 * kPi / h)));
  if (n == 2) {
    const int rows = std::max(2, static_cast<int>(std::ceil(0.5 * kPi / h)));
    const double deta = 0.5 * kPi / rows;
    std::size_t total = 0;
    for (int a = 0; a < rows; ++a) {
      const double eta = (a + 0.5) * deta;
      const auto n1 = static_cast<std::size_t>(std::max(1.0, std::ceil(2.0 * kPi * std::cos(eta) / h)));
      const auto n2 = static_cast<std::size_t>(std::max(1.0, std::ceil(2.0 * kPi * std::sin(eta) / h)));
      total += n1 * n2;
    }
    return total;
  }
  return static_cast<std::size_t>(std::ceil(sphere_area(n) / std::pow(h, 2 * n - 1)));
}

double boundary_measure_bound(const ConvexDomain& dom) {
  const int n = dom.dim();
  return sphere_area(n) * std::pow(dom.sphere_stretch(), 2 * n - 1);
}

}  // namespace peakembed
