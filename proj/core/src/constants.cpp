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

#include "peakembed/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "peakembed/rng.hpp"

namespace peakembed {
namespace {

struct Pair {
  CVector z;
  CVector w;
  CVector nu;
  double depth = 0.0;  // dist(z, S); 0 for boundary pairs
};

CVector gaussian_direction(int n, Rng& rng) {
  CVector u(n);
  for (int k = 0; k < n; ++k) u[k] = Complex(rng.normal(), rng.normal());
  return u;
}

CVector boundary_along(const ConvexDomain& dom, const CVector& target) {
  CVector dir = target - dom.interior_point();
  if (norm(dir) < 1e-12 * dom.diam()) dir = CVector::basis(dom.dim(), 0);
  CVector z = dom.interior_point() + dom.ray_exit(dir) * dir;
  if (std::abs(dom.rho(z)) > 1e-3 * dom.boundary_tolerance()) z = project_to_boundary(dom, z);
  return z;
}

// Half the partners are uniform on S, half are local (log-uniform distance
// down to 1e-3 diam) so the near-diagonal curvature limit is sampled too.
CVector partner(const ConvexDomain& dom, const CVector& w, Rng& rng) {
  if (rng.uniform() < 0.5) {
    return boundary_along(dom, dom.interior_point() + gaussian_direction(dom.dim(), rng));
  }
  CVector u = gaussian_direction(dom.dim(), rng);
  u /= norm(u);
  const double t = 0.5 * dom.diam() * std::pow(10.0, rng.uniform(-3.0, 0.0));
  return boundary_along(dom, w + t * u);
}

std::vector<Pair> make_pairs(const ConvexDomain& dom, std::size_t count, std::uint64_t seed, double collar,
                             bool boundary) {
  Rng rng(seed);
  std::vector<Pair> out;
  out.reserve(count);
  // rho is only known to an ulp, so the ratio of a pair at distance t carries a
  // relative error of about 1e-16 / t^2; closer pairs measure rounding, not
  // curvature. Local partners aim for 1e-3 diam and up; the projection back to
  // S can pull them closer, and those are dropped below half that floor.
  const double tol = 5e-4 * dom.diam();
  while (out.size() < count) {
    const CVector w = boundary_along(dom, dom.interior_point() + gaussian_direction(dom.dim(), rng));
    const CVector nu = outward_normal(dom, w);
    CVector z = partner(dom, w, rng);
    double depth = 0.0;
    if (!boundary) {
      const double d = collar * rng.uniform();
      z -= d * outward_normal(dom, z);
      if (dom.rho(z) > 0.0) continue;
      depth = boundary_distance(dom, z);
    }
    if (distance(z, w) <= tol) continue;
    out.push_back({z, w, nu, depth});
  }
  return out;
}

double initial_r1(const ConvexDomain& dom) { return std::min(0.49, 0.25 * dom.diam()); }

}  // namespace

double convexity_ratio(const CVector& z, const CVector& w, const CVector& nu_w) {
  return real_inner(w - z, nu_w) / distance_sq(z, w);
}

double lambda_of(const DomainConstants& c) {
  if (!(c.alpha1 > 0.0) || !(c.alpha2 > 0.0)) throw PreconditionError("lambda_of: constants must be positive");
  return 4.0 * std::sqrt(c.alpha2 / c.alpha1);
}

DomainConstants estimate_constants(const ConvexDomain& dom, std::size_t sample_count, std::uint64_t seed,
                                   double margin) {
  if (sample_count < 1000) throw PreconditionError("estimate_constants: sample_count must be >= 1000");
  if (!(margin >= 0.0 && margin < 1.0)) throw PreconditionError("estimate_constants: margin must lie in [0, 1)");

  double r1 = initial_r1(dom);
  const auto boundary = make_pairs(dom, sample_count, derive_seed(seed, Stream::kConstants, 0, 1), r1, true);
  const auto collar = make_pairs(dom, sample_count, derive_seed(seed, Stream::kConstants, 0, 2), r1, false);
  const auto check = make_pairs(dom, sample_count, derive_seed(seed, Stream::kConstants, 0, 3), r1, false);

  double max_s = -std::numeric_limits<double>::infinity();
  double min_s = std::numeric_limits<double>::infinity();
  for (const Pair& p : boundary) {
    const double q = convexity_ratio(p.z, p.w, p.nu);
    max_s = std::max(max_s, q);
    min_s = std::min(min_s, q);
  }
  if (!(min_s > 0.0)) throw PreconditionError("domain fails strict convexity test");

  DomainConstants c;
  c.alpha2 = (1.0 + margin) * max_s;
  for (int halving = 0; halving < 40; ++halving) {
    double min_c = min_s;
    for (const Pair& p : collar) {
      if (p.depth < r1) min_c = std::min(min_c, convexity_ratio(p.z, p.w, p.nu));
    }
    if (!(min_c > 0.0)) throw PreconditionError("domain fails strict convexity test");
    c.alpha1 = (1.0 - margin) * min_c;
    bool ok = true;
    for (const Pair& p : check) {
      if (p.depth < r1 && convexity_ratio(p.z, p.w, p.nu) < c.alpha1) {
        ok = false;
        break;
      }
    }
    if (ok) break;
    r1 *= 0.5;
  }
  c.r1 = r1;
  c.lambda = lambda_of(c);

  double gamma = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < std::min<std::size_t>(boundary.size(), 1000); ++i) {
    const CVector& w = boundary[i].w;
    gamma = std::min(gamma, -dom.rho(w - r1 * boundary[i].nu));
  }
  c.gamma1 = (1.0 - margin) * std::max(gamma, 0.0);
  return c;
}

ConstantsReport validate_constants(const ConvexDomain& dom, const DomainConstants& c, std::size_t pair_count,
                                   std::uint64_t seed) {
  ConstantsReport rep;
  const auto boundary = make_pairs(dom, pair_count, derive_seed(seed, Stream::kValidation, 0, 1), c.r1, true);
  const auto collar = make_pairs(dom, pair_count, derive_seed(seed, Stream::kValidation, 0, 2), c.r1, false);
  rep.max_boundary_ratio = -std::numeric_limits<double>::infinity();
  rep.min_boundary_ratio = std::numeric_limits<double>::infinity();
  rep.min_collar_ratio = std::numeric_limits<double>::infinity();
  for (const Pair& p : boundary) {
    const double q = convexity_ratio(p.z, p.w, p.nu);
    rep.max_boundary_ratio = std::max(rep.max_boundary_ratio, q);
    rep.min_boundary_ratio = std::min(rep.min_boundary_ratio, q);
    if (q > c.alpha2) ++rep.upper_violations;
    if (q < c.alpha1) ++rep.lower_violations;
  }
  rep.boundary_pairs = boundary.size();
  for (const Pair& p : collar) {
    if (!(p.depth < c.r1)) continue;
    ++rep.collar_pairs;
    const double q = convexity_ratio(p.z, p.w, p.nu);
    rep.min_collar_ratio = std::min(rep.min_collar_ratio, q);
    if (q < c.alpha1) ++rep.lower_violations;
  }
  return rep;
}

}  // namespace peakembed
