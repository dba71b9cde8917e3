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

#include "peakembed/compacts.hpp"

#include <algorithm>
#include <cmath>

#include "peakembed/rng.hpp"

namespace peakembed {

bool CompactSet::contains(const ConvexDomain& dom, const CVector& z) const {
  return dom.rho(z) < 0.0 && boundary_distance(dom, z) >= depth;
}

Compacts choose_compacts(const ConvexDomain& dom, int k, const std::function<double(const CVector&)>& norm_F,
                         double min_S_norm, std::uint64_t seed, const CompactOptions& opts, double prev_K_depth) {
  if (k < 1) throw PreconditionError("choose_compacts: k must be >= 1");
  if (!(opts.kappa_K > 0.0 && opts.kappa_K < opts.kappa_L)) {
    throw PreconditionError("choose_compacts: need 0 < kappa_K < kappa_L");
  }
  const double level = opts.d0_fraction * dom.diam() * std::pow(0.5, k - 1);
  Compacts out;
  out.L.depth = level * opts.kappa_L;
  out.K.depth = std::min(level * opts.kappa_K, prev_K_depth);
  if (!norm_F) return out;

  const auto shell = sample_boundary(dom, static_cast<std::size_t>(opts.shell_points),
                                     derive_seed(seed, Stream::kStep, static_cast<std::uint64_t>(k), 1));
  std::vector<CVector> normals;
  normals.reserve(shell.size());
  for (const CVector& w : shell) normals.push_back(outward_normal(dom, w));
  const double slack = std::ldexp(1.0, -k);
  const double floor = opts.min_depth_fraction * dom.diam();

  auto holds = [&](double depth) {
    // Outside K: depths in (0, depth), finer towards S.
    for (std::size_t i = 0; i < shell.size(); ++i) {
      for (double t = 0.999 * depth; t > 1e-3 * depth; t *= 0.5) {
        if (norm_F(shell[i] - t * normals[i]) < min_S_norm - slack) return false;
      }
      if (norm_F(shell[i]) < min_S_norm - slack) return false;
    }
    return true;
  };
  while (!holds(out.K.depth)) {
    out.K.depth *= 0.5;
    ++out.enlargements;
    if (out.K.depth < floor) throw ConvergenceError("choose_compacts: K enlargement reached the collar resolution");
  }
  return out;
}

double delta_for_C1(int n, const CompactSet& K, const CompactSet& L, double budget, double path_cap) {
  const double gap = L.depth - K.depth;
  if (!(gap > 0.0)) throw PreconditionError("delta_for_C1: nonpositive collar gap");
  if (n < 1 || !(path_cap > 0.0) || !(budget >= 0.0)) throw PreconditionError("delta_for_C1: invalid arguments");
  return budget * gap / (n * path_cap);
}

std::vector<CVector> compact_samples(const ConvexDomain& dom, const CompactSet& K, std::size_t count,
                                     std::uint64_t seed) {
  std::vector<CVector> out;
  out.reserve(count);
  const std::size_t shell = count / 2;
  for (const CVector& w : sample_boundary(dom, shell, derive_seed(seed, Stream::kStep, 0, 2))) {
    const CVector z = w - K.depth * outward_normal(dom, w);
    if (dom.rho(z) < 0.0) out.push_back(z);
  }
  std::uint64_t round = 0;
  while (out.size() < count && round < 64) {
    for (const CVector& z : sample_interior(dom, 2 * (count - out.size()) + 16,
                                            derive_seed(seed, Stream::kStep, 1 + round, 3))) {
      if (out.size() == count) break;
      if (K.contains(dom, z)) out.push_back(z);
    }
    ++round;
  }
  return out;
}

}  // namespace peakembed
