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
#include <vector>

#include "peakembed/domain.hpp"

namespace peakembed {

/// {z in D : dist(z, S) >= depth}.
struct CompactSet {
  double depth = 0.0;
  bool contains(const ConvexDomain& dom, const CVector& z) const;
};

struct CompactOptions {
  double d0_fraction = 0.1;  // d0 = d0_fraction * diam
  double kappa_K = 1.0;
  double kappa_L = 2.0;
  int shell_points = 2000;  // boundary directions for the outside-K check
  double min_depth_fraction = 1e-6;
};

struct Compacts {
  CompactSet K;
  CompactSet L;
  int enlargements = 0;
  double gap() const { return L.depth - K.depth; }
};

/// K_k and L_k at depths d0 2^(1-k) kappa. K is enlarged (its depth halved,
/// never above prev_K_depth) until |F(z)| >= min_S_norm - 2^-k on a shell
/// sample outside K. `norm_F` may be empty to skip the check.
Compacts choose_compacts(const ConvexDomain& dom, int k, const std::function<double(const CVector&)>& norm_F,
                         double min_S_norm, std::uint64_t seed, const CompactOptions& opts = {},
                         double prev_K_depth = std::numeric_limits<double>::infinity());

/// budget * gap / (n * path_cap): a uniform perturbation this small on K
/// moves first derivatives on L by at most delta n / gap, so the length of
/// a path in L of length <= path_cap changes by less than the budget.
double delta_for_C1(int n, const CompactSet& K, const CompactSet& L, double budget = 1.0, double path_cap = 50.0);

/// Points of K: half on its boundary shell (depth exactly K.depth), half
/// uniform interior points of K.
std::vector<CVector> compact_samples(const ConvexDomain& dom, const CompactSet& K, std::size_t count,
                                     std::uint64_t seed);

}  // namespace peakembed
