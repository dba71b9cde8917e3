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
#include <vector>

#include "peakembed/domain.hpp"

namespace peakembed {

/// Convexity constants of a domain:
///   alpha1 |z - w|^2 <= Re<w - z, nu(w)>   for w in S, z in the closure within r1 of S,
///   Re<w - z, nu(w)> <= alpha2 |z - w|^2   for z, w in S.
struct DomainConstants {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double r1 = 0.0;
  double lambda = 0.0;
  double gamma1 = 0.0;
};

/// Supporting-hyperplane ratio Re<w - z, nu> / |z - w|^2.
double convexity_ratio(const CVector& z, const CVector& w, const CVector& nu_w);

/// 4 sqrt(alpha2 / alpha1).
double lambda_of(const DomainConstants& c);

/// Pair-sampling estimate with a relative safety margin (default 10%).
/// Throws PreconditionError("domain fails strict convexity test") when a
/// sampled ratio is not positive.
DomainConstants estimate_constants(const ConvexDomain& dom, std::size_t sample_count, std::uint64_t seed,
                                   double margin = 0.1);

struct ConstantsReport {
  std::size_t boundary_pairs = 0;
  std::size_t collar_pairs = 0;
  std::size_t upper_violations = 0;
  std::size_t lower_violations = 0;
  double max_boundary_ratio = 0.0;
  double min_boundary_ratio = 0.0;
  double min_collar_ratio = 0.0;
  bool clean() const { return upper_violations == 0 && lower_violations == 0; }
};

/// Re-checks both inequalities on `pair_count` fresh S x S pairs and as many
/// collar pairs.
ConstantsReport validate_constants(const ConvexDomain& dom, const DomainConstants& c, std::size_t pair_count,
                                   std::uint64_t seed);

}  // namespace peakembed
