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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "peakembed/compacts.hpp"
#include "peakembed/constants.hpp"
#include "peakembed/map_state.hpp"
#include "peakembed/metric.hpp"

namespace peakembed {

struct StepOptions {
  std::size_t min_boundary_samples = 10000;
  double points_per_ball = 20.0;
  std::size_t max_verify_points = 2000000;
  std::size_t compact_samples = 2000;
  std::size_t continuity_pairs = 10000;
  double continuity_safety = 2.0;
  /// Lower limit on r as a fraction of diam, used when the sampled modulus
  /// of continuity asks for a smaller radius.
  double r_floor_fraction = 1e-3;
  int retries = 8;
  double prune_threshold = kPruneThreshold;
  int s_target = 0;
  CoveringOptions covering;
  PeakClauseOptions peak;
  bool strict = false;
  std::uint64_t seed = 0;
  int k = 1;  // stage index, for seeding and the report
};

/// Boundary conclusions of one step, measured on samples.
///   (a) |F + G| <= a + eps on S
///   (b) |F + G| <= a - eps^(1/7) implies |F + G| > |F| + eps^(2/7) on S
///   (c) |G| < delta on K
///   (d) |G|^2 < 1 - |F| on S
///   (e) the measured distance from p0 to the mesh outer ring grows
struct StepReport {
  int k = 0;
  double a = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double r0 = 0.0;  // sampled modulus of continuity radius (inf when no pair violates)
  bool r0_honored = false;
  double r_initial = 0.0;
  double r = 0.0;
  double m = 0.0;
  double C2 = 0.0;
  int s = 0;
  std::size_t centers = 0;
  int attempts = 0;
  bool covering_retried = false;  // the covering needed slack halvings to respect s
  double coefficient_residual = 0.0;
  std::size_t boundary_samples = 0;
  std::size_t compact_samples = 0;

  ClauseMargin a_clause;
  ClauseMargin b_clause;
  std::size_t band_reached = 0;
  ClauseMargin c_clause;
  ClauseMargin d_clause;
  PeakClauseReport peaks;
  bool L_disjoint = false;  // lambda r below the depth of L

  double min_S_before = 0.0;
  double min_S_after = 0.0;
  double max_S_after = 0.0;

  std::optional<double> distance_before;
  std::optional<double> distance_after;
  std::optional<double> distance_lower;
  double gain() const { return distance_after && distance_before ? *distance_after - *distance_before : 0.0; }
  bool e_passed() const { return distance_after && distance_before && gain() > 0.0; }

  /// Clauses that trigger a retry: (a), (c), (d), the peak clauses and L disjointness.
  bool retry_clauses_passed() const;
  bool passed() const { return retry_clauses_passed() && b_clause.passed() && e_passed(); }
  /// Names of the failed clauses, e.g. {"b", "e"}.
  std::vector<std::string> failures() const;
};

struct StepResult {
  std::shared_ptr<Stage> stage;
  StepReport report;
};

/// Sampled radius r0 with |f_i(z) - f_i(w)| < eta and ||F(z)| - |F(w)|| < eta
/// whenever |z - w| < 2 lambda r0 on boundary pairs, divided by `safety`.
double continuity_radius(const MapState& F, double eta, double lambda, std::size_t pairs, std::uint64_t seed,
                         double safety = 2.0);

/// Net spacing for at least `count` points on S.
double spacing_for_count(const ConvexDomain& dom, std::size_t count);

/// One boosting step F -> F + G. In strict mode a clause that still fails
/// after the retries throws VerificationError; otherwise the report carries it.
/// `mesh` may be null, in which case (e) is not measured.
StepResult boost_step(const MapState& F, double a, double eps, const CompactSet& K, const CompactSet& L,
                      const CVector& p0, std::optional<double> sigma, double delta, const DomainConstants& consts,
                      const StepOptions& opts, const DomainMesh* mesh = nullptr);

}  // namespace peakembed
