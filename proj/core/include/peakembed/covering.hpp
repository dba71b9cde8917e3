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

/// Boundary centers whose lambda r balls are pairwise disjoint, with their normals.
struct CoveringFamily {
  explicit CoveringFamily(int n = 1) : centers(n), normals(n) {}

  PointCloud centers;
  PointCloud normals;
  std::size_t size() const { return centers.size(); }
};

struct CoveringOptions {
  /// Negative selects the dimension default: 0.1 for n = 1, 0.3 otherwise.
  double net_slack = -1.0;
  double points_per_ball = 20.0;
  int max_colors = 10000;
  /// If positive, the number of families is fixed to this value: fewer colors
  /// are padded with empty families, more colors trigger a rebuild with the
  /// slack halved.
  int s_target = 0;
  int max_slack_halvings = 4;
  /// Largest boundary net a build may generate; bigger requests throw ConvergenceError.
  std::size_t max_net_points = 10000000;
};

double default_net_slack(int n);

/// s families (indices 0..s-1) of disjoint lambda r balls whose r balls cover
/// S. Indices s..2s-1 alias 0..s-1.
class Covering {
 public:
  Covering() = default;
  Covering(double r, double lambda, std::vector<CoveringFamily> base);

  double r() const { return r_; }
  double lambda() const { return lambda_; }
  int s() const { return static_cast<int>(base_.size()); }
  int family_count() const { return 2 * s(); }

  /// Family i for 0 <= i < 2s; family(i + s) is the same object as family(i).
  const CoveringFamily& family(int i) const { return base_[static_cast<std::size_t>(i % s())]; }
  const std::vector<CoveringFamily>& base() const { return base_; }
  std::size_t total_centers() const;

  // Construction diagnostics.
  int colors = 0;
  double slack_used = 0.0;
  int slack_retries = 0;
  std::size_t net_size = 0;
  double net_spacing = 0.0;

 private:
  double r_ = 0.0;
  double lambda_ = 0.0;
  std::vector<CoveringFamily> base_;
};

/// Construction-net spacing: covering radius (5/6) slack r and at least
/// `points_per_ball` net points per r ball.
double construction_spacing(const ConvexDomain& dom, double r, double slack, double points_per_ball);

/// Farthest-point sampling over a boundary net, conflict graph at distance
/// <= 2 lambda r, largest-degree-first greedy coloring.
Covering build_covering(const ConvexDomain& dom, double r, double lambda, std::uint64_t seed,
                        const CoveringOptions& opts = {});

/// Greedy largest-degree-first coloring of the graph joining points at
/// distance <= radius. Returns one color per point.
std::vector<int> greedy_coloring(const PointCloud& pts, double radius);

struct DisjointnessViolation {
  int family;
  std::size_t first;
  std::size_t second;
  double distance;
};

struct CoveringReport {
  double r = 0.0;
  double lambda = 0.0;
  int s = 0;
  std::size_t net_points = 0;
  double max_nearest = 0.0;
  std::size_t coverage_violation_count = 0;
  std::vector<std::size_t> coverage_violations;  // first offenders, by net index
  double min_same_family = 0.0;                   // +inf when no pair is within 4 lambda r
  std::size_t disjointness_violation_count = 0;
  std::vector<DisjointnessViolation> disjointness_violations;
  std::vector<std::size_t> family_sizes;
  bool clean() const { return coverage_violation_count == 0 && disjointness_violation_count == 0; }
};

CoveringReport verify_covering(const Covering& cov, const PointCloud& validation_net);

/// Same checks with a streamed net: boundary_net(dom, spacing, seed) is never stored.
CoveringReport verify_covering(const Covering& cov, const ConvexDomain& dom, double spacing, std::uint64_t seed);

/// Spacing of a net with `factor` times as many points per unit area as a net with spacing h.
double denser_spacing(const ConvexDomain& dom, double h, double factor);

}  // namespace peakembed
