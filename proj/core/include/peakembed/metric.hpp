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

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "peakembed/map_state.hpp"

namespace peakembed {

struct MeshOptions {
  double h = 1e-2;                // longest edge
  double collar_fraction = 1e-2;  // outer ring depth / diam
  std::size_t max_nodes = 200000;
};

/// Polar mesh of D about the interior point (n = 1), or a product polar
/// grid in Hopf coordinates (n = 2). The outer ring sits at depth about
/// collar_depth along the boundary normals.
struct DomainMesh {
  int n = 1;
  std::vector<CVector> nodes;
  std::vector<std::array<std::uint32_t, 2>> edges;
  std::vector<std::uint32_t> adj_offset;  // CSR over nodes
  std::vector<std::uint32_t> adj_edge;
  std::vector<std::uint8_t> outer;  // 1 on the outer ring
  double collar_depth = 0.0;
  double h = 0.0;  // longest edge actually used
  double h_requested = 0.0;

  std::uint32_t nearest_node(const CVector& z) const;
  std::uint32_t other(std::uint32_t e, std::uint32_t v) const { return edges[e][0] == v ? edges[e][1] : edges[e][0]; }
};

/// Throws PreconditionError for n >= 3, where distance estimation is disabled.
DomainMesh build_mesh(const ConvexDomain& dom, const MeshOptions& opts = {});

using JacobianFn = std::function<CMatrix(const CVector&)>;

/// Sum over segments of |J(midpoint) dz|.
double path_length(const JacobianFn& jac, const std::vector<CVector>& polyline);
double path_length(const MapState& F, const std::vector<CVector>& polyline);

/// |J(midpoint) dz| for every mesh edge.
std::vector<double> edge_weights(const JacobianFn& jac, const DomainMesh& mesh);

struct DistanceResult {
  double estimate = 0.0;     // shortest mesh path length to the outer ring
  double lower_bound = 0.0;  // estimate - h max|J| (path node count)
  std::uint32_t source = 0;
  std::uint32_t target = 0;
  std::vector<std::uint32_t> path;  // source .. target
  double max_jac_norm = 0.0;        // Frobenius norm, worst path midpoint
};

/// Dijkstra from the node nearest p0, stopping at the first outer-ring node settled.
DistanceResult dist_estimate(const JacobianFn& jac, const DomainMesh& mesh, const CVector& p0);
DistanceResult dist_estimate(const MapState& F, const DomainMesh& mesh, const CVector& p0);

/// All-target variant on precomputed weights; returns distances from `source`.
std::vector<double> mesh_distances(const DomainMesh& mesh, const std::vector<double>& weights, std::uint32_t source);

struct MetricReport {
  std::vector<double> d;          // d_k for each state
  std::vector<double> lower;      // lower bounds
  std::vector<double> gains;      // d_k - d_(k-1), k >= 1
  std::vector<double> gain_sums;  // sum_(j <= k) eps_j^(5/16)
  std::optional<double> E_fit;    // least squares through the origin of d_k - d_0 against gain_sums
  std::optional<double> divergence_slope;  // ordinary least squares slope of d_k against gain_sums
  double tolerance = 0.0;
  std::size_t positive_gains = 0;
  bool nondecreasing = true;
};

/// `eps[k - 1]` is the step size of state k; states[0] is F_0.
MetricReport completeness_trace(const std::vector<MapState>& states, const DomainMesh& mesh, const CVector& p0,
                                const std::vector<double>& eps);
/// Same fit from already measured distances.
MetricReport fit_distances(std::vector<double> d, std::vector<double> lower, const std::vector<double>& eps);

struct NormExtrema {
  int k = 0;
  double min_norm = 0.0;
  double max_norm = 0.0;
  std::size_t band_reached = 0;  // points exempt from the increment branch
  std::size_t grown = 0;         // points with the required increment
  std::size_t violations = 0;    // neither branch
  double worst_slack = 0.0;      // smallest increment slack among non-exempt points
};

/// Per state k: extrema of |F_k| on the net and, for k >= 1, the pointwise
/// dichotomy |F_k| > a_k - eps_k^(1/7) or |F_k| > |F_(k-1)| + eps_k^(2/7).
/// a[k - 1], eps[k - 1] belong to state k.
std::vector<NormExtrema> properness_trace(const std::vector<MapState>& states, const PointCloud& boundary_net,
                                          const std::vector<double>& a, const std::vector<double>& eps);

}  // namespace peakembed
