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

#include "peakembed/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace peakembed {
namespace {

constexpr double kPi = std::numbers::pi;

// Outer-ring point in direction u (unit): the boundary exit pulled in by the collar.
CVector outer_point(const ConvexDomain& dom, const CVector& u, double collar) {
  const CVector w = dom.interior_point() + dom.ray_exit(u) * u;
  return w - collar * outward_normal(dom, w);
}

void finish_adjacency(DomainMesh& mesh) {
  const std::size_t nn = mesh.nodes.size();
  std::vector<std::uint32_t> deg(nn + 1, 0);
  for (const auto& e : mesh.edges) {
    ++deg[e[0] + 1];
    ++deg[e[1] + 1];
  }
  for (std::size_t i = 1; i <= nn; ++i) deg[i] += deg[i - 1];
  mesh.adj_offset = deg;
  mesh.adj_edge.assign(mesh.edges.size() * 2, 0);
  std::vector<std::uint32_t> fill(deg.begin(), deg.end() - 1);
  for (std::uint32_t e = 0; e < mesh.edges.size(); ++e) {
    mesh.adj_edge[fill[mesh.edges[e][0]]++] = e;
    mesh.adj_edge[fill[mesh.edges[e][1]]++] = e;
  }
  double longest = 0.0;
  for (const auto& e : mesh.edges) longest = std::max(longest, distance(mesh.nodes[e[0]], mesh.nodes[e[1]]));
  mesh.h = longest;
}

// Rings j = 1..J at fraction j/J of the way to the outer ring, N directions each.
DomainMesh polar_mesh(const ConvexDomain& dom, int J, int N, double collar) {
  DomainMesh mesh;
  mesh.n = 1;
  const CVector p = dom.interior_point();
  mesh.nodes.push_back(p);
  mesh.outer.push_back(0);
  std::vector<CVector> rim(static_cast<std::size_t>(N));
  for (int t = 0; t < N; ++t) {
    const double th = 2.0 * kPi * t / N;
    rim[t] = outer_point(dom, CVector{Complex(std::cos(th), std::sin(th))}, collar);
  }
  auto id = [&](int j, int t) { return static_cast<std::uint32_t>(1 + (j - 1) * N + ((t % N) + N) % N); };
  for (int j = 1; j <= J; ++j) {
    const double f = static_cast<double>(j) / J;
    for (int t = 0; t < N; ++t) {
      mesh.nodes.push_back(p + f * (rim[t] - p));
      mesh.outer.push_back(j == J ? 1 : 0);
    }
  }
  for (int t = 0; t < N; ++t) mesh.edges.push_back({0, id(1, t)});
  for (int j = 1; j <= J; ++j) {
    for (int t = 0; t < N; ++t) {
      mesh.edges.push_back({id(j, t), id(j, t + 1)});
      if (j < J) {
        mesh.edges.push_back({id(j, t), id(j + 1, t)});
        mesh.edges.push_back({id(j, t), id(j + 1, t + 1)});
        mesh.edges.push_back({id(j, t), id(j + 1, t - 1)});
      }
    }
  }
  finish_adjacency(mesh);
  return mesh;
}

// Directions (cos e e^(i a), sin e e^(i b)); axis edges only.
DomainMesh hopf_mesh(const ConvexDomain& dom, int J, int Ne, int Nt, double collar) {
  DomainMesh mesh;
  mesh.n = 2;
  const CVector p = dom.interior_point();
  mesh.nodes.push_back(p);
  mesh.outer.push_back(0);
  const std::size_t per_ring = static_cast<std::size_t>(Ne) * Nt * Nt;
  std::vector<CVector> rim(per_ring);
  auto dir_id = [&](int e, int a, int b) {
    return static_cast<std::size_t>(e) * Nt * Nt + static_cast<std::size_t>((a + Nt) % Nt) * Nt + (b + Nt) % Nt;
  };
  for (int e = 0; e < Ne; ++e) {
    const double eta = 0.5 * kPi * e / (Ne - 1);
    for (int a = 0; a < Nt; ++a) {
      for (int b = 0; b < Nt; ++b) {
        const double ta = 2.0 * kPi * a / Nt;
        const double tb = 2.0 * kPi * b / Nt;
        const CVector u{std::polar(std::cos(eta), ta), std::polar(std::sin(eta), tb)};
        rim[dir_id(e, a, b)] = outer_point(dom, u, collar);
      }
    }
  }
  auto id = [&](int j, std::size_t d) { return static_cast<std::uint32_t>(1 + (j - 1) * per_ring + d); };
  for (int j = 1; j <= J; ++j) {
    const double f = static_cast<double>(j) / J;
    for (std::size_t d = 0; d < per_ring; ++d) {
      mesh.nodes.push_back(p + f * (rim[d] - p));
      mesh.outer.push_back(j == J ? 1 : 0);
    }
  }
  for (std::size_t d = 0; d < per_ring; ++d) mesh.edges.push_back({0, id(1, d)});
  for (int j = 1; j <= J; ++j) {
    for (int e = 0; e < Ne; ++e) {
      for (int a = 0; a < Nt; ++a) {
        for (int b = 0; b < Nt; ++b) {
          const std::uint32_t v = id(j, dir_id(e, a, b));
          mesh.edges.push_back({v, id(j, dir_id(e, a + 1, b))});
          mesh.edges.push_back({v, id(j, dir_id(e, a, b + 1))});
          if (e + 1 < Ne) mesh.edges.push_back({v, id(j, dir_id(e + 1, a, b))});
          if (j < J) mesh.edges.push_back({v, id(j + 1, dir_id(e, a, b))});
        }
      }
    }
  }
  finish_adjacency(mesh);
  return mesh;
}

double max_reach(const ConvexDomain& dom, double collar) {
  // Largest distance from the interior point to the outer ring, sampled.
  double R = 0.0;
  for (const CVector& w : sample_boundary(dom, 2000, 0x6d657368)) {
    R = std::max(R, distance(dom.interior_point(), w - collar * outward_normal(dom, w)));
  }
  return R;
}

}  // namespace

std::uint32_t DomainMesh::nearest_node(const CVector& z) const {
  std::uint32_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    const double d = distance_sq(nodes[i], z);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

DomainMesh build_mesh(const ConvexDomain& dom, const MeshOptions& opts) {
  if (dom.dim() >= 3) throw PreconditionError("distance estimation is disabled for n >= 3");
  if (!(opts.h > 0.0) || !(opts.collar_fraction > 0.0)) throw PreconditionError("build_mesh: h and collar must be positive");
  const double collar = opts.collar_fraction * dom.diam();
  const double R = max_reach(dom, collar);
  double h = opts.h;
  DomainMesh mesh;
  // Grow the resolution until the longest edge is within h, or shrink it to meet the node cap.
  for (int attempt = 0; attempt < 12; ++attempt) {
    if (dom.dim() == 1) {
      const double step = h / std::sqrt(2.0);
      int J = std::max(2, static_cast<int>(std::ceil(R / step)));
      int N = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * R / step)));
      if (1.0 + static_cast<double>(J) * N > static_cast<double>(opts.max_nodes)) {
        h *= std::sqrt((1.0 + static_cast<double>(J) * N) / static_cast<double>(opts.max_nodes)) * 1.01;
        continue;
      }
      mesh = polar_mesh(dom, J, N, collar);
    } else {
      int J = std::max(2, static_cast<int>(std::ceil(R / h)));
      int Ne = std::max(3, static_cast<int>(std::ceil(0.5 * kPi * R / h)) + 1);
      int Nt = std::max(6, static_cast<int>(std::ceil(2.0 * kPi * R / h)));
      const double count = 1.0 + static_cast<double>(J) * Ne * Nt * Nt;
      if (count > static_cast<double>(opts.max_nodes)) {
        h *= std::pow(count / static_cast<double>(opts.max_nodes), 0.25) * 1.01;
        continue;
      }
      mesh = hopf_mesh(dom, J, Ne, Nt, collar);
    }
    if (mesh.h <= h * (1.0 + 1e-12) || attempt == 11) break;
    h *= 0.9 * h / mesh.h;
  }
  mesh.collar_depth = collar;
  mesh.h_requested = opts.h;
  return mesh;
}

double path_length(const JacobianFn& jac, const std::vector<CVector>& polyline) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    const CVector mid = 0.5 * (polyline[i] + polyline[i + 1]);
    acc += norm(jac(mid).apply(polyline[i + 1] - polyline[i]));
  }
  return acc;
}

double path_length(const MapState& F, const std::vector<CVector>& polyline) {
  return path_length([&](const CVector& z) { return F.jac(z); }, polyline);
}

std::vector<double> edge_weights(const JacobianFn& jac, const DomainMesh& mesh) {
  std::vector<double> w(mesh.edges.size());
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const CVector& a = mesh.nodes[mesh.edges[e][0]];
    const CVector& b = mesh.nodes[mesh.edges[e][1]];
    w[e] = norm(jac(0.5 * (a + b)).apply(b - a));
  }
  return w;
}

namespace {

struct Settled {
  std::vector<double> dist;
  std::vector<std::uint32_t> via;  // edge used to reach each node
  std::int64_t target = -1;
};

Settled dijkstra(const DomainMesh& mesh, const std::vector<double>& w, std::uint32_t source, bool stop_at_outer) {
  const std::size_t nn = mesh.nodes.size();
  Settled out;
  out.dist.assign(nn, std::numeric_limits<double>::infinity());
  out.via.assign(nn, std::numeric_limits<std::uint32_t>::max());
  std::vector<std::uint8_t> done(nn, 0);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  out.dist[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (stop_at_outer && mesh.outer[u]) {
      out.target = u;
      return out;
    }
    for (std::uint32_t k = mesh.adj_offset[u]; k < mesh.adj_offset[u + 1]; ++k) {
      const std::uint32_t e = mesh.adj_edge[k];
      const std::uint32_t v = mesh.other(e, u);
      const double nd = d + w[e];
      if (nd < out.dist[v]) {
        out.dist[v] = nd;
        out.via[v] = e;
        pq.push({nd, v});
      }
    }
  }
  return out;
}

}  // namespace

std::vector<double> mesh_distances(const DomainMesh& mesh, const std::vector<double>& weights, std::uint32_t source) {
  return dijkstra(mesh, weights, source, false).dist;
}

DistanceResult dist_estimate(const JacobianFn& jac, const DomainMesh& mesh, const CVector& p0) {
  DistanceResult res;
  res.source = mesh.nearest_node(p0);
  const std::vector<double> w = edge_weights(jac, mesh);
  const Settled st = dijkstra(mesh, w, res.source, true);
  if (st.target < 0) throw Error("dist_estimate: disconnected mesh, no outer-ring node reachable");
  res.target = static_cast<std::uint32_t>(st.target);
  res.estimate = st.dist[res.target];
  for (std::uint32_t v = res.target;; v = mesh.other(st.via[v], v)) {
    res.path.push_back(v);
    if (v == res.source) break;
  }
  std::reverse(res.path.begin(), res.path.end());
  for (std::size_t i = 0; i + 1 < res.path.size(); ++i) {
    const CMatrix J = jac(0.5 * (mesh.nodes[res.path[i]] + mesh.nodes[res.path[i + 1]]));
    double f = 0.0;
    for (int r = 0; r < J.rows(); ++r) {
      for (int c = 0; c < J.cols(); ++c) f += std::norm(J(r, c));
    }
    res.max_jac_norm = std::max(res.max_jac_norm, std::sqrt(f));
  }
  res.lower_bound = res.estimate - mesh.h * res.max_jac_norm * static_cast<double>(res.path.size());
  return res;
}

DistanceResult dist_estimate(const MapState& F, const DomainMesh& mesh, const CVector& p0) {
  if (mesh.n != F.n()) throw DimensionError("dist_estimate: mesh and map dimensions differ");
  return dist_estimate([&](const CVector& z) { return F.jac(z); }, mesh, p0);
}

MetricReport fit_distances(std::vector<double> d, std::vector<double> lower, const std::vector<double>& eps) {
  MetricReport rep;
  rep.d = std::move(d);
  rep.lower = std::move(lower);
  if (rep.d.empty()) return rep;
  rep.tolerance = 1e-9 * std::max(1.0, std::abs(rep.d.front()));
  double acc = 0.0;
  for (std::size_t k = 1; k < rep.d.size(); ++k) {
    if (k - 1 < eps.size()) acc += std::pow(eps[k - 1], 5.0 / 16.0);
    rep.gain_sums.push_back(acc);
    const double g = rep.d[k] - rep.d[k - 1];
    rep.gains.push_back(g);
    if (g > rep.tolerance) ++rep.positive_gains;
    if (!(g > -rep.tolerance)) rep.nondecreasing = false;
  }
  if (rep.gains.empty()) return rep;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 1; k < rep.d.size(); ++k) {
    const double x = rep.gain_sums[k - 1];
    sxy += x * (rep.d[k] - rep.d[0]);
    sxx += x * x;
  }
  if (sxx > 0.0) rep.E_fit = sxy / sxx;
  // Ordinary least squares through (0, d_0), (S_k, d_k).
  const double m = static_cast<double>(rep.d.size());
  double mx = 0.0;
  double my = rep.d[0];
  for (std::size_t k = 1; k < rep.d.size(); ++k) {
    mx += rep.gain_sums[k - 1];
    my += rep.d[k];
  }
  mx /= m;
  my /= m;
  double cxy = (0.0 - mx) * (rep.d[0] - my);
  double cxx = mx * mx;
  for (std::size_t k = 1; k < rep.d.size(); ++k) {
    const double x = rep.gain_sums[k - 1] - mx;
    cxy += x * (rep.d[k] - my);
    cxx += x * x;
  }
  if (cxx > 0.0) rep.divergence_slope = cxy / cxx;
  return rep;
}

MetricReport completeness_trace(const std::vector<MapState>& states, const DomainMesh& mesh, const CVector& p0,
                                const std::vector<double>& eps) {
  std::vector<double> d;
  std::vector<double> lower;
  for (const MapState& F : states) {
    const DistanceResult r = dist_estimate(F, mesh, p0);
    d.push_back(r.estimate);
    lower.push_back(r.lower_bound);
  }
  return fit_distances(std::move(d), std::move(lower), eps);
}

std::vector<NormExtrema> properness_trace(const std::vector<MapState>& states, const PointCloud& boundary_net,
                                          const std::vector<double>& a, const std::vector<double>& eps) {
  std::vector<NormExtrema> out;
  std::vector<double> prev;
  std::vector<double> cur(boundary_net.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    NormExtrema ex;
    ex.k = static_cast<int>(k);
    ex.min_norm = std::numeric_limits<double>::infinity();
    ex.max_norm = 0.0;
    ex.worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < boundary_net.size(); ++t) {
      cur[t] = norm(states[k].eval(boundary_net[t]));
      ex.min_norm = std::min(ex.min_norm, cur[t]);
      ex.max_norm = std::max(ex.max_norm, cur[t]);
    }
    if (k >= 1 && k - 1 < a.size() && k - 1 < eps.size()) {
      const double band = a[k - 1] - std::pow(eps[k - 1], 1.0 / 7.0);
      const double inc = std::pow(eps[k - 1], 2.0 / 7.0);
      for (std::size_t t = 0; t < boundary_net.size(); ++t) {
        if (cur[t] > band) {
          ++ex.band_reached;
          continue;
        }
        const double slack = cur[t] - prev[t] - inc;
        ex.worst_slack = std::min(ex.worst_slack, slack);
        if (slack > 0.0) {
          ++ex.grown;
        } else {
          ++ex.violations;
        }
      }
    }
    out.push_back(ex);
    prev = cur;
  }
  return out;
}

}  // namespace peakembed
