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

#include "peakembed/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "peakembed/spatial.hpp"

namespace peakembed {
namespace {

constexpr std::size_t kMaxListed = 1000;

// Volume of the unit ball in R^d.
double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

std::vector<CoveringFamily> families_from_colors(const ConvexDomain& dom, const PointCloud& centers,
                                                 const std::vector<int>& color, int count) {
  std::vector<CoveringFamily> fam(static_cast<std::size_t>(count), CoveringFamily(dom.dim()));
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const CVector c = centers[i];
    fam[static_cast<std::size_t>(color[i])].centers.push_back(c);
    fam[static_cast<std::size_t>(color[i])].normals.push_back(outward_normal(dom, c));
  }
  return fam;
}

}  // namespace

double default_net_slack(int n) { return n == 1 ? 0.1 : 0.3; }

Covering::Covering(double r, double lambda, std::vector<CoveringFamily> base)
    : r_(r), lambda_(lambda), base_(std::move(base)) {
  if (base_.empty()) throw PreconditionError("Covering: at least one family is required");
}

std::size_t Covering::total_centers() const {
  std::size_t t = 0;
  for (const auto& f : base_) t += f.size();
  return t;
}

double construction_spacing(const ConvexDomain& dom, double r, double slack, double points_per_ball) {
  const double by_radius = net_spacing_for_radius(dom, (5.0 / 6.0) * slack * r);
  const int d = 2 * dom.dim() - 1;
  const double by_density = r * std::pow(unit_ball_volume(d) / points_per_ball, 1.0 / d);
  return std::min(by_radius, by_density);
}

double denser_spacing(const ConvexDomain& dom, double h, double factor) {
  return h / std::pow(factor, 1.0 / (2 * dom.dim() - 1));
}

namespace {

template <int D>
std::vector<int> greedy_coloring_impl(const PointCloud& pts, double radius) {
  const std::size_t n = pts.size();
  std::vector<int> color(n, -1);
  const SpatialGrid grid(pts, 0.5 * radius);

  const double r2 = radius * radius;
  std::vector<std::uint32_t> degree_at(n, 0);  // by grid position
  std::vector<std::uint32_t> nb;
  const auto& blocks = grid.blocks();
  for (std::uint32_t bi = 0; bi < blocks.size(); ++bi) {
    grid.neighbor_blocks(bi, radius, nb);
    // Each unordered pair is seen once: from the lower block, or within a block from the lower position.
    for (std::uint32_t a = blocks[bi].begin; a < blocks[bi].end; ++a) {
      const double* q = grid.coords_at(a);
      std::uint32_t count = 0;
      for (std::uint32_t nbi : nb) {
        if (nbi < bi || grid.block_distance_sq(nbi, q) > r2) continue;
        const auto& rg = blocks[nbi];
        const std::uint32_t first = nbi == bi ? a + 1 : rg.begin;
        const double* x = grid.coords_at(first);
        for (std::uint32_t b = first; b < rg.end; ++b, x += D) {
          double d2 = 0.0;
          for (int k = 0; k < D; ++k) {
            const double t = q[k] - x[k];
            d2 += t * t;
          }
          if (d2 <= r2) {
            ++count;
            ++degree_at[b];
          }
        }
      }
      degree_at[a] += count;
    }
  }

  std::vector<std::uint32_t> degree(n, 0);
  for (std::uint32_t p = 0; p < n; ++p) degree[grid.index_at(p)] = degree_at[p];
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return degree[a] > degree[b]; });

  // Coloring in degree order needs, per vertex, the colors of its already
  // colored neighbors. Colored points are appended to per-cell lists, so the
  // scan only touches colored candidates.
  struct Colored {
    double x[D];
    int color;
  };
  std::vector<std::uint32_t> pos_of(n);
  for (std::uint32_t p = 0; p < n; ++p) pos_of[grid.index_at(p)] = p;
  std::vector<std::uint32_t> block_of(n);
  for (std::uint32_t bi = 0; bi < blocks.size(); ++bi) {
    for (std::uint32_t p = blocks[bi].begin; p < blocks[bi].end; ++p) block_of[p] = bi;
  }
  std::vector<std::vector<Colored>> colored(blocks.size());
  for (std::uint32_t bi = 0; bi < blocks.size(); ++bi) colored[bi].reserve(blocks[bi].end - blocks[bi].begin);
  std::vector<std::vector<std::uint32_t>> nb_cache(blocks.size());
  std::vector<int> stamp;
  int stamp_id = 0;
  for (std::uint32_t v : order) {
    ++stamp_id;
    const std::uint32_t a = pos_of[v];
    const std::uint32_t home = block_of[a];
    auto& nb = nb_cache[home];
    if (nb.empty()) grid.neighbor_blocks(home, radius, nb);
    const double* q = grid.coords_at(a);
    for (std::uint32_t nbi : nb) {
      const auto& list = colored[nbi];
      if (list.empty() || grid.block_distance_sq(nbi, q) > r2) continue;
      for (const Colored& c : list) {
        double d2 = 0.0;
        for (int k = 0; k < D; ++k) {
          const double t = q[k] - c.x[k];
          d2 += t * t;
        }
        if (d2 <= r2) {
          if (static_cast<std::size_t>(c.color) >= stamp.size()) stamp.resize(static_cast<std::size_t>(c.color) + 1, 0);
          stamp[static_cast<std::size_t>(c.color)] = stamp_id;
        }
      }
    }
    int c = 0;
    while (static_cast<std::size_t>(c) < stamp.size() && stamp[static_cast<std::size_t>(c)] == stamp_id) ++c;
    color[v] = c;
    Colored entry;
    std::copy(q, q + D, entry.x);
    entry.color = c;
    colored[home].push_back(entry);
  }
  return color;
}

}  // namespace

std::vector<int> greedy_coloring(const PointCloud& pts, double radius) {
  if (pts.empty()) return {};
  switch (pts.dim()) {
    case 1:
      return greedy_coloring_impl<2>(pts, radius);
    case 2:
      return greedy_coloring_impl<4>(pts, radius);
    case 3:
      return greedy_coloring_impl<6>(pts, radius);
    default:
      return greedy_coloring_impl<8>(pts, radius);
  }
}

Covering build_covering(const ConvexDomain& dom, double r, double lambda, std::uint64_t seed,
                        const CoveringOptions& opts) {
  if (!(r > 0.0)) throw PreconditionError("build_covering: r must be positive");
  if (!(lambda > 1.0)) throw PreconditionError("build_covering: lambda must exceed 1");
  double slack = opts.net_slack < 0.0 ? default_net_slack(dom.dim()) : opts.net_slack;
  if (!(slack > 0.0 && slack < 1.0)) throw PreconditionError("build_covering: net_slack must lie in (0, 1)");

  if (r >= dom.diam()) {
    // Every boundary point lies within diam of any center.
    const PointCloud net = boundary_net(dom, 0.25 * dom.diam(), seed);
    PointCloud one(dom.dim());
    one.push_back(net[0]);
    const std::vector<int> color(1, 0);
    auto fam = families_from_colors(dom, one, color, 1);
    const int target = std::max(1, opts.s_target);
    fam.resize(static_cast<std::size_t>(target), CoveringFamily(dom.dim()));
    Covering cov(r, lambda, std::move(fam));
    cov.colors = 1;
    cov.slack_used = slack;
    cov.net_size = net.size();
    cov.net_spacing = 0.25 * dom.diam();
    return cov;
  }

  for (int attempt = 0;; ++attempt) {
    const double h = construction_spacing(dom, r, slack, opts.points_per_ball);
    const std::size_t predicted = boundary_net_size(dom, h);
    if (predicted > opts.max_net_points) {
      std::string msg = "covering degenerated: the net would need " + std::to_string(predicted) + " points";
      if (attempt > 0) msg += " after " + std::to_string(attempt) + " slack halvings for s = " + std::to_string(opts.s_target);
      throw ConvergenceError(msg);
    }
    PointCloud net = boundary_net(dom, h, seed);
    if (net.empty()) throw ConvergenceError("build_covering: net generation failed");
    const auto chosen = farthest_point_sampling(net, r * (1.0 - slack));
    PointCloud centers(dom.dim());
    centers.reserve(chosen.size());
    for (std::uint32_t idx : chosen) centers.push_back(net[idx]);
    const std::size_t net_size = net.size();
    net = PointCloud(dom.dim());

    const std::vector<int> color = greedy_coloring(centers, 2.0 * lambda * r);
    const int colors = 1 + *std::max_element(color.begin(), color.end());
    if (colors > opts.max_colors) throw ConvergenceError("covering degenerated");
    if (opts.s_target > 0 && colors > opts.s_target) {
      if (attempt >= opts.max_slack_halvings) {
        throw ConvergenceError("covering degenerated: " + std::to_string(colors) + " colors exceed the fixed s = " +
                               std::to_string(opts.s_target));
      }
      slack *= 0.5;
      continue;
    }
    const int count = std::max(colors, opts.s_target);
    Covering cov(r, lambda, families_from_colors(dom, centers, color, count));
    cov.colors = colors;
    cov.slack_used = slack;
    cov.slack_retries = attempt;
    cov.net_size = net_size;
    cov.net_spacing = h;
    return cov;
  }
}

namespace {

struct CoverageScan {
  CoverageScan(const PointCloud& centers, double radius, CoveringReport& report)
      : all(centers), grid(centers, radius), r(radius), dim(2 * centers.dim()), rep(report),
        nb_cache(grid.blocks().size()) {}

  const PointCloud& all;
  SpatialGrid grid;
  double r;
  int dim;
  CoveringReport& rep;
  std::vector<std::vector<std::uint32_t>> nb_cache;
  std::size_t index = 0;

  void visit(const double* q) {
    const double r2 = r * r;
    const double m2 = rep.max_nearest * rep.max_nearest;
    const double exit2 = std::min(m2, r2);
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](const double* x) {
      const double d = packed_distance_sq(q, x, dim);
      best = std::min(best, d);
      return !(d <= exit2 && d < r2);
    };
    const std::int64_t home = grid.block_containing(q);
    if (home >= 0) {
      auto& nb = nb_cache[static_cast<std::size_t>(home)];
      if (nb.empty()) grid.neighbor_blocks(static_cast<std::uint32_t>(home), r, nb);
      const auto& blocks = grid.blocks();
      // Home cell first: it usually holds the nearest center.
      bool go = true;
      for (std::uint32_t p = blocks[home].begin; go && p < blocks[home].end; ++p) go = consider(grid.coords_at(p));
      for (std::size_t t = 0; go && t < nb.size(); ++t) {
        const std::uint32_t bi = nb[t];
        if (bi == static_cast<std::uint32_t>(home) || grid.block_distance_sq(bi, q) >= std::min(best, r2)) continue;
        for (std::uint32_t p = blocks[bi].begin; go && p < blocks[bi].end; ++p) go = consider(grid.coords_at(p));
      }
    } else {
      grid.for_each_candidate(q, r, [&](std::uint32_t, const double* x) { return consider(x); });
    }
    if (!(best < r2)) {
      for (std::size_t j = 0; j < all.size(); ++j) best = std::min(best, packed_distance_sq(q, all.raw(j), dim));
      if (!(best < r2)) {
        ++rep.coverage_violation_count;
        if (rep.coverage_violations.size() < kMaxListed) rep.coverage_violations.push_back(index);
      }
    }
    if (best > m2) rep.max_nearest = std::sqrt(best);
    ++index;
  }
};

void check_disjointness(const Covering& cov, CoveringReport& rep) {
  const double sep = 2.0 * cov.lambda() * cov.r();
  const double reach = 2.0 * sep;
  rep.min_same_family = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cov.s(); ++i) {
    const PointCloud& c = cov.family(i).centers;
    rep.family_sizes.push_back(c.size());
    if (c.size() < 2) continue;
    const int dim = 2 * c.dim();
    const SpatialGrid grid(c, reach);
    for (std::size_t a = 0; a < c.size(); ++a) {
      grid.for_each_candidate(c.raw(a), reach, [&](std::uint32_t b, const double* x) {
        if (b <= a) return true;
        const double d = std::sqrt(packed_distance_sq(c.raw(a), x, dim));
        if (d <= reach) rep.min_same_family = std::min(rep.min_same_family, d);
        if (!(d > sep)) {
          ++rep.disjointness_violation_count;
          if (rep.disjointness_violations.size() < kMaxListed) rep.disjointness_violations.push_back({i, a, b, d});
        }
        return true;
      });
    }
  }
}

PointCloud all_centers(const Covering& cov) {
  PointCloud all(cov.family(0).centers.dim());
  all.reserve(cov.total_centers());
  for (int i = 0; i < cov.s(); ++i) {
    const PointCloud& c = cov.family(i).centers;
    for (std::size_t j = 0; j < c.size(); ++j) all.push_back(c[j]);
  }
  return all;
}

}  // namespace

CoveringReport verify_covering(const Covering& cov, const PointCloud& validation_net) {
  CoveringReport rep;
  rep.r = cov.r();
  rep.lambda = cov.lambda();
  rep.s = cov.s();
  const PointCloud all = all_centers(cov);
  CoverageScan scan(all, cov.r(), rep);
  for (std::size_t i = 0; i < validation_net.size(); ++i) scan.visit(validation_net.raw(i));
  rep.net_points = validation_net.size();
  check_disjointness(cov, rep);
  return rep;
}

CoveringReport verify_covering(const Covering& cov, const ConvexDomain& dom, double spacing, std::uint64_t seed) {
  CoveringReport rep;
  rep.r = cov.r();
  rep.lambda = cov.lambda();
  rep.s = cov.s();
  const PointCloud all = all_centers(cov);
  CoverageScan scan(all, cov.r(), rep);
  double packed[2 * kMaxDim];
  for_each_net_point(dom, spacing, seed, [&](const CVector& z) {
    for (int k = 0; k < z.size(); ++k) {
      packed[2 * k] = z[k].real();
      packed[2 * k + 1] = z[k].imag();
    }
    scan.visit(packed);
  });
  rep.net_points = scan.index;
  check_disjointness(cov, rep);
  return rep;
}

}  // namespace peakembed
