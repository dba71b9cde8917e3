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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "generators.hpp"
#include "peakembed/covering.hpp"
#include "peakembed/spatial.hpp"

namespace peakembed {
namespace {

// Brute-force re-check of coverage and per-family separation.
struct BruteReport {
  double max_nearest = 0.0;
  double min_same_family = std::numeric_limits<double>::infinity();
};

BruteReport brute_check(const Covering& cov, const PointCloud& net) {
  BruteReport b;
  for (std::size_t t = 0; t < net.size(); ++t) {
    const CVector z = net[t];
    double best = std::numeric_limits<double>::infinity();
    for (int f = 0; f < cov.s(); ++f) {
      const auto& fam = cov.family(f);
      for (std::size_t j = 0; j < fam.size(); ++j) best = std::min(best, distance(z, fam.centers[j]));
    }
    b.max_nearest = std::max(b.max_nearest, best);
  }
  for (int f = 0; f < cov.s(); ++f) {
    const auto& fam = cov.family(f);
    for (std::size_t i = 0; i < fam.size(); ++i) {
      for (std::size_t j = i + 1; j < fam.size(); ++j) {
        b.min_same_family = std::min(b.min_same_family, distance(fam.centers[i], fam.centers[j]));
      }
    }
  }
  return b;
}

PointCloud remove_center(const PointCloud& pc, std::size_t drop) {
  PointCloud out(pc.dim());
  for (std::size_t i = 0; i < pc.size(); ++i) {
    if (i != drop) out.push_back(pc[i]);
  }
  return out;
}

TEST(Covering, CircleAtFineRadius) {
  const ConvexDomain disc = make_ball(1);
  const double r = 0.05, lambda = 4.0;
  const Covering cov = build_covering(disc, r, lambda, 1);
  const PointCloud net = boundary_net(disc, 2.0 * std::numbers::pi / 10000.0, 2);
  ASSERT_GE(net.size(), 10000u);
  const CoveringReport rep = verify_covering(cov, net);
  EXPECT_TRUE(rep.clean());
  EXPECT_EQ(rep.s, cov.s());
  const BruteReport b = brute_check(cov, net);
  EXPECT_LT(b.max_nearest, r);
  EXPECT_GT(b.min_same_family, 2.0 * lambda * r);
  EXPECT_NEAR(rep.max_nearest, b.max_nearest, 1e-15);
  EXPECT_NEAR(rep.min_same_family, b.min_same_family, 1e-15);
}

TEST(Covering, ColorCountIsBoundedByConflictDegree) {
  const ConvexDomain disc = make_ball(1);
  const double r = 0.05, lambda = 4.0;
  const Covering cov = build_covering(disc, r, lambda, 1);
  std::vector<CVector> all;
  for (const auto& fam : cov.base()) {
    for (std::size_t j = 0; j < fam.size(); ++j) all.push_back(fam.centers[j]);
  }
  std::size_t max_degree = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    std::size_t d = 0;
    for (std::size_t j = 0; j < all.size(); ++j) d += (i != j && distance(all[i], all[j]) <= 2.0 * lambda * r);
    max_degree = std::max(max_degree, d);
  }
  EXPECT_LE(static_cast<std::size_t>(cov.s()), max_degree + 1);
  // Consecutive centers on the circle are at most r apart, so an arc of
  // chord 2 lambda r holds a clique of at least 2 lambda centers.
  EXPECT_GE(cov.s(), static_cast<int>(2.0 * lambda));
}

// Independent largest-degree-first coloring, O(n^2).
std::vector<int> naive_coloring(const std::vector<CVector>& pts, double radius) {
  const std::size_t n = pts.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && distance(pts[i], pts[j]) <= radius) adj[i].push_back(j);
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return adj[a].size() > adj[b].size(); });
  std::vector<int> color(n, -1);
  for (std::size_t v : order) {
    std::vector<bool> used(n + 1, false);
    for (std::size_t u : adj[v]) {
      if (color[u] >= 0) used[static_cast<std::size_t>(color[u])] = true;
    }
    int c = 0;
    while (used[static_cast<std::size_t>(c)]) ++c;
    color[v] = c;
  }
  return color;
}

TEST(GreedyColoring, MatchesNaiveOracle) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 2;
    std::vector<CVector> pts;
    const std::size_t count = 50 + 20 * static_cast<std::size_t>(trial);
    for (std::size_t i = 0; i < count; ++i) pts.push_back(testing::gen_unit(rng, n));
    const double radius = rng.uniform(0.1, 0.6);
    const auto fast = greedy_coloring(PointCloud::from_vector(n, pts), radius);
    const auto slow = naive_coloring(pts, radius);
    ASSERT_EQ(fast.size(), slow.size());
    const int cf = *std::max_element(fast.begin(), fast.end());
    const int cs = *std::max_element(slow.begin(), slow.end());
    EXPECT_EQ(cf, cs) << "trial " << trial;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        if (distance(pts[i], pts[j]) <= radius) {
          EXPECT_NE(fast[i], fast[j]);
        }
      }
    }
  }
}

TEST(Covering, LargeRadiusGivesOneFamily) {
  for (int n = 1; n <= 2; ++n) {
    const ConvexDomain ball = make_ball(n);
    const Covering cov = build_covering(ball, 2.5, 4.0, 3);
    EXPECT_EQ(cov.s(), 1);
    EXPECT_EQ(cov.total_centers(), 1u);
    EXPECT_EQ(cov.family_count(), 2);
  }
}

TEST(Covering, DoubledFamiliesShareCenters) {
  const Covering cov = build_covering(make_ball(1), 0.1, 4.0, 4);
  for (int i = 0; i < cov.s(); ++i) EXPECT_EQ(&cov.family(i), &cov.family(i + cov.s()));
}

TEST(Covering, NormalsAreOutwardUnitVectors) {
  const ConvexDomain ell = make_ellipsoid({1.0, 0.6});
  const Covering cov = build_covering(ell, 0.2, 4.0, 5);
  for (const auto& fam : cov.base()) {
    for (std::size_t j = 0; j < fam.size(); ++j) {
      EXPECT_NEAR(norm(fam.normals[j]), 1.0, 1e-10);
      EXPECT_LT(std::abs(ell.rho(fam.centers[j])), ell.boundary_tolerance());
      EXPECT_LT(distance(fam.normals[j], outward_normal(ell, fam.centers[j])), 1e-10);
    }
  }
}

TEST(Covering, DeterministicGivenSeed) {
  const ConvexDomain ball = make_ball(2);
  const Covering a = build_covering(ball, 0.2, 4.0, 9);
  const Covering b = build_covering(ball, 0.2, 4.0, 9);
  ASSERT_EQ(a.s(), b.s());
  for (int f = 0; f < a.s(); ++f) {
    ASSERT_EQ(a.family(f).size(), b.family(f).size());
    for (std::size_t j = 0; j < a.family(f).size(); ++j) EXPECT_TRUE(a.family(f).centers[j] == b.family(f).centers[j]);
  }
}

TEST(Covering, DeletedCenterLeavesOrphans) {
  const ConvexDomain disc = make_ball(1);
  const Covering cov = build_covering(disc, 0.05, 4.0, 1);
  std::vector<CoveringFamily> base = cov.base();
  const CVector lost = base[0].centers[0];
  base[0].centers = remove_center(base[0].centers, 0);
  base[0].normals = remove_center(base[0].normals, 0);
  const Covering broken(cov.r(), cov.lambda(), std::move(base));
  const PointCloud net = boundary_net(disc, 1e-3, 2);
  const CoveringReport rep = verify_covering(broken, net);
  EXPECT_GT(rep.coverage_violation_count, 0u);
  EXPECT_GE(rep.max_nearest, cov.r());
  ASSERT_FALSE(rep.coverage_violations.empty());
  for (std::size_t idx : rep.coverage_violations) EXPECT_LT(distance(net[idx], lost), 2.0 * cov.r());
  EXPECT_EQ(rep.disjointness_violation_count, 0u);
}

TEST(Covering, MergedFamiliesViolateDisjointness) {
  const ConvexDomain disc = make_ball(1);
  const Covering cov = build_covering(disc, 0.05, 4.0, 1);
  ASSERT_GE(cov.s(), 2);
  std::vector<CoveringFamily> base = cov.base();
  for (std::size_t j = 0; j < base[1].size(); ++j) {
    base[0].centers.push_back(base[1].centers[j]);
    base[0].normals.push_back(base[1].normals[j]);
  }
  base.erase(base.begin() + 1);
  const Covering merged(cov.r(), cov.lambda(), std::move(base));
  const CoveringReport rep = verify_covering(merged, boundary_net(disc, 1e-3, 2));
  EXPECT_GT(rep.disjointness_violation_count, 0u);
  EXPECT_EQ(rep.coverage_violation_count, 0u);
  ASSERT_FALSE(rep.disjointness_violations.empty());
  const auto& v = rep.disjointness_violations.front();
  EXPECT_EQ(v.family, 0);
  EXPECT_LE(v.distance, 2.0 * cov.lambda() * cov.r());
}

TEST(Covering, FamilyCountStableAcrossRadii) {
  for (int n = 1; n <= 2; ++n) {
    const ConvexDomain ball = make_ball(n);
    const int s0 = build_covering(ball, 0.2, 4.0, 1).s();
    for (double r : {0.1, n == 1 ? 0.05 : 0.1}) {
      const Covering cov = build_covering(ball, r, 4.0, 1);
      EXPECT_LE(cov.s(), s0 + 2) << "n=" << n << " r=" << r;
    }
  }
}

TEST(Covering, DenserNetStillCovered) {
  const ConvexDomain ball = make_ball(2);
  const Covering cov = build_covering(ball, 0.1, 4.0, 6);
  const double h = denser_spacing(ball, cov.net_spacing, 2.0);
  const CoveringReport rep = verify_covering(cov, ball, h, 7);
  EXPECT_TRUE(rep.clean());
  EXPECT_LT(rep.max_nearest, cov.r());
}

TEST(Covering, FixedFamilyCountPadsWithEmptyFamilies) {
  CoveringOptions opts;
  opts.s_target = 40;
  const Covering cov = build_covering(make_ball(1), 0.1, 4.0, 1, opts);
  EXPECT_EQ(cov.s(), 40);
  EXPECT_LT(cov.colors, 40);
  EXPECT_EQ(cov.family(39).size(), 0u);
}

TEST(Covering, RejectsBadInputs) {
  EXPECT_THROW(build_covering(make_ball(1), 0.0, 4.0, 1), PreconditionError);
  EXPECT_THROW(build_covering(make_ball(1), 0.1, 1.0, 1), PreconditionError);
  CoveringOptions opts;
  opts.max_colors = 2;
  EXPECT_THROW(build_covering(make_ball(1), 0.05, 4.0, 1, opts), ConvergenceError);
}

TEST(Covering, UnreachableFamilyCountStopsAtTheNetCap) {
  // On S^3 halving the slack cannot bring the colors down to 20; the rebuilds
  // must stop once the net would exceed the cap instead of exhausting memory.
  CoveringOptions opts;
  opts.s_target = 20;
  opts.max_net_points = 2000000;
  try {
    build_covering(make_ball(2), 0.3, 4.0, 1, opts);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("covering degenerated", 0), 0u) << e.what();
  }
  opts.s_target = 0;
  opts.max_net_points = 10;
  EXPECT_THROW(build_covering(make_ball(1), 0.05, 4.0, 1, opts), ConvergenceError);
}

TEST(Covering, PropertyRandomEllipsoids) {
  Rng rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 1 + trial % 2;
    const ConvexDomain ell = testing::gen_ellipsoid(rng, n, 0.6, 1.2);
    const double r = rng.uniform(0.1, 0.25);
    const Covering cov = build_covering(ell, r, rng.uniform(2.0, 5.0), trial);
    const CoveringReport rep = verify_covering(cov, ell, denser_spacing(ell, cov.net_spacing, 2.0), trial + 100);
    EXPECT_TRUE(rep.clean()) << "trial " << trial;
    std::size_t total = 0;
    for (std::size_t k : rep.family_sizes) total += k;
    EXPECT_EQ(total, cov.total_centers());
  }
}

}  // namespace
}  // namespace peakembed
