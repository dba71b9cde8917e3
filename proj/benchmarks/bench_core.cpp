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

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "peakembed/covering.hpp"
#include "peakembed/map_state.hpp"
#include "peakembed/metric.hpp"
#include "peakembed/peaks.hpp"
#include "peakembed/rng.hpp"

namespace peakembed {
namespace {

std::vector<CVector> interior_points(const ConvexDomain& dom, std::size_t count) {
  return sample_interior(dom, count, 99);
}

PeakSum random_sum(const ConvexDomain& dom, int count, double m) {
  PeakSum g(dom.dim(), m, 0.45, 0.49);
  Rng rng(5);
  const auto pts = sample_boundary(dom, static_cast<std::size_t>(count), 6);
  for (const CVector& w : pts) g.add(w, outward_normal(dom, w), std::polar(rng.uniform(), rng.normal()));
  return g;
}

// One sum of 1000 peaks on S^3; range(0) is m.
void BM_PeakSumPruned(benchmark::State& state) {
  const ConvexDomain ball = make_ball(2);
  const PeakSum g = random_sum(ball, 1000, static_cast<double>(state.range(0)));
  const auto pts = interior_points(ball, 256);
  std::size_t i = 0;
  for (auto _ : state) {
    const CVector& z = pts[i++ % pts.size()];
    benchmark::DoNotOptimize(sum_eval(g, z, ball.depth_bounds(z)));
  }
}
BENCHMARK(BM_PeakSumPruned)->Arg(50)->Arg(400)->Arg(3000);

void BM_PeakSumNaive(benchmark::State& state) {
  const ConvexDomain ball = make_ball(2);
  const PeakSum g = random_sum(ball, 1000, static_cast<double>(state.range(0)));
  const auto pts = interior_points(ball, 256);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sum_eval_naive(g, pts[i++ % pts.size()]));
}
BENCHMARK(BM_PeakSumNaive)->Arg(50)->Arg(3000);

// range(0) is n, range(1) is 1000 r.
void BM_BuildCovering(benchmark::State& state) {
  const ConvexDomain ball = make_ball(static_cast<int>(state.range(0)));
  const double r = 1e-3 * static_cast<double>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(build_covering(ball, r, 4.0, 1).total_centers());
}
BENCHMARK(BM_BuildCovering)->Args({1, 50})->Args({1, 10})->Args({2, 200})->Args({2, 100})->Unit(benchmark::kMillisecond);

std::shared_ptr<Stage> random_stage(const ConvexDomain& dom, int s, double r, double m, std::uint64_t seed) {
  CoveringOptions opts;
  opts.s_target = s;
  auto st = std::make_shared<Stage>();
  st->covering = build_covering(dom, r, 4.0, seed, opts);
  std::vector<std::vector<Complex>> coeffs(2 * static_cast<std::size_t>(s));
  Rng rng(seed);
  for (int i = 0; i < 2 * s; ++i) {
    for (std::size_t j = 0; j < st->covering.family(i).size(); ++j) {
      coeffs[i].push_back(std::polar(0.1 * rng.uniform(), rng.normal()));
    }
  }
  st->params.m = m;
  st->params.r = r;
  st->field = PeakField(st->covering, m, std::move(coeffs), 0.45, 0.49);
  return st;
}

// Three stages on the disc with steepening peaks.
MapState disc_map() {
  const ConvexDomain disc = make_ball(1);
  constexpr int kS = 20;
  MapState F(disc, InitialMap({"scaled-identity", 0.5}, disc), kS);
  F.add_stage(random_stage(disc, kS, 0.1, 250.0, 1));
  F.add_stage(random_stage(disc, kS, 0.02, 5e3, 2));
  F.add_stage(random_stage(disc, kS, 0.005, 8e4, 3));
  return F;
}

void BM_MapEval(benchmark::State& state) {
  const MapState F = disc_map();
  const auto pts = interior_points(F.domain(), 256);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(F.eval(pts[i++ % pts.size()]));
}
BENCHMARK(BM_MapEval);

void BM_MapJacobian(benchmark::State& state) {
  const MapState F = disc_map();
  const auto pts = interior_points(F.domain(), 256);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(F.jac(pts[i++ % pts.size()]));
}
BENCHMARK(BM_MapJacobian);

// range(0) is 1000 mesh_h.
void BM_DistEstimate(benchmark::State& state) {
  const MapState F = disc_map();
  MeshOptions opts;
  opts.h = 1e-3 * static_cast<double>(state.range(0));
  const DomainMesh mesh = build_mesh(F.domain(), opts);
  state.counters["nodes"] = static_cast<double>(mesh.nodes.size());
  for (auto _ : state) benchmark::DoNotOptimize(dist_estimate(F, mesh, CVector{0.0}).estimate);
}
BENCHMARK(BM_DistEstimate)->Arg(20)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace peakembed

BENCHMARK_MAIN();
