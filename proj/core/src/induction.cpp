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

#include "peakembed/induction.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "peakembed/rng.hpp"

namespace peakembed {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double diff_norm(const std::vector<Complex>& x, const std::vector<Complex>& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::norm(x[i] - y[i]);
  return std::sqrt(acc);
}

double stage1_radius_cap(const ConvexDomain& dom, const DomainConstants& consts, const CompactSet& L) {
  return std::min({0.99 * L.depth / consts.lambda, 0.99 * dom.diam() / 4.0, 0.99 * consts.r1 / consts.lambda});
}

}  // namespace

SpotCheck spot_check(const MapState& F, std::size_t points, std::size_t pairs, std::uint64_t seed) {
  const ConvexDomain& dom = F.domain();
  SpotCheck out;
  out.min_singular_value = kInf;
  out.min_image_distance = kInf;
  for (const CVector& z : sample_interior(dom, points, derive_seed(seed, Stream::kSpotCheck, 0, 1))) {
    const CMatrix J = F.jac(z);
    Eigen::MatrixXcd M(J.rows(), J.cols());
    for (int i = 0; i < J.rows(); ++i)
      for (int j = 0; j < J.cols(); ++j) M(i, j) = J(i, j);
    const double sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(M).singularValues().minCoeff();
    out.min_singular_value = std::min(out.min_singular_value, sv);
    ++out.points;
  }
  const auto pts = sample_interior(dom, 2 * pairs, derive_seed(seed, Stream::kSpotCheck, 0, 2));
  for (std::size_t t = 0; t + 1 < pts.size(); t += 2) {
    if (!(distance(pts[t], pts[t + 1]) > 0.0)) continue;
    out.min_image_distance = std::min(out.min_image_distance, diff_norm(F.eval(pts[t]), F.eval(pts[t + 1])));
    ++out.pairs;
  }
  return out;
}

std::vector<MapState> RunResult::states() const {
  std::vector<MapState> out;
  for (std::size_t k = 0; k <= F.stage_count(); ++k) out.push_back(F.truncated(k));
  return out;
}

int probe_family_count(const ConvexDomain& dom, const DomainConstants& consts, const RunOptions& opts) {
  if (opts.step.s_target > 0) return opts.step.s_target;
  const Compacts c1 = choose_compacts(dom, 1, {}, 0.0, derive_seed(opts.seed, Stream::kStep, 0, 1), opts.compacts);
  const double r = stage1_radius_cap(dom, consts, c1.L);
  return build_covering(dom, r, consts.lambda, derive_seed(opts.seed, Stream::kCovering, 0, 1), opts.step.covering).s();
}

RunResult run(const ConvexDomain& dom, const InitialMapSpec& h_spec, const DomainConstants& consts,
              const RunOptions& opts, const StageCallback& on_stage) {
  if (opts.stages < 0) throw PreconditionError("run: stages must be >= 0");
  const InitialMap h(h_spec, dom);
  const int s = probe_family_count(dom, consts, opts);
  RunResult res(MapState(dom, h, s));
  res.schedule = make_schedule(h.sup_S_norm(), opts.a1, std::max(opts.stages, 1));
  res.schedule.count = opts.stages;
  const CVector p0 = dom.interior_point();

  std::optional<DomainMesh> mesh;
  if (opts.measure_distance && dom.dim() <= 2) mesh = build_mesh(dom, opts.mesh);
  std::optional<double> sigma;
  if (mesh) {
    res.d0 = dist_estimate(res.F, *mesh, p0).estimate;
    sigma = res.d0;
  }

  const PointCloud net =
      boundary_net(dom, spacing_for_count(dom, opts.properness_samples), derive_seed(opts.seed, Stream::kMetric, 0, 1));
  const auto interior = sample_interior(dom, opts.interior_samples, derive_seed(opts.seed, Stream::kMetric, 0, 2));
  auto min_S = [&](const MapState& F) {
    double v = kInf;
    for (std::size_t t = 0; t < net.size(); ++t) v = std::min(v, norm(F.eval(net[t])));
    return v;
  };

  std::vector<double> d_meas;
  std::vector<double> d_low;
  std::vector<double> eps_list;
  if (mesh) {
    d_meas.push_back(res.d0);
    d_low.push_back(res.d0);
  }
  double prev_K = kInf;
  double prev_delta = kInf;
  double min_prev = min_S(res.F);
  for (int k = 1; k <= opts.stages; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    TraceRow row;
    row.k = k;
    row.a = res.schedule.a(k);
    row.eps = res.schedule.eps(k);
    try {
      const MapState& F = res.F;
      const Compacts cs = choose_compacts(
          dom, k, [&](const CVector& z) { return norm(F.eval(z)); }, min_prev,
          derive_seed(opts.seed, Stream::kStep, static_cast<std::uint64_t>(k), 10), opts.compacts, prev_K);
      prev_K = cs.K.depth;
      row.K_depth = cs.K.depth;
      row.L_depth = cs.L.depth;
      row.K_enlargements = cs.enlargements;
      row.delta = std::min({delta_for_C1(dom.dim(), cs.K, cs.L, opts.delta_budget, opts.path_cap), 0.5 * row.eps,
                            prev_delta});
      prev_delta = row.delta;

      StepOptions so = opts.step;
      so.k = k;
      so.seed = opts.seed;
      so.s_target = s;
      StepResult st = boost_step(F, row.a, row.eps, cs.K, cs.L, p0, sigma, row.delta / std::ldexp(1.0, k), consts, so,
                                 mesh ? &*mesh : nullptr);
      res.F.add_stage(st.stage);
      res.K.push_back(cs.K);
      res.L.push_back(cs.L);
      res.schedule.deltas.push_back(row.delta);
      eps_list.push_back(row.eps);

      row.step = st.report;
      row.s = s;
      row.m = st.report.m;
      row.r = st.report.r;
      row.N_total = st.report.centers;
      row.min_S_norm = min_S(res.F);
      min_prev = row.min_S_norm;
      row.max_S_norm = 0.0;
      for (std::size_t t = 0; t < net.size(); ++t) row.max_S_norm = std::max(row.max_S_norm, norm(res.F.eval(net[t])));
      for (const CVector& z : interior) row.max_interior_norm = std::max(row.max_interior_norm, norm(res.F.eval(z)));
      if (st.report.distance_after) {
        row.d = st.report.distance_after;
        row.d_lower = st.report.distance_lower;
        row.gain = st.report.gain();
        sigma = row.d;
        d_meas.push_back(*row.d);
        d_low.push_back(*row.d_lower);
        row.E_fit_running = fit_distances(d_meas, d_low, eps_list).E_fit;
      }
      row.spot = spot_check(res.F, opts.spot_points, opts.spot_pairs,
                            derive_seed(opts.seed, Stream::kSpotCheck, static_cast<std::uint64_t>(k), 1));
    } catch (const Error& e) {
      res.error = "stage " + std::to_string(k) + ": " + e.what();
      res.failed_stage = k;
      break;
    }
    row.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    res.trace.push_back(row);
    if (on_stage) on_stage(res.trace.back());
  }

  std::vector<double> a_list;
  for (const TraceRow& row : res.trace) a_list.push_back(row.a);
  const auto states = res.states();
  res.properness = properness_trace(states, net, a_list, eps_list);
  if (mesh) res.metric = fit_distances(d_meas, d_low, eps_list);

  // |F_(k-1) - F_K| <= delta_k on K_k.
  const std::size_t done = res.F.stage_count();
  for (std::size_t k = 1; k <= done; ++k) {
    TailCheck tc;
    tc.k = static_cast<int>(k);
    tc.delta = res.schedule.deltas[k - 1];
    for (const CVector& z : compact_samples(dom, res.K[k - 1], opts.tail_samples,
                                            derive_seed(opts.seed, Stream::kValidation, k, 1))) {
      tc.max_diff = std::max(tc.max_diff, diff_norm(states[k - 1].eval(z), res.F.eval(z)));
    }
    res.tail.push_back(tc);
  }
  return res;
}

std::vector<RunCheck> run_checks(const RunResult& res, double max_principle_tol) {
  std::vector<RunCheck> out;
  auto add = [&](std::string name, bool ok, const std::string& detail) {
    out.push_back({std::move(name), ok, detail});
  };
  auto num = [](double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
  };
  add("completed", !res.error, res.error.value_or(""));

  bool band = true;
  std::string band_detail;
  for (const TraceRow& row : res.trace) {
    const double top = row.a + row.eps;
    if (!row.step.a_clause.passed() || row.max_S_norm > top) {
      band = false;
      band_detail = "stage " + std::to_string(row.k) + ": max " + num(row.max_S_norm) + " > " + num(top);
      break;
    }
  }
  add("band", band, band_detail);

  bool dich = true;
  std::string dich_detail;
  for (const NormExtrema& p : res.properness) {
    if (p.k >= 1 && p.violations > 0) {
      dich = false;
      dich_detail = "stage " + std::to_string(p.k) + ": " + std::to_string(p.violations) + " net points in neither branch";
      break;
    }
  }
  add("dichotomy", dich, dich_detail);

  bool incr = true;
  std::string incr_detail;
  for (std::size_t k = 1; k < res.properness.size(); ++k) {
    if (!(res.properness[k].min_norm > res.properness[k - 1].min_norm)) {
      incr = false;
      incr_detail = "min_S " + num(res.properness[k - 1].min_norm) + " -> " + num(res.properness[k].min_norm) +
                    " at stage " + std::to_string(k);
      break;
    }
  }
  add("min_S_increasing", incr, incr_detail);

  bool stab = true;
  std::string stab_detail;
  for (const TraceRow& row : res.trace) {
    if (!row.step.c_clause.passed()) {
      stab = false;
      stab_detail = "stage " + std::to_string(row.k) + ": |G| " + num(row.step.c_clause.worst_value) + " on K";
      break;
    }
  }
  add("interior_stability", stab, stab_detail);

  bool tail = true;
  std::string tail_detail;
  for (const TailCheck& t : res.tail) {
    if (!t.passed()) {
      tail = false;
      tail_detail = "stage " + std::to_string(t.k) + ": " + num(t.max_diff) + " > " + num(t.delta);
      break;
    }
  }
  add("tail", tail, tail_detail);

  if (res.metric && res.trace.empty()) {
    add("distance", true, "no stages to fit");
  } else if (res.metric) {
    const MetricReport& m = *res.metric;
    const bool ok = m.nondecreasing && m.E_fit && *m.E_fit > 0.0;
    add("distance", ok,
        ok ? "" : (m.nondecreasing ? "E_fit is not positive" : "distance decreased by more than the tolerance"));
  }

  bool imm = true;
  bool inj = true;
  bool maxp = true;
  std::string imm_detail;
  std::string inj_detail;
  std::string maxp_detail;
  for (const TraceRow& row : res.trace) {
    if (imm && !(row.spot.min_singular_value > 1e-8)) {
      imm = false;
      imm_detail = "stage " + std::to_string(row.k) + ": smallest singular value " + num(row.spot.min_singular_value);
    }
    if (inj && !(row.spot.min_image_distance > 0.0)) {
      inj = false;
      inj_detail = "stage " + std::to_string(row.k) + ": two distinct points share an image";
    }
    if (maxp && row.max_interior_norm > row.max_S_norm + max_principle_tol) {
      maxp = false;
      maxp_detail = "stage " + std::to_string(row.k) + ": interior " + num(row.max_interior_norm) + " > boundary " +
                    num(row.max_S_norm);
    }
  }
  add("immersion", imm, imm_detail);
  add("injectivity", inj, inj_detail);
  add("max_principle", maxp, maxp_detail);

  for (const TraceRow& row : res.trace) {
    std::string failed;
    for (const std::string& f : row.step.failures()) failed += (failed.empty() ? "" : ",") + f;
    add("stage " + std::to_string(row.k), failed.empty(), failed.empty() ? "" : "failed clauses " + failed);
  }
  return out;
}

}  // namespace peakembed
