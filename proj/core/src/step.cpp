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

#include "peakembed/step.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "peakembed/rng.hpp"

namespace peakembed {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double unit_ball_volume(int d) { return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0); }

CVector boundary_along(const ConvexDomain& dom, const CVector& target) {
  CVector dir = target - dom.interior_point();
  if (norm(dir) < 1e-12 * dom.diam()) dir = CVector::basis(dom.dim(), 0);
  return dom.interior_point() + dom.ray_exit(dir) * dir;
}

double norm_of(const Complex* v, int count) {
  double acc = 0.0;
  for (int i = 0; i < count; ++i) acc += std::norm(v[i]);
  return std::sqrt(acc);
}

std::string describe(const ClauseMargin& m) {
  std::ostringstream os;
  os.precision(6);
  os << "worst value " << m.worst_value << ", slack " << m.margin << ", " << m.violations << " of " << m.samples
     << " samples violate";
  if (m.worst_point.size() > 0) {
    os << ", at (";
    for (int k = 0; k < m.worst_point.size(); ++k) {
      if (k) os << ", ";
      os << m.worst_point[k].real() << (m.worst_point[k].imag() < 0 ? "-" : "+") << std::abs(m.worst_point[k].imag())
         << "i";
    }
    os << ")";
  }
  return os.str();
}

// Verification net: >= points_per_ball per r ball and >= min samples, capped in size.
PointCloud verification_net(const ConvexDomain& dom, double r, const StepOptions& opts, std::uint64_t seed) {
  const int d = 2 * dom.dim() - 1;
  double h = r * std::pow(unit_ball_volume(d) / opts.points_per_ball, 1.0 / d);
  h = std::min(h, spacing_for_count(dom, opts.min_boundary_samples));
  if (boundary_net_size(dom, h) > opts.max_verify_points) h = spacing_for_count(dom, opts.max_verify_points);
  return boundary_net(dom, h, seed);
}

}  // namespace

bool StepReport::retry_clauses_passed() const {
  return a_clause.passed() && c_clause.passed() && d_clause.passed() && peaks.passed() && L_disjoint;
}

std::vector<std::string> StepReport::failures() const {
  std::vector<std::string> out;
  if (!a_clause.passed()) out.push_back("a");
  if (!b_clause.passed()) out.push_back("b");
  if (!c_clause.passed()) out.push_back("c");
  if (!d_clause.passed()) out.push_back("d");
  if (!e_passed()) out.push_back("e");
  if (!peaks.passed()) out.push_back("peak(" + peaks.failed_clause() + ")");
  if (!L_disjoint) out.push_back("L");
  return out;
}

double continuity_radius(const MapState& F, double eta, double lambda, std::size_t pairs, std::uint64_t seed,
                         double safety) {
  const ConvexDomain& dom = F.domain();
  const int s2 = 2 * F.s();
  Rng rng(seed);
  double r0 = kInf;
  std::vector<Complex> fz(static_cast<std::size_t>(F.components()));
  std::vector<Complex> fw(fz.size());
  for (std::size_t t = 0; t < pairs; ++t) {
    CVector g(dom.dim());
    for (int k = 0; k < dom.dim(); ++k) g[k] = Complex(rng.normal(), rng.normal());
    const CVector w = boundary_along(dom, dom.interior_point() + g);
    CVector u(dom.dim());
    for (int k = 0; k < dom.dim(); ++k) u[k] = Complex(rng.normal(), rng.normal());
    u /= norm(u);
    const double len = dom.diam() * std::pow(10.0, rng.uniform(-6.0, 0.0));
    const CVector z = boundary_along(dom, w + len * u);
    const double dist = distance(z, w);
    if (!(dist > 0.0) || dist / (2.0 * lambda) >= r0) continue;
    F.eval(z, fz.data());
    F.eval(w, fw.data());
    double worst = std::abs(norm_of(fz.data(), F.components()) - norm_of(fw.data(), F.components()));
    for (int i = 0; i < s2; ++i) worst = std::max(worst, std::abs(fz[i] - fw[i]));
    if (worst >= eta) r0 = dist / (2.0 * lambda);
  }
  return r0 / safety;
}

double spacing_for_count(const ConvexDomain& dom, std::size_t count) {
  const int d = 2 * dom.dim() - 1;
  double h = std::pow(boundary_measure_bound(dom) / static_cast<double>(std::max<std::size_t>(count, 1)), 1.0 / d);
  for (int i = 0; i < 200 && boundary_net_size(dom, h) < count; ++i) h *= 0.97;
  return h;
}

StepResult boost_step(const MapState& F, double a, double eps, const CompactSet& K, const CompactSet& L,
                      const CVector& p0, std::optional<double> sigma, double delta, const DomainConstants& consts,
                      const StepOptions& opts, const DomainMesh* mesh) {
  const ConvexDomain& dom = F.domain();
  if (!(eps > 0.0)) throw PreconditionError("step: eps must be positive");
  if (!(a - std::sqrt(eps) > 0.5) || !(a + eps < 1.0)) {
    throw PreconditionError("step: need a - eps^(1/2) > 1/2 and a + eps < 1");
  }
  if (!(delta > 0.0)) throw PreconditionError("step: delta must be positive");
  if (F.h().spec().factor == 0.0) throw PreconditionError("step: h must be nonconstant");
  if (!(dom.rho(p0) < 0.0)) throw PreconditionError("step: p0 must lie in D");
  if (!(L.depth > K.depth)) throw PreconditionError("step: L must lie inside the interior of K");

  const int s = F.s();
  const int n = dom.dim();
  const double lambda = consts.lambda;
  StepReport rep;
  rep.k = opts.k;
  rep.a = a;
  rep.eps = eps;
  rep.delta = delta;
  rep.s = s;
  rep.eta = eps / (120.0 * s);
  const double eta = rep.eta;
  const std::uint64_t k = static_cast<std::uint64_t>(opts.k);

  // Hypothesis on F: |F| < a - eps^(1/2) on S.
  const auto hyp = sample_boundary(dom, opts.min_boundary_samples, derive_seed(opts.seed, Stream::kStep, k, 1));
  for (const CVector& z : hyp) {
    if (!(norm(F.eval(z)) < a - std::sqrt(eps))) throw PreconditionError("step: |F| < a - eps^(1/2) fails on S");
  }

  rep.r0 = continuity_radius(F, eta, lambda, opts.continuity_pairs, derive_seed(opts.seed, Stream::kStep, k, 2),
                             opts.continuity_safety);
  const double cap = std::min({0.99 * L.depth / lambda, 0.99 * dom.diam() / 4.0, 0.99 * consts.r1 / lambda});
  const double floor = opts.r_floor_fraction * dom.diam();
  const double r_prelim = std::min(std::max(rep.r0, floor), cap);

  CoveringOptions copts = opts.covering;
  copts.s_target = s;
  const std::uint64_t cov_seed = derive_seed(opts.seed, Stream::kCovering, k, 1);
  const Covering prelim = build_covering(dom, r_prelim, lambda, cov_seed, copts);
  rep.C2 = estimate_C2(prelim, verification_net(dom, r_prelim, opts, derive_seed(opts.seed, Stream::kStep, k, 3)),
                       consts);
  const double mr2 = mr2_for(eta, consts.alpha2, rep.C2);

  // |G| <= a N exp(-m depth) on K; pick r so that this is below delta / 2.
  double r_delta = r_prelim;
  const double n_prelim = static_cast<double>(std::max<std::size_t>(prelim.total_centers(), 1));
  for (int it = 0; it < 20; ++it) {
    const double count = n_prelim * std::pow(r_prelim / r_delta, 2 * n - 1);
    const double logt = std::log(std::max(2.0 * a * count / delta, 2.0));
    r_delta = std::min(r_prelim, std::sqrt(mr2 * K.depth / logt));
  }
  rep.r_initial = std::min(r_prelim, r_delta);

  const auto ksamples = compact_samples(dom, K, opts.compact_samples, derive_seed(opts.seed, Stream::kStep, k, 4));
  rep.compact_samples = ksamples.size();

  auto stage = std::make_shared<Stage>();
  StepReport last = rep;
  const double band = a - std::pow(eps, 1.0 / 7.0);
  const double inc = std::pow(eps, 2.0 / 7.0);

  auto attempt = [&](const PeakParams& p) -> std::string {
    StepReport r = rep;
    r.attempts = p.halvings + 1;
    r.r = p.r;
    r.m = p.m;
    Covering cov = build_covering(dom, p.r, lambda, cov_seed, copts);
    r.covering_retried = cov.slack_retries > 0;
    r.centers = cov.total_centers();

    std::vector<std::vector<Complex>> coeffs(2 * static_cast<std::size_t>(s));
    std::vector<Complex> fc(static_cast<std::size_t>(F.components()));
    double resid = 0.0;
    for (int f = 0; f < s; ++f) {
      const CoveringFamily& fam = cov.family(f);
      coeffs[f].resize(fam.size());
      coeffs[f + s].resize(fam.size());
      for (std::size_t j = 0; j < fam.size(); ++j) {
        F.eval(fam.centers[j], fc.data());
        const double nf = norm_of(fc.data(), F.components());
        const auto [b0, b1] = solve_coefficients(fc[f], fc[f + s], a, nf, s);
        coeffs[f][j] = b0;
        coeffs[f + s][j] = b1;
        const double target = (a * a - nf * nf) / (2.0 * s);
        resid = std::max({resid, std::abs(fc[f] * std::conj(b0) + fc[f + s] * std::conj(b1)),
                          std::abs(std::norm(b0) + std::norm(b1) - target)});
      }
    }
    r.coefficient_residual = resid;
    PeakField field(cov, p.m, std::move(coeffs), consts.alpha1, consts.r1, opts.prune_threshold);

    const PointCloud net = verification_net(dom, p.r, opts, derive_seed(opts.seed, Stream::kStep, k, 5));
    r.boundary_samples = net.size();
    r.min_S_before = kInf;
    r.min_S_after = kInf;
    r.max_S_after = 0.0;
    std::vector<Complex> fz(static_cast<std::size_t>(F.components()));
    std::vector<Complex> gz(static_cast<std::size_t>(2 * s));
    for (std::size_t t = 0; t < net.size(); ++t) {
      const CVector z = net[t];
      F.eval(z, fz.data());
      std::fill(gz.begin(), gz.end(), Complex(0.0, 0.0));
      field.add_values(z, dom.depth_bounds(z), gz.data());
      const double nF = norm_of(fz.data(), F.components());
      const double nG = norm_of(gz.data(), 2 * s);
      for (int i = 0; i < 2 * s; ++i) fz[i] += gz[i];
      const double nFG = norm_of(fz.data(), F.components());
      r.min_S_before = std::min(r.min_S_before, nF);
      r.min_S_after = std::min(r.min_S_after, nFG);
      r.max_S_after = std::max(r.max_S_after, nFG);
      r.a_clause.record(nFG, a + eps - nFG, -1, z, false);
      if (nFG <= band) {
        r.b_clause.record(nFG - nF, nFG - nF - inc, -1, z);
      } else {
        ++r.band_reached;
      }
      r.d_clause.record(nG * nG, 1.0 - nF - nG * nG, -1, z);
    }
    for (const CVector& z : ksamples) {
      std::fill(gz.begin(), gz.end(), Complex(0.0, 0.0));
      field.add_values(z, dom.depth_bounds(z), gz.data());
      const double nG = norm_of(gz.data(), 2 * s);
      r.c_clause.record(nG, delta - nG, -1, z);
    }
    PeakClauseOptions popts = opts.peak;
    popts.seed = derive_seed(opts.seed, Stream::kPeaks, k, 1);
    r.peaks = check_peak_clauses(dom, cov, field, p, net, {}, popts);
    r.L_disjoint = lambda * p.r < L.depth;

    stage->k = opts.k;
    stage->a = a;
    stage->eps = eps;
    stage->delta = delta;
    stage->params = p;
    stage->covering = std::move(cov);
    stage->field = std::move(field);
    stage->coefficient_residual = resid;
    last = r;
    if (r.retry_clauses_passed()) return {};
    for (const std::string& f : r.failures()) {
      if (f != "b" && f != "e") return f;
    }
    return "?";
  };

  try {
    choose_params(eta, consts.alpha2, rep.C2, rep.r_initial, lambda, attempt, opts.retries);
  } catch (const ConvergenceError&) {
    // The last attempt is kept and reported.
  }
  rep = last;
  rep.r0_honored = rep.r <= rep.r0;

  if (mesh != nullptr) {
    rep.distance_before = sigma ? *sigma : dist_estimate(F, *mesh, p0).estimate;
    MapState next = F;
    next.add_stage(stage);
    const DistanceResult d = dist_estimate(next, *mesh, p0);
    rep.distance_after = d.estimate;
    rep.distance_lower = d.lower_bound;
  }

  if (opts.strict && !rep.passed()) {
    const std::string clause = rep.failures().front();
    const ClauseMargin* m = nullptr;
    if (clause == "a") m = &rep.a_clause;
    if (clause == "b") m = &rep.b_clause;
    if (clause == "c") m = &rep.c_clause;
    if (clause == "d") m = &rep.d_clause;
    std::string detail = m != nullptr ? describe(*m) : "failed after " + std::to_string(opts.retries) + " retries";
    if (clause == "e") detail = "distance gain " + std::to_string(rep.gain()) + " is not positive";
    throw VerificationError("step(" + clause + ")", detail);
  }
  return {stage, rep};
}

}  // namespace peakembed
