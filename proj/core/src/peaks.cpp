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

#include "peakembed/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "peakembed/rng.hpp"

namespace peakembed {
namespace {

constexpr double kUnderflow = -745.0;

const double* packed(const CVector& z) { return reinterpret_cast<const double*>(z.begin()); }

Complex exp_or_zero(Complex e) { return e.real() < kUnderflow ? Complex(0.0, 0.0) : std::exp(e); }

// -m <c - z, nu> with nu already conjugated.
Complex exponent(const double* c, const CVector& conj_nu, const CVector& z, double m) {
  Complex acc(0.0, 0.0);
  for (int k = 0; k < z.size(); ++k) acc += (Complex(c[2 * k], c[2 * k + 1]) - z[k]) * conj_nu[k];
  return -m * acc;
}

CVector conjugate(const CVector& v) {
  CVector out(v.size());
  for (int k = 0; k < v.size(); ++k) out[k] = std::conj(v[k]);
  return out;
}

}  // namespace

Complex peak_eval(const PeakFunction& pk, const CVector& z) {
  return exp_or_zero(-pk.m * hermitian_inner(pk.center - z, pk.normal));
}

CVector peak_grad(const PeakFunction& pk, const CVector& z) {
  const Complex phi = peak_eval(pk, z);
  CVector g(z.size());
  for (int k = 0; k < z.size(); ++k) g[k] = pk.m * std::conj(pk.normal[k]) * phi;
  return g;
}

PeakSum::PeakSum(int n, double m, double alpha1, double r1) : n_(n), m_(m), alpha1_(alpha1), r1_(r1) {
  if (!(m >= 0.0)) throw PreconditionError("PeakSum: m must be nonnegative");
}

void PeakSum::add(const CVector& center, const CVector& normal, Complex beta) {
  if (center.size() != n_ || normal.size() != n_) throw DimensionError("PeakSum::add: dimension mismatch");
  centers_.push_back(center);
  normals_.push_back(normal);
  coeffs_.push_back(beta);
}

Complex sum_eval(const PeakSum& g, const CVector& z, const DepthBounds& depth, double prune_threshold) {
  const double m = g.m();
  if (m > 0.0 && m * depth.lo >= prune_threshold) return {0.0, 0.0};
  const bool by_distance = m > 0.0 && g.alpha1() > 0.0 && depth.hi < g.r1();
  Complex acc(0.0, 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const PeakFunction pk = g.peak(j);
    if (by_distance && g.alpha1() * m * distance_sq(z, pk.center) > prune_threshold) continue;
    acc += g.coeff(j) * peak_eval(pk, z);
  }
  return acc;
}

Complex sum_eval_naive(const PeakSum& g, const CVector& z) {
  Complex acc(0.0, 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) acc += g.coeff(j) * peak_eval(g.peak(j), z);
  return acc;
}

PeakField::PeakField(const Covering& cov, double m, std::vector<std::vector<Complex>> coeffs, double alpha1,
                     double r1, double prune_threshold)
    : s_(cov.s()),
      m_(m),
      alpha1_(alpha1),
      r1_(r1),
      prune_(prune_threshold),
      coeffs_(std::move(coeffs)) {
  if (!(m >= 0.0)) throw PreconditionError("PeakField: m must be nonnegative");
  if (coeffs_.size() != static_cast<std::size_t>(2 * s_)) {
    throw DimensionError("PeakField: expected one coefficient list per family index 0..2s-1");
  }
  n_ = cov.base().front().centers.dim();
  centers_ = PointCloud(n_);
  centers_.reserve(cov.total_centers());
  for (int f = 0; f < s_; ++f) {
    const CoveringFamily& fam = cov.family(f);
    if (coeffs_[f].size() != fam.size() || coeffs_[f + s_].size() != fam.size()) {
      throw DimensionError("PeakField: coefficient count differs from family size");
    }
    for (std::size_t j = 0; j < fam.size(); ++j) {
      for (const Complex b : {coeffs_[f][j], coeffs_[f + s_][j]}) {
        if (std::abs(b) > 1.0 + 1e-12) throw PreconditionError("PeakField: coefficients must satisfy |beta| <= 1");
      }
      centers_.push_back(fam.centers[j]);
      normals_.push_back(fam.normals[j]);
      conj_normals_.push_back(conjugate(fam.normals[j]));
      family_.push_back(f);
      local_.push_back(static_cast<std::uint32_t>(j));
      beta_lo_.push_back(coeffs_[f][j]);
      beta_hi_.push_back(coeffs_[f + s_][j]);
    }
  }
  prune_radius_ = (m > 0.0 && alpha1 > 0.0) ? std::sqrt(prune_ / (alpha1 * m))
                                            : std::numeric_limits<double>::infinity();
  if (std::isfinite(prune_radius_) && !centers_.empty()) grid_ = SpatialGrid(centers_, prune_radius_);
}

Complex PeakField::coeff(std::size_t c, int i) const {
  if (i == family_[c]) return beta_lo_[c];
  if (i == family_[c] + s_) return beta_hi_[c];
  return {0.0, 0.0};
}

Complex PeakField::phi(std::size_t c, const CVector& z) const {
  return exp_or_zero(exponent(centers_.raw(c), conj_normals_[c], z, m_));
}

PeakField::Mode PeakField::mode(const DepthBounds& depth) const {
  if (m_ > 0.0 && m_ * depth.lo >= prune_) return Mode::kAll;
  if (std::isfinite(prune_radius_) && depth.hi < r1_) return Mode::kGrid;
  return Mode::kNone;
}

template <class Visit>
void PeakField::visit_terms(const CVector& z, const DepthBounds& depth, Visit&& visit) const {
  if (z.size() != n_) throw DimensionError("PeakField: point dimension mismatch");
  switch (mode(depth)) {
    case Mode::kAll:
      return;
    case Mode::kGrid: {
      const double r2 = prune_radius_ * prune_radius_;
      const double* q = packed(z);
      grid_.for_each_candidate(q, prune_radius_, [&](std::uint32_t c, const double* x) {
        if (packed_distance_sq(q, x, 2 * n_) <= r2) visit(c, exp_or_zero(exponent(x, conj_normals_[c], z, m_)));
        return true;
      });
      return;
    }
    case Mode::kNone:
      for (std::size_t c = 0; c < family_.size(); ++c) visit(c, phi(c, z));
      return;
  }
}

void PeakField::add_values(const CVector& z, const DepthBounds& depth, Complex* out) const {
  visit_terms(z, depth, [&](std::size_t c, Complex ph) {
    out[family_[c]] += beta_lo_[c] * ph;
    out[family_[c] + s_] += beta_hi_[c] * ph;
  });
}

void PeakField::add_jacobian(const CVector& z, const DepthBounds& depth, CMatrix& jac, int row0, Complex* out) const {
  visit_terms(z, depth, [&](std::size_t c, Complex ph) {
    const int lo = row0 + family_[c];
    const int hi = lo + s_;
    const Complex vlo = beta_lo_[c] * ph;
    const Complex vhi = beta_hi_[c] * ph;
    if (out != nullptr) {
      out[family_[c]] += vlo;
      out[family_[c] + s_] += vhi;
    }
    const CVector& cn = conj_normals_[c];
    for (int k = 0; k < n_; ++k) {
      const Complex d = m_ * cn[k];
      jac(lo, k) += vlo * d;
      jac(hi, k) += vhi * d;
    }
  });
}

PeakSum PeakField::sum(int i) const {
  if (i < 0 || i >= 2 * s_) throw PreconditionError("PeakField::sum: family index out of range");
  PeakSum g(n_, m_, alpha1_, r1_);
  const int f = i % s_;
  for (std::size_t c = 0; c < family_.size(); ++c) {
    if (family_[c] == f) g.add(centers_[c], normals_[c], coeff(c, i));
  }
  return g;
}

std::vector<std::uint32_t> PeakField::centers_within(const CVector& z, double radius) const {
  std::vector<std::uint32_t> out;
  const double r2 = radius * radius;
  const double* q = packed(z);
  if (std::isfinite(prune_radius_) && !family_.empty()) {
    grid_.for_each_candidate(q, radius, [&](std::uint32_t c, const double* x) {
      if (packed_distance_sq(q, x, 2 * n_) <= r2) out.push_back(c);
      return true;
    });
  } else {
    for (std::size_t c = 0; c < family_.size(); ++c) {
      if (packed_distance_sq(q, centers_.raw(c), 2 * n_) <= r2) out.push_back(static_cast<std::uint32_t>(c));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double mr2_for(double eta, double alpha2, double C2) { return std::log(C2 / eta) / (16.0 * alpha2); }

PeakParams choose_params(double eta, double alpha2, double C2, double r_max, double lambda,
                         const std::function<std::string(const PeakParams&)>& check, int max_halvings) {
  if (!(eta > 0.0) || !(alpha2 > 0.0) || !(C2 > 0.0)) throw PreconditionError("choose_params: eta, alpha2, C2 must be positive");
  if (!(r_max > 0.0)) throw PreconditionError("choose_params: r_max must be positive");
  if (!(eta <= C2 * std::exp(-4.0 / 3.0))) throw PreconditionError("choose_params: eta must not exceed C2 e^(-4/3)");
  PeakParams p;
  p.eta = eta;
  p.alpha2 = alpha2;
  p.C2 = C2;
  p.C = std::pow(C2, -1.0 / 16.0);
  p.lambda = lambda;
  p.mu = lambda * std::sqrt(5.0 / 6.0);
  const double mr2 = mr2_for(eta, alpha2, C2);
  p.r = r_max;
  std::string failure;
  for (p.halvings = 0;; ++p.halvings) {
    p.m = mr2 / (p.r * p.r);
    if (!check) return p;
    failure = check(p);
    if (failure.empty()) return p;
    if (p.halvings == max_halvings) break;
    p.r *= 0.5;
  }
  throw ConvergenceError("choose_params: clause (" + failure + ") still fails after " + std::to_string(max_halvings) +
                         " halvings of r");
}

std::pair<Complex, Complex> solve_coefficients(Complex fi, Complex fis, double a, double norm_F_center, int s) {
  if (s < 1) throw PreconditionError("solve_coefficients: s must be >= 1");
  if (!(a <= 1.0)) throw PreconditionError("solve_coefficients: a must be <= 1");
  if (!(a * a > norm_F_center * norm_F_center)) throw PreconditionError("no boosting room");
  const double target = (a * a - norm_F_center * norm_F_center) / (2.0 * s);
  const double len = std::hypot(std::abs(fi), std::abs(fis));
  Complex u(1.0, 0.0);
  Complex v(0.0, 0.0);
  if (len > 0.0) {
    u = -std::conj(fis) / len;
    v = std::conj(fi) / len;
  }
  const double scale = std::sqrt(target);
  return {scale * u, scale * v};
}

double estimate_C2(const Covering& cov, const PointCloud& samples, const DomainConstants& c, double safety) {
  const double r = cov.r();
  const double lr = cov.lambda() * r;
  const double m = (4.0 / 3.0) / (16.0 * c.alpha2 * r * r);
  const double shift = 16.0 * c.alpha2 * r * r;
  const int s = cov.s();
  std::vector<std::vector<Complex>> zero(2 * static_cast<std::size_t>(s));
  for (int i = 0; i < 2 * s; ++i) zero[i].assign(cov.family(i).size(), Complex(0.0, 0.0));
  const PeakField field(cov, m, std::move(zero), c.alpha1, c.r1);
  const double lr2 = lr * lr;

  double best = 0.0;
  std::vector<double> acc(static_cast<std::size_t>(s));
  for (std::size_t t = 0; t < samples.size(); ++t) {
    const CVector z = samples[t];
    std::fill(acc.begin(), acc.end(), 0.0);
    // Sample points lie on S, inside the collar, so the distance cut is valid.
    for (std::uint32_t j : field.centers_within(z, field.prune_radius())) {
      const double* x = field.centers().raw(j);
      if (packed_distance_sq(packed(z), x, 2 * z.size()) < lr2) continue;
      const CVector nu = field.normal(j);
      double q = 0.0;
      for (int k = 0; k < z.size(); ++k) {
        const Complex d = Complex(x[2 * k], x[2 * k + 1]) - z[k];
        q += d.real() * nu[k].real() + d.imag() * nu[k].imag();
      }
      acc[field.family_of(j)] += std::exp(-m * (q - shift));
    }
    for (double v : acc) best = std::max(best, v);
  }
  // With no off-ball mass the constant is unconstrained; 1 keeps ln(C2 / eta) meaningful.
  return std::max(safety * best, 1.0);
}

void ClauseMargin::record(double value, double slack, int fam, const CVector& z, bool strict) {
  ++samples;
  if (strict ? !(slack > 0.0) : !(slack >= 0.0)) ++violations;
  if (slack < margin || samples == 1) {
    margin = slack;
    worst_value = value;
    family = fam;
    worst_point = z;
  }
}

std::string PeakClauseReport::failed_clause() const {
  if (!a.passed()) return "a";
  if (!b.passed()) return "b";
  if (!c.passed()) return "c";
  if (!d.passed()) return "d";
  return {};
}

PeakClauseReport check_peak_clauses(const ConvexDomain& dom, const Covering& cov, const PeakField& field,
                                    const PeakParams& params, const PointCloud& boundary_net,
                                    const std::vector<CVector>& interior_shell, const PeakClauseOptions& opts) {
  PeakClauseReport rep;
  const int s = field.s();
  const int n = field.dim();
  const double r = cov.r();
  const double lr = cov.lambda() * r;
  const double eta = params.eta;
  const double thr_c = params.C * std::pow(eta, 1.0 / 16.0);
  const double thr_d = std::pow(eta, 2.0 / 3.0);
  const std::size_t nc = field.center_count();

  const SpatialGrid balls(field.centers(), lr);
  std::vector<Complex> g(static_cast<std::size_t>(2 * s));
  std::vector<std::vector<std::uint32_t>> inside(nc);  // net indices within lambda r, per center
  std::vector<std::int64_t> hit(static_cast<std::size_t>(s));
  std::vector<double> hit_d2(static_cast<std::size_t>(s));

  auto values_at = [&](const CVector& z) {
    std::fill(g.begin(), g.end(), Complex(0.0, 0.0));
    field.add_values(z, dom.depth_bounds(z), g.data());
  };
  auto nearest_per_family = [&](const CVector& z) {
    std::fill(hit.begin(), hit.end(), -1);
    balls.for_each_candidate(packed(z), lr, [&](std::uint32_t c, const double* x) {
      const double d2 = packed_distance_sq(packed(z), x, 2 * n);
      if (d2 < lr * lr) {
        const int f = field.family_of(c);
        if (hit[f] < 0 || d2 < hit_d2[f]) {
          hit[f] = c;
          hit_d2[f] = d2;
        }
      }
      return true;
    });
  };
  auto check_b = [&](const CVector& z, std::size_t c) {
    const Complex ph = field.phi(c, z);
    const int f = field.family_of(c);
    for (const int i : {f, f + s}) {
      const double v = std::abs(g[i] - field.coeff(c, i) * ph);
      rep.b.record(v, eta - v, i, z);
    }
  };

  for (std::size_t t = 0; t < boundary_net.size(); ++t) {
    const CVector z = boundary_net[t];
    values_at(z);
    nearest_per_family(z);
    for (int f = 0; f < s; ++f) {
      if (hit[f] < 0) {
        for (const int i : {f, f + s}) {
          const double v = std::abs(g[i]);
          rep.a.record(v, eta - v, i, z);
        }
        continue;
      }
      const auto c = static_cast<std::size_t>(hit[f]);
      inside[c].push_back(static_cast<std::uint32_t>(t));
      check_b(z, c);
      if (hit_d2[f] < r * r) {
        const double v = std::abs(field.phi(c, z));
        rep.c.record(v, v - thr_c, f, z, false);
      }
    }
  }

  // (b) below the boundary: net points pushed inward along the center normal.
  for (std::size_t c = 0; c < nc; ++c) {
    const auto& idx = inside[c];
    if (idx.empty()) continue;
    const std::size_t take = std::min(idx.size(), opts.interior_per_center);
    const CVector center = field.centers()[c];
    const CVector nu = field.normal(c);
    for (std::size_t q = 0; q < take; ++q) {
      const CVector w = boundary_net[idx[q * idx.size() / take]];
      for (int l = 0; l < opts.depth_levels; ++l) {
        const CVector z = w - (r * std::pow(10.0, -0.5 * l)) * nu;
        if (distance_sq(z, center) >= lr * lr || dom.rho(z) > 0.0) continue;
        values_at(z);
        check_b(z, c);
      }
    }
  }
  for (const CVector& z : interior_shell) {
    if (dom.rho(z) > dom.boundary_tolerance()) continue;
    values_at(z);
    nearest_per_family(z);
    for (int f = 0; f < s; ++f) {
      if (hit[f] >= 0) check_b(z, static_cast<std::size_t>(hit[f]));
    }
  }

  // (d) on the sphere of radius lambda r about each center, inside the closure.
  for (std::size_t c = 0; c < nc; ++c) {
    const CVector center = field.centers()[c];
    Rng rng(derive_seed(opts.seed, Stream::kPeaks, c, 4));
    const double phase = rng.uniform();
    for (std::size_t q = 0; q < opts.rim_points; ++q) {
      CVector u(n);
      if (n == 1) {
        const double th = 2.0 * std::numbers::pi * (static_cast<double>(q) + phase) / static_cast<double>(opts.rim_points);
        u[0] = Complex(std::cos(th), std::sin(th));
      } else {
        for (int k = 0; k < n; ++k) u[k] = Complex(rng.normal(), rng.normal());
        u /= norm(u);
      }
      const CVector z = center + lr * u;
      if (dom.rho(z) > 0.0) continue;
      const double v = std::abs(field.phi(c, z));
      rep.d.record(v, thr_d - v, field.family_of(c), z);
    }
  }
  return rep;
}

}  // namespace peakembed
