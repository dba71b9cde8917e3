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

#include <cmath>
#include <memory>
#include <optional>

#include "generators.hpp"
#include "peakembed/compacts.hpp"
#include "peakembed/induction.hpp"
#include "peakembed/schedule.hpp"
#include "peakembed/step.hpp"

namespace peakembed {
namespace {

// First step on the disc with h = z/2 and a1 = 0.9, shared by the suite.
class DiscStep : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    env_ = std::make_unique<Env>();
  }
  static void TearDownTestSuite() { env_.reset(); }

  struct Env {
    ConvexDomain disc = make_ball(1);
    DomainConstants consts = estimate_constants(disc, 10000, 1);
    int s = probe_family_count(disc, consts, RunOptions{});
    MapState F0{disc, InitialMap({"scaled-identity", 0.5}, disc), s};
    Schedule sch = make_schedule(0.5, 0.9, 1);
    Compacts KL = choose_compacts(disc, 1, {}, 0.0, 1);
    double delta = 0.5 * std::min(delta_for_C1(1, KL.K, KL.L), 0.5 * sch.eps(1));
    DomainMesh mesh = build_mesh(disc);
    StepOptions opts = [] {
      StepOptions o;
      o.seed = 7;
      return o;
    }();
    StepResult res = boost_step(F0, sch.a(1), sch.eps(1), KL.K, KL.L, CVector{0.0}, std::nullopt, delta, consts,
                                opts, &mesh);
    MapState F1 = [this] {
      MapState f = F0;
      f.add_stage(res.stage);
      return f;
    }();
  };
  static std::unique_ptr<Env> env_;
};

std::unique_ptr<DiscStep::Env> DiscStep::env_;

TEST_F(DiscStep, RetryClausesHold) {
  const StepReport& r = env_->res.report;
  EXPECT_TRUE(r.a_clause.passed());
  EXPECT_TRUE(r.c_clause.passed());
  EXPECT_TRUE(r.d_clause.passed());
  EXPECT_TRUE(r.peaks.passed()) << r.peaks.failed_clause();
  EXPECT_TRUE(r.L_disjoint);
  EXPECT_TRUE(r.retry_clauses_passed());
  EXPECT_GE(r.boundary_samples, 10000u);
  EXPECT_GE(r.compact_samples, 2000u);
}

TEST_F(DiscStep, ParametersAreConsistent) {
  const StepReport& r = env_->res.report;
  const Stage& st = *env_->res.stage;
  EXPECT_EQ(r.s, env_->s);
  EXPECT_DOUBLE_EQ(r.eta, r.eps / (120.0 * r.s));
  EXPECT_NEAR(st.params.m * st.params.r * st.params.r, std::log(r.C2 / r.eta) / (16.0 * env_->consts.alpha2), 1e-12);
  EXPECT_DOUBLE_EQ(st.params.r, r.r);
  EXPECT_LE(r.r, 0.99 * env_->KL.L.depth / env_->consts.lambda);
  EXPECT_LE(r.r, 0.99 * env_->consts.r1 / env_->consts.lambda);
  EXPECT_LT(env_->consts.lambda * r.r, env_->KL.L.depth);
  EXPECT_LT(st.coefficient_residual, 1e-12);
  EXPECT_EQ(st.field.s(), env_->s);
  EXPECT_EQ(st.covering.total_centers(), r.centers);
  EXPECT_GE(r.C2, 1.0);
}

TEST_F(DiscStep, BoundaryNormGrows) {
  const StepReport& r = env_->res.report;
  EXPECT_NEAR(r.min_S_before, 0.5, 1e-12);
  EXPECT_GT(r.min_S_after, r.min_S_before);
  EXPECT_LE(r.max_S_after, r.a + r.eps);
}

TEST_F(DiscStep, IndependentResampling) {
  // Fresh samples, not the step's own nets.
  const Env& e = *env_;
  const StepReport& r = e.res.report;
  const auto S = sample_boundary(e.disc, 20000, 991);
  for (const CVector& z : S) {
    const double nF = norm(e.F0.eval(z));
    const double nFG = norm(e.F1.eval(z));
    const auto G = e.F1.stage_values(0, z);
    const double nG = norm(G);
    EXPECT_LE(nFG, r.a + r.eps);
    EXPECT_LT(nG * nG, 1.0 - nF);
  }
  Rng rng(992);
  for (int t = 0; t < 5000; ++t) {
    const CVector z = testing::gen_in_ball(rng, 1, 1.0 - e.KL.K.depth);
    EXPECT_LT(norm(e.F1.stage_values(0, z)), r.delta);
  }
}

TEST_F(DiscStep, ReportedBClauseMatchesRecount) {
  // Re-measure the pointwise dichotomy on a fresh net; the report's verdict
  // must agree with ours on whether any sample misses it.
  const Env& e = *env_;
  const StepReport& r = e.res.report;
  const double band = r.a - std::pow(r.eps, 1.0 / 7.0), inc = std::pow(r.eps, 2.0 / 7.0);
  const auto S = sample_boundary(e.disc, 20000, 993);
  std::size_t violations = 0;
  double worst = 1e300;
  for (const CVector& z : S) {
    const double nF = norm(e.F0.eval(z));
    const double nFG = norm(e.F1.eval(z));
    if (nFG <= band) {
      worst = std::min(worst, nFG - nF - inc);
      violations += !(nFG - nF > inc);
    }
  }
  EXPECT_EQ(violations > 0, !r.b_clause.passed());
  if (!r.b_clause.passed()) {
    EXPECT_NEAR(r.b_clause.margin, worst, 1e-3);
  }
}

TEST_F(DiscStep, DistanceIsMeasured) {
  const StepReport& r = env_->res.report;
  ASSERT_TRUE(r.distance_before && r.distance_after && r.distance_lower);
  EXPECT_NEAR(*r.distance_before, dist_estimate(env_->F0, env_->mesh, CVector{0.0}).estimate, 1e-12);
  EXPECT_NEAR(*r.distance_after, dist_estimate(env_->F1, env_->mesh, CVector{0.0}).estimate, 1e-12);
  EXPECT_LE(*r.distance_lower, *r.distance_after);
  EXPECT_EQ(r.e_passed(), r.gain() > 0.0);
}

TEST_F(DiscStep, FailureNamesAreConsistent) {
  const StepReport& r = env_->res.report;
  const auto f = r.failures();
  EXPECT_EQ(f.empty(), r.passed());
  for (const std::string& name : f) {
    EXPECT_TRUE(name == "a" || name == "b" || name == "c" || name == "d" || name == "e" || name.rfind("peak(", 0) == 0 ||
                name == "L")
        << name;
  }
}

TEST_F(DiscStep, StrictModeThrowsOnTheFirstFailure) {
  const Env& e = *env_;
  StepOptions strict = e.opts;
  strict.strict = true;
  auto go = [&] {
    return boost_step(e.F0, e.sch.a(1), e.sch.eps(1), e.KL.K, e.KL.L, CVector{0.0}, std::nullopt, e.delta, e.consts,
                      strict, &e.mesh);
  };
  if (e.res.report.passed()) {
    EXPECT_NO_THROW(go());
  } else {
    try {
      go();
      FAIL() << "expected VerificationError";
    } catch (const VerificationError& err) {
      EXPECT_EQ(err.clause(), "step(" + e.res.report.failures().front() + ")");
    }
  }
}

TEST_F(DiscStep, Deterministic) {
  const Env& e = *env_;
  const StepResult again =
      boost_step(e.F0, e.sch.a(1), e.sch.eps(1), e.KL.K, e.KL.L, CVector{0.0}, std::nullopt, e.delta, e.consts, e.opts);
  EXPECT_EQ(again.report.r, e.res.report.r);
  EXPECT_EQ(again.report.m, e.res.report.m);
  EXPECT_EQ(again.report.min_S_after, e.res.report.min_S_after);
  EXPECT_EQ(again.stage->field.coeffs(), e.res.stage->field.coeffs());
}

TEST_F(DiscStep, Preconditions) {
  const Env& e = *env_;
  auto step = [&](const MapState& F, double a, double eps, const CompactSet& K, const CompactSet& L, const CVector& p0,
                  double delta) {
    return boost_step(F, a, eps, K, L, p0, std::nullopt, delta, e.consts, e.opts);
  };
  const double eps = e.sch.eps(1);
  try {
    step(e.F0, 0.6, 0.02, e.KL.K, e.KL.L, CVector{0.0}, e.delta);
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& err) {
    EXPECT_STREQ(err.what(), "step: need a - eps^(1/2) > 1/2 and a + eps < 1");
  }
  const MapState F_const(e.disc, InitialMap({"scaled-identity", 0.0}, e.disc), e.s);
  try {
    step(F_const, 0.9, eps, e.KL.K, e.KL.L, CVector{0.0}, e.delta);
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& err) {
    EXPECT_STREQ(err.what(), "step: h must be nonconstant");
  }
  EXPECT_THROW(step(e.F0, 0.9, eps, e.KL.K, e.KL.L, CVector{1.5}, e.delta), PreconditionError);
  EXPECT_THROW(step(e.F0, 0.9, eps, e.KL.L, e.KL.K, CVector{0.0}, e.delta), PreconditionError);
  EXPECT_THROW(step(e.F0, 0.9, eps, e.KL.K, e.KL.L, CVector{0.0}, 0.0), PreconditionError);
  const MapState F_high(e.disc, InitialMap({"scaled-identity", 0.895}, e.disc), e.s);
  EXPECT_THROW(step(F_high, 0.9, eps, e.KL.K, e.KL.L, CVector{0.0}, e.delta), PreconditionError);
}

TEST_F(DiscStep, ContinuityRadius) {
  const Env& e = *env_;
  const double eta = 1e-6, lambda = e.consts.lambda;
  // |F0| is constant on the circle and the first 2s components vanish.
  EXPECT_TRUE(std::isinf(continuity_radius(e.F0, eta, lambda, 2000, 1)));
  const double r2 = continuity_radius(e.F1, eta, lambda, 2000, 1, 2.0);
  const double r4 = continuity_radius(e.F1, eta, lambda, 2000, 1, 4.0);
  EXPECT_TRUE(std::isfinite(r2));
  EXPECT_GT(r2, 0.0);
  EXPECT_DOUBLE_EQ(r4, 0.5 * r2);
  EXPECT_LE(r2, continuity_radius(e.F1, 10.0 * eta, lambda, 2000, 1, 2.0));
}

TEST(SpacingForCount, NetIsLargeEnough) {
  for (const ConvexDomain& dom : {make_ball(1), make_ball(2), make_ellipsoid({1.0, 0.5})}) {
    for (std::size_t count : {100u, 10000u}) EXPECT_GE(boundary_net_size(dom, spacing_for_count(dom, count)), count);
  }
}

}  // namespace
}  // namespace peakembed
