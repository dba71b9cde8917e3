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
#include <functional>
#include <memory>

#include "generators.hpp"
#include "json.hpp"
#include "peakembed/serialize.hpp"

namespace peakembed {
namespace {

using json = nlohmann::json;

std::shared_ptr<Stage> random_stage(const ConvexDomain& dom, int k, int s, double r, double m, std::uint64_t seed) {
  CoveringOptions opts;
  opts.s_target = s;
  auto st = std::make_shared<Stage>();
  st->k = k;
  st->a = 0.9;
  st->eps = 1.0 / 3.0;
  st->delta = 1e-7 * k;
  st->covering = build_covering(dom, r, 4.0, seed, opts);
  std::vector<std::vector<Complex>> coeffs(2 * static_cast<std::size_t>(s));
  Rng rng(seed);
  for (int i = 0; i < 2 * s; ++i) {
    for (std::size_t j = 0; j < st->covering.family(i).size(); ++j) {
      coeffs[i].push_back(std::polar(0.2 * rng.uniform(), rng.normal()));
    }
  }
  st->params.m = m;
  st->params.r = r;
  st->params.lambda = 4.0;
  st->params.eta = 0.1 / 7.0;
  st->params.C2 = 2.0;
  st->params.C = 0.3;
  st->params.mu = 3.1;
  st->params.alpha2 = 0.55;
  st->params.halvings = k;
  st->coefficient_residual = 1e-15;
  st->field = PeakField(st->covering, m, std::move(coeffs), 0.45, 0.49);
  return st;
}

// Two stages sharing s; the second is built on a smaller radius.
MapState sample_map(const ConvexDomain& dom, const char* h_kind) {
  const double r1 = 0.3, r2 = 0.2;
  const int s = std::max({20, build_covering(dom, r1, 4.0, 1).s(), build_covering(dom, r2, 4.0, 2).s()});
  MapState F(dom, InitialMap({h_kind, 0.5}, dom), s);
  F.add_stage(random_stage(dom, 1, s, r1, 30.0, 1));
  F.add_stage(random_stage(dom, 2, s, r2, 90.0, 2));
  return F;
}

DomainConstants sample_constants() { return {0.45, 0.55, 0.49, 4.0 * std::sqrt(0.55 / 0.45), 0.123456789012345678}; }

TEST(DumpMap, RoundTripIsExact) {
  Rng rng(4);
  const std::vector<std::pair<ConvexDomain, const char*>> cases{{make_ball(1), "scaled-identity"},
                                                                {make_ellipsoid({1.0, 0.6}), "coordinate-embedding"}};
  for (const auto& [dom, kind] : cases) {
    const MapState F = sample_map(dom, kind);
    const LoadedMap back = load_map(dump_map(F, sample_constants()));
    ASSERT_EQ(back.F.stage_count(), F.stage_count());
    EXPECT_EQ(back.F.s(), F.s());
    EXPECT_EQ(back.F.components(), F.components());
    EXPECT_EQ(back.F.domain().spec().kind, dom.spec().kind);
    EXPECT_EQ(back.consts.gamma1, sample_constants().gamma1);
    EXPECT_EQ(back.consts.lambda, sample_constants().lambda);
    for (std::size_t t = 0; t < F.stage_count(); ++t) {
      const Stage &a = F.stage(t), &b = back.F.stage(t);
      EXPECT_EQ(a.k, b.k);
      EXPECT_EQ(a.delta, b.delta);
      EXPECT_EQ(a.eps, b.eps);
      EXPECT_EQ(a.params.m, b.params.m);
      EXPECT_EQ(a.params.eta, b.params.eta);
      EXPECT_EQ(a.params.halvings, b.params.halvings);
      EXPECT_EQ(a.field.coeffs(), b.field.coeffs());
      EXPECT_EQ(a.covering.total_centers(), b.covering.total_centers());
    }
    for (int t = 0; t < 200; ++t) {
      const CVector z = testing::gen_interior(rng, dom, 0.99);
      EXPECT_EQ(F.eval(z), back.F.eval(z));
      const CMatrix Ja = F.jac(z), Jb = back.F.jac(z);
      for (int i = 0; i < Ja.rows(); ++i) {
        for (int c = 0; c < Ja.cols(); ++c) EXPECT_EQ(Ja(i, c), Jb(i, c));
      }
    }
    // Dumping again reproduces the text.
    EXPECT_EQ(dump_map(back.F, back.consts), dump_map(F, sample_constants()));
  }
}

TEST(DumpMap, EmptyStateRoundTrips) {
  const ConvexDomain ball = make_ball(2);
  const MapState F(ball, InitialMap({"scaled-identity", 0.25}, ball), 3);
  const LoadedMap back = load_map(dump_map(F, sample_constants()));
  EXPECT_EQ(back.F.stage_count(), 0u);
  const CVector z{0.1, Complex(0.0, 0.3)};
  EXPECT_EQ(back.F.eval(z), F.eval(z));
}

TEST(DumpMap, Layout) {
  const json j = json::parse(dump_map(sample_map(make_ball(1), "scaled-identity"), sample_constants()));
  EXPECT_EQ(j.at("format"), "peakembed-map");
  EXPECT_EQ(j.at("n"), 1);
  const int s = j.at("s");
  EXPECT_GE(s, 20);
  EXPECT_EQ(j.at("p"), 1);
  ASSERT_EQ(j.at("stages").size(), 2u);
  const json& st = j.at("stages")[0];
  EXPECT_EQ(st.at("families").size(), static_cast<std::size_t>(s));
  EXPECT_EQ(st.at("coefficients").size(), static_cast<std::size_t>(2 * s));
  for (const char* key : {"r", "lambda", "m", "a", "eps", "delta"}) EXPECT_TRUE(st.contains(key)) << key;
}

std::string mutate(const std::string& text, const std::function<void(json&)>& f) {
  json j = json::parse(text);
  f(j);
  return j.dump();
}

void expect_config_error(const std::string& text, const std::string& fragment) {
  try {
    load_map(text);
    FAIL() << "expected ConfigError containing " << fragment;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(LoadMap, MalformedInputs) {
  const std::string good = dump_map(sample_map(make_ball(1), "scaled-identity"), sample_constants());
  expect_config_error("{not json", "not valid JSON");
  expect_config_error("[1, 2]", "not a peakembed map dump");
  expect_config_error(mutate(good, [](json& j) { j["format"] = "peakembed-covering"; }), "not a peakembed map dump");
  expect_config_error(mutate(good, [](json& j) { j.erase("s"); }), "missing key 's'");
  expect_config_error(mutate(good, [](json& j) { j["n"] = "one"; }), "key 'n' has the wrong type");
  expect_config_error(mutate(good, [](json& j) { j["p"] = 2; }), "p does not match");
  expect_config_error(mutate(good, [](json& j) { j["domain"]["n"] = 2; }), "domain.n differs");
  expect_config_error(mutate(good, [](json& j) { j["stages"][0]["families"].erase(0); }), "family count differs");
  expect_config_error(mutate(good, [](json& j) { j["stages"][0]["families"][0]["centers"].push_back(0.5); }),
                      "multiple of 2n");
  expect_config_error(mutate(good, [](json& j) { j["stages"][0]["coefficients"][0].push_back(0.5); }), "odd length");
  expect_config_error(mutate(good, [](json& j) { j["stages"][1]["coefficients"].erase(0); }), "dump: ");
}

TEST(DumpCovering, Layout) {
  const ConvexDomain disc = make_ball(1);
  const Covering cov = build_covering(disc, 0.1, 4.0, 3);
  const json j = json::parse(dump_covering(cov));
  EXPECT_EQ(j.at("format"), "peakembed-covering");
  EXPECT_EQ(j.at("s"), cov.s());
  EXPECT_EQ(j.at("r"), 0.1);
  EXPECT_EQ(j.at("total_centers"), cov.total_centers());
  std::size_t count = 0;
  for (const json& f : j.at("families")) {
    EXPECT_FALSE(f.contains("normals"));
    count += f.at("centers").size() / 2;
  }
  EXPECT_EQ(j.at("families").size(), static_cast<std::size_t>(cov.s()));
  EXPECT_EQ(count, cov.total_centers());
}

}  // namespace
}  // namespace peakembed
