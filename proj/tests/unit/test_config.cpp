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

#include <cstdio>
#include <fstream>

#include "peakembed/config.hpp"

namespace peakembed {
namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, DefaultsFromEmptyObject) {
  const RunConfig c = parse_config("{}");
  const RunOptions ref;
  EXPECT_EQ(c.domain.kind, "ball");
  EXPECT_EQ(c.domain.n, 1);
  EXPECT_EQ(c.h.kind, "scaled-identity");
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(c.run.seed, 1u);
  EXPECT_EQ(c.run.a1, ref.a1);
  EXPECT_EQ(c.run.stages, ref.stages);
  EXPECT_EQ(c.run.mesh.h, ref.mesh.h);
  EXPECT_EQ(c.run.step.min_boundary_samples, ref.step.min_boundary_samples);
  EXPECT_EQ(c.constants_samples, 10000u);
  EXPECT_EQ(c.out_dir, "out");
}

TEST(Config, ReadsEveryDocumentedKey) {
  const RunConfig c = parse_config(R"({
    "domain": {"kind": "ellipsoid", "semiaxes": [1.0, 0.5]},
    "h": {"kind": "coordinate-embedding", "factor": 0.25},
    "a1": 0.8, "stages": 3, "seed": 42, "out": "runs/x",
    "sampling": {"boundary_samples": 5000, "constants_samples": 2000, "spot_pairs": 7},
    "step": {"retries": 4, "strict": true, "delta_budget": 0.5},
    "mesh": {"h": 0.02, "enabled": false},
    "compacts": {"kappa_K": 1.5, "kappa_L": 3.0}
  })");
  EXPECT_EQ(c.domain.kind, "ellipsoid");
  EXPECT_EQ(c.domain.n, 2);
  EXPECT_EQ(c.domain.semiaxes, (std::vector<double>{1.0, 0.5}));
  EXPECT_EQ(c.h.kind, "coordinate-embedding");
  EXPECT_EQ(c.h.factor, 0.25);
  EXPECT_EQ(c.run.a1, 0.8);
  EXPECT_EQ(c.run.stages, 3);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.run.seed, 42u);
  EXPECT_EQ(c.out_dir, "runs/x");
  EXPECT_EQ(c.run.step.min_boundary_samples, 5000u);
  EXPECT_EQ(c.constants_samples, 2000u);
  EXPECT_EQ(c.run.spot_pairs, 7u);
  EXPECT_EQ(c.run.step.retries, 4);
  EXPECT_TRUE(c.run.step.strict);
  EXPECT_EQ(c.run.delta_budget, 0.5);
  EXPECT_EQ(c.run.mesh.h, 0.02);
  EXPECT_FALSE(c.run.measure_distance);
  EXPECT_EQ(c.run.compacts.kappa_K, 1.5);
  EXPECT_EQ(c.run.compacts.kappa_L, 3.0);
}

TEST(Config, UnknownKeysAreNamed) {
  EXPECT_EQ(error_of(R"({"stagez": 3})"), "unknown key 'stagez'");
  EXPECT_EQ(error_of(R"({"mesh": {"hh": 0.1}})"), "unknown key 'mesh.hh'");
  EXPECT_EQ(error_of(R"({"sampling": {"boundary": 10}})"), "unknown key 'sampling.boundary'");
}

TEST(Config, RangeAndTypeErrorsNameTheKey) {
  EXPECT_EQ(error_of(R"({"stages": -1})"), "'stages' = -1 is outside [0, 1000]");
  EXPECT_EQ(error_of(R"({"stages": 2.5})"), "'stages' must be an integer");
  EXPECT_EQ(error_of(R"({"a1": "high"})"), "'a1' must be a number");
  EXPECT_EQ(error_of(R"({"seed": -3})"), "'seed' must be a nonnegative integer");
  EXPECT_EQ(error_of(R"({"step": {"strict": 1}})"), "'step.strict' must be true or false");
  EXPECT_EQ(error_of(R"({"mesh": []})"), "'mesh' must be an object");
  EXPECT_EQ(error_of(R"({"domain": {"kind": "cube"}})"), "'domain.kind' must be \"ball\" or \"ellipsoid\"");
  EXPECT_EQ(error_of(R"({"domain": {"kind": "ellipsoid"}})"), "'domain.semiaxes' is required");
  EXPECT_EQ(error_of(R"({"domain": {"kind": "ellipsoid", "semiaxes": [1, 0]}})"),
            "'domain.semiaxes' entries must be positive");
  EXPECT_EQ(error_of(R"({"compacts": {"kappa_K": 3, "kappa_L": 2}})"), "'compacts.kappa_K' must be below 'compacts.kappa_L'");
  EXPECT_NE(error_of(R"({"mesh": {"h": 2.0}})").find("'mesh.h'"), std::string::npos);
  EXPECT_NE(error_of("{").find("not valid JSON"), std::string::npos);
  EXPECT_EQ(error_of("[]"), "'config' must be an object");
}

TEST(Config, JsonRoundTrip) {
  for (const char* text : {"{}", R"({"domain": {"kind": "ellipsoid", "semiaxes": [1.0, 0.7, 0.3]}, "a1": 0.7,
                                     "sampling": {"tail_samples": 11}, "step": {"path_cap": 7.5}})"}) {
    const RunConfig a = parse_config(text);
    const std::string dumped = config_to_json(a);
    const RunConfig b = parse_config(dumped);
    EXPECT_EQ(config_to_json(b), dumped);
    EXPECT_EQ(b.domain.semiaxes, a.domain.semiaxes);
    EXPECT_EQ(b.run.tail_samples, a.run.tail_samples);
    EXPECT_EQ(b.run.path_cap, a.run.path_cap);
  }
}

TEST(Config, LoadFromFile) {
  const std::string path = ::testing::TempDir() + "peakembed_config_test.json";
  {
    std::ofstream out(path);
    out << R"({"stages": 2})";
  }
  EXPECT_EQ(load_config(path).run.stages, 2);
  std::remove(path.c_str());
  EXPECT_THROW(load_config(path), ConfigError);
}

}  // namespace
}  // namespace peakembed
