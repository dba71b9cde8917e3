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

#pragma once

#include <cstdint>
#include <string>

#include "peakembed/domain.hpp"
#include "peakembed/induction.hpp"

namespace peakembed {

/// Everything a run needs. Parsed from JSON such as
///
///   {"domain": {"kind": "ball", "n": 1},
///    "h": {"kind": "scaled-identity", "factor": 0.5},
///    "a1": 0.9, "stages": 5, "seed": 1,
///    "sampling": {"boundary_samples": 10000},
///    "mesh": {"h": 0.01}}
///
/// Every key is optional; unknown keys are rejected.
struct RunConfig {
  DomainSpec domain{"ball", 1, {}};
  InitialMapSpec h;
  std::uint64_t seed = 1;
  std::size_t constants_samples = 10000;
  std::size_t validation_pairs = 10000;
  double constants_margin = 0.1;
  std::string out_dir = "out";
  RunOptions run;  // a1, stages, sampling, step, mesh and compact options
};

/// Throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);

}  // namespace peakembed
