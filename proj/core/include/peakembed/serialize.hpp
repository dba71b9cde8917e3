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

#include <string>

#include "peakembed/constants.hpp"
#include "peakembed/map_state.hpp"

namespace peakembed {

/// JSON text with n, s, p, the domain and h specs, the constants, and per
/// stage r, lambda, m, a, eps, delta, the families and the coefficients.
/// Doubles are written with 17 significant digits, so loading is exact.
std::string dump_map(const MapState& F, const DomainConstants& consts);

struct LoadedMap {
  MapState F;
  DomainConstants consts;
};

/// Throws ConfigError on malformed input. Only built-in domains can be loaded.
LoadedMap load_map(const std::string& text);

/// Covering dump: r, lambda, s and the centers of each family.
std::string dump_covering(const Covering& cov);

}  // namespace peakembed
