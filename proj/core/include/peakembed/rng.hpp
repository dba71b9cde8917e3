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

namespace peakembed {

/// Subsystems that draw randomness. Each gets an independent stream.
enum class Stream : std::uint64_t {
  kBoundary = 1,
  kConstants = 2,
  kCovering = 3,
  kPeaks = 4,
  kStep = 5,
  kMetric = 6,
  kSpotCheck = 7,
  kValidation = 8,
};

/// Counter-based seed split: the same (root, stream, stage, purpose) always
/// yields the same child seed, independent of what else ran before.
std::uint64_t derive_seed(std::uint64_t root, Stream stream, std::uint64_t stage, std::uint64_t purpose);

/// xoshiro256** with portable uniform and normal draws (no <random>
/// distributions, so sequences are identical across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace peakembed
