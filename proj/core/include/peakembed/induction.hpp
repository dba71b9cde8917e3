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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "peakembed/compacts.hpp"
#include "peakembed/metric.hpp"
#include "peakembed/schedule.hpp"
#include "peakembed/step.hpp"

namespace peakembed {

struct SpotCheck {
  double min_singular_value = 0.0;  // of map_jac over the sample points
  double min_image_distance = 0.0;  // over distinct sample pairs
  std::size_t points = 0;
  std::size_t pairs = 0;
  bool passed(double sv_floor = 1e-8) const { return min_singular_value > sv_floor && min_image_distance > 0.0; }
};

/// Smallest singular value of the Jacobian at `points` interior samples and the
/// smallest image distance over `pairs` random distinct interior pairs.
SpotCheck spot_check(const MapState& F, std::size_t points, std::size_t pairs, std::uint64_t seed);

struct RunOptions {
  double a1 = 0.9;
  int stages = 5;
  std::uint64_t seed = 0;
  StepOptions step;
  CompactOptions compacts;
  MeshOptions mesh;
  bool measure_distance = true;  // ignored for n >= 3
  std::size_t properness_samples = 10000;
  std::size_t interior_samples = 2000;  // for max over D of |F_k|
  std::size_t tail_samples = 2000;
  std::size_t spot_points = 100;
  std::size_t spot_pairs = 10000;
  double delta_budget = 1.0;
  double path_cap = 50.0;
};

struct TraceRow {
  int k = 0;
  double a = 0.0;
  double eps = 0.0;
  double delta = 0.0;  // delta_k; the step bound is delta_k / 2^k
  double K_depth = 0.0;
  double L_depth = 0.0;
  int K_enlargements = 0;
  double min_S_norm = 0.0;
  double max_S_norm = 0.0;
  double max_interior_norm = 0.0;
  std::optional<double> d;
  std::optional<double> d_lower;
  std::optional<double> gain;
  std::optional<double> E_fit_running;
  int s = 0;
  double m = 0.0;
  double r = 0.0;
  std::size_t N_total = 0;
  double wall_time_ms = 0.0;
  SpotCheck spot;
  StepReport step;
};

struct TailCheck {
  int k = 0;
  double max_diff = 0.0;  // max over K_k samples of |F_(k-1) - F_K|
  double delta = 0.0;
  bool passed() const { return max_diff <= delta; }
};

struct RunResult {
  MapState F;
  Schedule schedule;
  std::vector<CompactSet> K;  // K_k at index k - 1
  std::vector<CompactSet> L;
  std::vector<TraceRow> trace;
  std::vector<NormExtrema> properness;  // k = 0..K on one shared net
  std::optional<MetricReport> metric;
  std::vector<TailCheck> tail;
  double d0 = 0.0;  // distance for F0 (when measured)
  /// Set when a stage threw; the trace stops before that stage.
  std::optional<std::string> error;
  int failed_stage = 0;

  explicit RunResult(MapState f) : F(std::move(f)) {}
  std::vector<MapState> states() const;
};

using StageCallback = std::function<void(const TraceRow&)>;

/// Builds F_0 = (0, h) and applies `stages` boosting steps with the default
/// schedule from a1. Errors inside a stage are caught and recorded in the result.
RunResult run(const ConvexDomain& dom, const InitialMapSpec& h, const DomainConstants& consts, const RunOptions& opts,
              const StageCallback& on_stage = {});

struct RunCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Named pass/fail checks of a finished run: completed, band, dichotomy,
/// min_S_increasing, interior_stability, tail, distance, immersion,
/// injectivity, max_principle, and one "stage k" entry per step report.
std::vector<RunCheck> run_checks(const RunResult& res, double max_principle_tol = 1e-9);

/// Number of families used by every stage: s of a covering at the stage-1 radius cap.
int probe_family_count(const ConvexDomain& dom, const DomainConstants& consts, const RunOptions& opts);

}  // namespace peakembed
