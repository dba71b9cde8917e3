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
#include <optional>
#include <ostream>
#include <string>

#include "peakembed/config.hpp"

namespace peakembed::cli {

enum ExitCode : int { kClean = 0, kVerificationFailure = 1, kConfigError = 2 };

struct Args {
  std::string config;  // empty: built-in defaults
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> stages;
  std::optional<double> r;
  std::string dump;
  std::string points;
  std::string trace;
  bool timing = false;
};

/// The config file with --seed, --stages and --out applied.
RunConfig resolve_config(const Args& args);

int cmd_constants(const Args& args, std::ostream& out);
int cmd_cover(const Args& args, std::ostream& out);
int cmd_run(const Args& args, std::ostream& out);
int cmd_eval(const Args& args, std::ostream& out);
int cmd_trace_plot_data(const Args& args, std::ostream& out);

/// One row per stage with the columns
/// k,a_k,eps_k,min_S_norm,max_S_norm,d_k,gain_k,E_fit_running,s,m,r,N_total,wall_time_ms.
/// wall_time_ms is 0 unless `timing`, so reruns are byte-identical.
std::string trace_csv(const RunResult& res, bool timing);

/// Writes to a temporary file next to `path`, then renames it into place.
void write_atomic(const std::string& path, const std::string& contents);

}  // namespace peakembed::cli
