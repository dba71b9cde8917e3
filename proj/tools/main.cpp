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

#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"

using namespace peakembed;

int main(int argc, char** argv) {
  CLI::App app{"peakembed: proper holomorphic embeddings of convex domains into balls"};
  app.require_subcommand(1);
  cli::Args args;
  std::uint64_t seed = 0;
  int stages = 0;
  double r = 0.0;
  std::string out;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config, "JSON run config");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "root seed (overrides the config)");
  };
  CLI::App* constants = app.add_subcommand("constants", "estimate and validate the convexity constants");
  common(constants);
  CLI::App* cover = app.add_subcommand("cover", "build and verify a boundary covering");
  common(cover);
  cover->add_option("--r", r, "covering radius")->required();
  CLI::App* run = app.add_subcommand("run", "build F_K and write map.json, trace.csv, report.json");
  common(run);
  run->add_option("--stages", stages, "number of stages K (overrides the config)");
  run->add_flag("--timing", args.timing, "record wall times in the trace");
  CLI::App* eval = app.add_subcommand("eval", "evaluate a dumped map and its Jacobian at points");
  eval->add_option("--dump", args.dump, "map.json from run")->required();
  eval->add_option("--points", args.points, "CSV of points, 2n numbers per row")->required();
  eval->add_option("--out", out, "write eval.csv here instead of stdout");
  CLI::App* plot = app.add_subcommand("trace-plot-data", "per-figure CSVs from a trace");
  common(plot);
  plot->add_option("--trace", args.trace, "trace.csv from run (otherwise the run is performed)");
  plot->add_option("--stages", stages, "number of stages K when running");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kConfigError;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->get_option_no_throw("--seed") != nullptr && sub->count("--seed")) args.seed = seed;
    if (sub->get_option_no_throw("--stages") != nullptr && sub->count("--stages")) args.stages = stages;
    if (sub->get_option_no_throw("--r") != nullptr && sub->count("--r")) args.r = r;
    if (sub->get_option_no_throw("--out") != nullptr && sub->count("--out")) args.out = out;
  }

  try {
    if (constants->parsed()) return cli::cmd_constants(args, std::cout);
    if (cover->parsed()) return cli::cmd_cover(args, std::cout);
    if (run->parsed()) return cli::cmd_run(args, std::cout);
    if (eval->parsed()) return cli::cmd_eval(args, std::cout);
    if (plot->parsed()) return cli::cmd_trace_plot_data(args, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return cli::kConfigError;
  } catch (const PreconditionError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return cli::kConfigError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kVerificationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kVerificationFailure;
  }
  return cli::kConfigError;
}
