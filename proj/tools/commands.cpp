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

#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "peakembed/rng.hpp"
#include "peakembed/serialize.hpp"

namespace peakembed::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string num(double x) {
  if (!std::isfinite(x)) return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string opt(const std::optional<double>& x) { return x ? num(*x) : ""; }

json finite(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

json margin_json(const ClauseMargin& m) {
  return {{"margin", finite(m.margin)},
          {"worst_value", finite(m.worst_value)},
          {"samples", m.samples},
          {"violations", m.violations}};
}

json step_json(const StepReport& r) {
  json fails = r.failures();
  return {{"k", r.k},
          {"a", r.a},
          {"eps", r.eps},
          {"delta", r.delta},
          {"eta", r.eta},
          {"r0", finite(r.r0)},
          {"r0_honored", r.r0_honored},
          {"r_initial", r.r_initial},
          {"r", r.r},
          {"m", r.m},
          {"C2", r.C2},
          {"s", r.s},
          {"centers", r.centers},
          {"attempts", r.attempts},
          {"coefficient_residual", r.coefficient_residual},
          {"boundary_samples", r.boundary_samples},
          {"compact_samples", r.compact_samples},
          {"clause_a", margin_json(r.a_clause)},
          {"clause_b", margin_json(r.b_clause)},
          {"band_reached", r.band_reached},
          {"clause_c", margin_json(r.c_clause)},
          {"clause_d", margin_json(r.d_clause)},
          {"peak_a", margin_json(r.peaks.a)},
          {"peak_b", margin_json(r.peaks.b)},
          {"peak_c", margin_json(r.peaks.c)},
          {"peak_d", margin_json(r.peaks.d)},
          {"L_disjoint", r.L_disjoint},
          {"min_S_before", r.min_S_before},
          {"min_S_after", r.min_S_after},
          {"max_S_after", r.max_S_after},
          {"distance_before", r.distance_before ? json(*r.distance_before) : json(nullptr)},
          {"distance_after", r.distance_after ? json(*r.distance_after) : json(nullptr)},
          {"distance_lower", r.distance_lower ? json(*r.distance_lower) : json(nullptr)},
          {"failures", fails}};
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(where + ": '" + s + "' is not a number");
  }
}

RunResult run_from_config(const RunConfig& cfg, const ConvexDomain& dom, const DomainConstants& c, std::ostream& out) {
  return run(dom, cfg.h, c, cfg.run, [&](const TraceRow& row) {
    out << "stage " << row.k << ": a " << num(row.a) << " eps " << num(row.eps) << " r " << num(row.r) << " m "
        << num(row.m) << " min_S " << num(row.min_S_norm) << " max_S " << num(row.max_S_norm);
    if (row.d) out << " d " << num(*row.d);
    const auto f = row.step.failures();
    if (!f.empty()) {
      out << " failed:";
      for (const auto& x : f) out << " " << x;
    }
    out << "\n";
  });
}

}  // namespace

void write_atomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + tmp.string() + "'");
    f << contents;
    f.flush();
    if (!f) throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

RunConfig resolve_config(const Args& args) {
  RunConfig cfg = args.config.empty() ? parse_config("{}") : load_config(args.config);
  if (args.seed) {
    cfg.seed = *args.seed;
    cfg.run.seed = *args.seed;
  }
  if (args.stages) {
    if (*args.stages < 0) throw ConfigError("'--stages' must be >= 0");
    cfg.run.stages = *args.stages;
  }
  if (args.out) cfg.out_dir = *args.out;
  return cfg;
}

std::string trace_csv(const RunResult& res, bool timing) {
  std::ostringstream os;
  os << "k,a_k,eps_k,min_S_norm,max_S_norm,d_k,gain_k,E_fit_running,s,m,r,N_total,wall_time_ms\n";
  for (const TraceRow& row : res.trace) {
    os << row.k << ',' << num(row.a) << ',' << num(row.eps) << ',' << num(row.min_S_norm) << ','
       << num(row.max_S_norm) << ',' << opt(row.d) << ',' << opt(row.gain) << ',' << opt(row.E_fit_running) << ','
       << row.s << ',' << num(row.m) << ',' << num(row.r) << ',' << row.N_total << ','
       << (timing ? num(std::round(row.wall_time_ms)) : "0") << '\n';
  }
  return os.str();
}

int cmd_constants(const Args& args, std::ostream& out) {
  const RunConfig cfg = resolve_config(args);
  const ConvexDomain dom = make_domain(cfg.domain);
  const DomainConstants c = estimate_constants(dom, cfg.constants_samples, cfg.seed, cfg.constants_margin);
  const ConstantsReport rep =
      validate_constants(dom, c, cfg.validation_pairs, derive_seed(cfg.seed, Stream::kValidation, 0, 1));
  out << "alpha1 " << num(c.alpha1) << "\n"
      << "alpha2 " << num(c.alpha2) << "\n"
      << "r1 " << num(c.r1) << "\n"
      << "lambda " << num(c.lambda) << "\n"
      << "validation boundary_pairs " << rep.boundary_pairs << " collar_pairs " << rep.collar_pairs
      << " upper_violations " << rep.upper_violations << " lower_violations " << rep.lower_violations << "\n"
      << (rep.clean() ? "validation clean" : "validation FAILED") << "\n";
  return rep.clean() ? kClean : kVerificationFailure;
}

int cmd_cover(const Args& args, std::ostream& out) {
  const RunConfig cfg = resolve_config(args);
  if (!args.r) throw ConfigError("'--r' is required for cover");
  if (!(*args.r > 0.0)) throw ConfigError("'--r' must be positive");
  const ConvexDomain dom = make_domain(cfg.domain);
  const DomainConstants c = estimate_constants(dom, cfg.constants_samples, cfg.seed, cfg.constants_margin);
  const Covering cov = build_covering(dom, *args.r, c.lambda, derive_seed(cfg.seed, Stream::kCovering, 0, 1),
                                      cfg.run.step.covering);
  const double spacing = cov.net_spacing > 0.0 ? denser_spacing(dom, cov.net_spacing, 2.0)
                                               : spacing_for_count(dom, cfg.run.step.min_boundary_samples);
  const CoveringReport rep = verify_covering(cov, dom, spacing, derive_seed(cfg.seed, Stream::kValidation, 0, 2));
  write_atomic(out_path(cfg, "covering.json"), dump_covering(cov));
  out << "r " << num(cov.r()) << " lambda " << num(cov.lambda()) << " s " << cov.s() << " centers "
      << cov.total_centers() << "\n"
      << "validation net " << rep.net_points << " points, max nearest " << num(rep.max_nearest) << "\n"
      << "coverage violations " << rep.coverage_violation_count << ", disjointness violations "
      << rep.disjointness_violation_count << "\n"
      << (rep.clean() ? "covering clean" : "covering FAILED") << "\n";
  return rep.clean() ? kClean : kVerificationFailure;
}

int cmd_run(const Args& args, std::ostream& out) {
  const RunConfig cfg = resolve_config(args);
  const ConvexDomain dom = make_domain(cfg.domain);
  const DomainConstants c = estimate_constants(dom, cfg.constants_samples, cfg.seed, cfg.constants_margin);
  const RunResult res = run_from_config(cfg, dom, c, out);
  const auto checks = run_checks(res);

  json report;
  report["config"] = json::parse(config_to_json(cfg));
  report["constants"] = {{"alpha1", c.alpha1}, {"alpha2", c.alpha2}, {"r1", c.r1}, {"lambda", c.lambda}};
  report["s"] = res.F.s();
  report["d0"] = res.d0;
  report["error"] = res.error ? json(*res.error) : json(nullptr);
  json stages = json::array();
  for (const TraceRow& row : res.trace) {
    json js = step_json(row.step);
    js["delta_k"] = row.delta;
    js["K_depth"] = row.K_depth;
    js["L_depth"] = row.L_depth;
    js["K_enlargements"] = row.K_enlargements;
    js["min_S_norm"] = row.min_S_norm;
    js["max_S_norm"] = row.max_S_norm;
    js["max_interior_norm"] = row.max_interior_norm;
    js["min_singular_value"] = finite(row.spot.min_singular_value);
    js["min_image_distance"] = finite(row.spot.min_image_distance);
    stages.push_back(std::move(js));
  }
  report["stages"] = std::move(stages);
  json prop = json::array();
  for (const NormExtrema& p : res.properness) {
    prop.push_back({{"k", p.k},
                    {"min_norm", p.min_norm},
                    {"max_norm", p.max_norm},
                    {"band_reached", p.band_reached},
                    {"grown", p.grown},
                    {"violations", p.violations}});
  }
  report["properness"] = std::move(prop);
  json tail = json::array();
  for (const TailCheck& t : res.tail) tail.push_back({{"k", t.k}, {"max_diff", t.max_diff}, {"delta", t.delta}});
  report["tail"] = std::move(tail);
  if (res.metric) {
    const MetricReport& m = *res.metric;
    report["metric"] = {{"d", m.d},
                        {"lower", m.lower},
                        {"gains", m.gains},
                        {"gain_sums", m.gain_sums},
                        {"E_fit", m.E_fit ? json(*m.E_fit) : json(nullptr)},
                        {"divergence_slope", m.divergence_slope ? json(*m.divergence_slope) : json(nullptr)},
                        {"tolerance", m.tolerance},
                        {"positive_gains", m.positive_gains},
                        {"nondecreasing", m.nondecreasing}};
  }
  bool ok = true;
  json jc = json::array();
  for (const RunCheck& ch : checks) {
    ok = ok && ch.passed;
    jc.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
    out << (ch.passed ? "PASS " : "FAIL ") << ch.name << (ch.detail.empty() ? "" : ": " + ch.detail) << "\n";
  }
  report["checks"] = std::move(jc);
  report["passed"] = ok;

  write_atomic(out_path(cfg, "map.json"), dump_map(res.F, c));
  write_atomic(out_path(cfg, "trace.csv"), trace_csv(res, args.timing));
  write_atomic(out_path(cfg, "report.json"), report.dump(1) + "\n");
  out << (ok ? "run clean" : "run FAILED") << "\n";
  return ok ? kClean : kVerificationFailure;
}

int cmd_eval(const Args& args, std::ostream& out) {
  if (args.dump.empty()) throw ConfigError("'--dump' is required for eval");
  if (args.points.empty()) throw ConfigError("'--points' is required for eval");
  const LoadedMap lm = load_map(read_file(args.dump));
  const MapState& F = lm.F;
  const int n = F.n();
  const int comps = F.components();

  std::ostringstream os;
  os << "point";
  for (int k = 0; k < n; ++k) os << ",z" << k << "_re,z" << k << "_im";
  for (int i = 0; i < comps; ++i) os << ",F" << i << "_re,F" << i << "_im";
  for (int i = 0; i < comps; ++i)
    for (int k = 0; k < n; ++k) os << ",J" << i << "_" << k << "_re,J" << i << "_" << k << "_im";
  os << "\n";

  std::size_t idx = 0;
  for (const auto& cells : read_csv(read_file(args.points))) {
    // A header row is any row whose first cell is not a number.
    if (idx == 0 && !cells.empty()) {
      try {
        std::size_t used = 0;
        std::stod(cells[0], &used);
      } catch (const std::exception&) {
        continue;
      }
    }
    if (cells.size() != static_cast<std::size_t>(2 * n)) {
      throw ConfigError("points file row " + std::to_string(idx + 1) + ": expected " + std::to_string(2 * n) +
                        " numbers");
    }
    CVector z(n);
    for (int k = 0; k < n; ++k) {
      z[k] = Complex(parse_double(cells[2 * k], "points file"), parse_double(cells[2 * k + 1], "points file"));
    }
    if (F.domain().rho(z) > F.domain().boundary_tolerance()) {
      throw ConfigError("points file row " + std::to_string(idx + 1) + ": point lies outside the closed domain");
    }
    std::vector<Complex> values;
    const CMatrix J = F.jac(z, &values);
    os << idx;
    for (int k = 0; k < n; ++k) os << ',' << num(z[k].real()) << ',' << num(z[k].imag());
    char buf[64];
    for (const Complex v : values) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", v.real(), v.imag());
      os << buf;
    }
    for (int i = 0; i < comps; ++i) {
      for (int k = 0; k < n; ++k) {
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g", J(i, k).real(), J(i, k).imag());
        os << buf;
      }
    }
    os << "\n";
    ++idx;
  }
  if (args.out) {
    write_atomic((fs::path(*args.out) / "eval.csv").string(), os.str());
  } else {
    out << os.str();
  }
  return kClean;
}

int cmd_trace_plot_data(const Args& args, std::ostream& out) {
  const RunConfig cfg = resolve_config(args);
  std::string text;
  if (!args.trace.empty()) {
    text = read_file(args.trace);
  } else {
    const ConvexDomain dom = make_domain(cfg.domain);
    const DomainConstants c = estimate_constants(dom, cfg.constants_samples, cfg.seed, cfg.constants_margin);
    text = trace_csv(run_from_config(cfg, dom, c, out), args.timing);
  }
  const auto rows = read_csv(text);
  if (rows.empty() || rows[0].empty() || rows[0][0] != "k") throw ConfigError("trace: missing header row");
  const auto& header = rows[0];
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ConfigError("trace: missing column '" + name + "'");
  };
  const std::size_t ck = col("k"), ca = col("a_k"), ce = col("eps_k"), cmin = col("min_S_norm"),
                    cmax = col("max_S_norm"), cd = col("d_k"), cg = col("gain_k"), cE = col("E_fit_running"),
                    cs = col("s"), cm = col("m"), cr = col("r"), cN = col("N_total");

  std::ostringstream norms, dist, stages;
  norms << "k,min_S_norm,max_S_norm,band_upper,band_lower\n";
  dist << "k,gain_sum,d_k,gain_k,E_fit_running\n";
  stages << "k,s,m,r,N_total\n";
  double gain_sum = 0.0;
  for (std::size_t t = 1; t < rows.size(); ++t) {
    const auto& row = rows[t];
    if (row.size() != header.size()) throw ConfigError("trace: row " + std::to_string(t) + " has the wrong width");
    const double a = parse_double(row[ca], "trace");
    const double eps = parse_double(row[ce], "trace");
    gain_sum += std::pow(eps, 5.0 / 16.0);
    norms << row[ck] << ',' << row[cmin] << ',' << row[cmax] << ',' << num(a + eps) << ','
          << num(a - std::pow(eps, 1.0 / 7.0)) << '\n';
    dist << row[ck] << ',' << num(gain_sum) << ',' << row[cd] << ',' << row[cg] << ',' << row[cE] << '\n';
    stages << row[ck] << ',' << row[cs] << ',' << row[cm] << ',' << row[cr] << ',' << row[cN] << '\n';
  }
  write_atomic(out_path(cfg, "fig_norms.csv"), norms.str());
  write_atomic(out_path(cfg, "fig_distance.csv"), dist.str());
  write_atomic(out_path(cfg, "fig_stages.csv"), stages.str());
  out << "wrote fig_norms.csv, fig_distance.csv, fig_stages.csv to " << cfg.out_dir << "\n";
  return kClean;
}

}  // namespace peakembed::cli
