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

#include "peakembed/config.hpp"

#include <fstream>
#include <json.hpp>
#include <optional>
#include <set>
#include <sstream>

namespace peakembed {
namespace {

using json = nlohmann::json;

// Reads keys of one JSON object and rejects the ones nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("'" + name() + "' must be an object");
  }

  double number(const char* key, double def, double lo, double hi) {
    if (!take(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError("'" + qualified(key) + "' must be a number");
    const double x = v.get<double>();
    if (!(x >= lo && x <= hi)) {
      std::ostringstream os;
      os << "'" << qualified(key) << "' = " << x << " is outside [" << lo << ", " << hi << "]";
      throw ConfigError(os.str());
    }
    return x;
  }

  std::int64_t integer(const char* key, std::int64_t def, std::int64_t lo, std::int64_t hi) {
    if (!take(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError("'" + qualified(key) + "' must be an integer");
    const std::int64_t x = v.get<std::int64_t>();
    if (x < lo || x > hi) {
      throw ConfigError("'" + qualified(key) + "' = " + std::to_string(x) + " is outside [" + std::to_string(lo) +
                        ", " + std::to_string(hi) + "]");
    }
    return x;
  }

  std::uint64_t seed(const char* key, std::uint64_t def) {
    if (!take(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError("'" + qualified(key) + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const char* key, bool def) {
    if (!take(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError("'" + qualified(key) + "' must be true or false");
    return v.get<bool>();
  }

  std::string string(const char* key, const std::string& def) {
    if (!take(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError("'" + qualified(key) + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key) {
    if (!take(key)) return {};
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError("'" + qualified(key) + "' must be an array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
      if (!x.is_number()) throw ConfigError("'" + qualified(key) + "' must be an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::optional<Section> child(const char* key) {
    if (!take(key)) return std::nullopt;
    return Section(j_.at(key), qualified(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + qualified(it.key()) + "'");
    }
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string name() const { return path_.empty() ? "config" : path_; }
  bool take(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

constexpr double kBig = 1e300;
constexpr std::int64_t kCount = 1000000000;

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  RunOptions& r = c.run;
  Section top(j, "");
  if (auto d = top.child("domain")) {
    c.domain.kind = d->string("kind", "ball");
    if (c.domain.kind == "ball") {
      c.domain.n = static_cast<int>(d->integer("n", 1, 1, 64));
    } else if (c.domain.kind == "ellipsoid") {
      c.domain.semiaxes = d->numbers("semiaxes");
      if (c.domain.semiaxes.empty()) throw ConfigError("'" + d->qualified("semiaxes") + "' is required");
      for (double x : c.domain.semiaxes) {
        if (!(x > 0.0)) throw ConfigError("'" + d->qualified("semiaxes") + "' entries must be positive");
      }
      c.domain.n = static_cast<int>(c.domain.semiaxes.size());
      d->integer("n", c.domain.n, c.domain.n, c.domain.n);
    } else {
      throw ConfigError("'" + d->qualified("kind") + "' must be \"ball\" or \"ellipsoid\"");
    }
    d->finish();
  }
  if (auto h = top.child("h")) {
    c.h.kind = h->string("kind", c.h.kind);
    if (c.h.kind != "scaled-identity" && c.h.kind != "coordinate-embedding") {
      throw ConfigError("'h.kind' must be \"scaled-identity\" or \"coordinate-embedding\"");
    }
    c.h.factor = h->number("factor", c.h.factor, 0.0, kBig);
    h->finish();
  }
  r.a1 = top.number("a1", r.a1, 0.0, 1.0);
  r.stages = static_cast<int>(top.integer("stages", r.stages, 0, 1000));
  c.seed = top.seed("seed", c.seed);
  c.out_dir = top.string("out", c.out_dir);
  if (auto s = top.child("sampling")) {
    c.constants_samples = static_cast<std::size_t>(s->integer("constants_samples", 10000, 10, kCount));
    c.validation_pairs = static_cast<std::size_t>(s->integer("validation_pairs", 10000, 10, kCount));
    c.constants_margin = s->number("constants_margin", c.constants_margin, 0.0, 0.99);
    r.step.min_boundary_samples = static_cast<std::size_t>(
        s->integer("boundary_samples", static_cast<std::int64_t>(r.step.min_boundary_samples), 10, kCount));
    r.step.points_per_ball = s->number("points_per_ball", r.step.points_per_ball, 1.0, 1e6);
    r.step.max_verify_points = static_cast<std::size_t>(
        s->integer("max_verify_points", static_cast<std::int64_t>(r.step.max_verify_points), 10, kCount));
    r.step.compact_samples = static_cast<std::size_t>(
        s->integer("compact_samples", static_cast<std::int64_t>(r.step.compact_samples), 2, kCount));
    r.step.continuity_pairs = static_cast<std::size_t>(
        s->integer("continuity_pairs", static_cast<std::int64_t>(r.step.continuity_pairs), 1, kCount));
    r.properness_samples = static_cast<std::size_t>(
        s->integer("properness_samples", static_cast<std::int64_t>(r.properness_samples), 10, kCount));
    r.interior_samples = static_cast<std::size_t>(
        s->integer("interior_samples", static_cast<std::int64_t>(r.interior_samples), 1, kCount));
    r.tail_samples =
        static_cast<std::size_t>(s->integer("tail_samples", static_cast<std::int64_t>(r.tail_samples), 1, kCount));
    r.spot_points =
        static_cast<std::size_t>(s->integer("spot_points", static_cast<std::int64_t>(r.spot_points), 1, kCount));
    r.spot_pairs =
        static_cast<std::size_t>(s->integer("spot_pairs", static_cast<std::int64_t>(r.spot_pairs), 1, kCount));
    s->finish();
  }
  if (auto st = top.child("step")) {
    r.step.retries = static_cast<int>(st->integer("retries", r.step.retries, 0, 60));
    r.step.r_floor_fraction = st->number("r_floor_fraction", r.step.r_floor_fraction, 1e-12, 1.0);
    r.step.continuity_safety = st->number("continuity_safety", r.step.continuity_safety, 1.0, kBig);
    r.step.strict = st->boolean("strict", r.step.strict);
    r.step.prune_threshold = st->number("prune_threshold", r.step.prune_threshold, 1.0, 700.0);
    r.delta_budget = st->number("delta_budget", r.delta_budget, 1e-300, kBig);
    r.path_cap = st->number("path_cap", r.path_cap, 1e-300, kBig);
    st->finish();
  }
  if (auto m = top.child("mesh")) {
    r.mesh.h = m->number("h", r.mesh.h, 1e-6, 1.0);
    r.mesh.collar_fraction = m->number("collar_fraction", r.mesh.collar_fraction, 1e-9, 0.5);
    r.mesh.max_nodes =
        static_cast<std::size_t>(m->integer("max_nodes", static_cast<std::int64_t>(r.mesh.max_nodes), 16, kCount));
    r.measure_distance = m->boolean("enabled", r.measure_distance);
    m->finish();
  }
  if (auto k = top.child("compacts")) {
    r.compacts.d0_fraction = k->number("d0_fraction", r.compacts.d0_fraction, 1e-9, 0.5);
    r.compacts.kappa_K = k->number("kappa_K", r.compacts.kappa_K, 1e-9, kBig);
    r.compacts.kappa_L = k->number("kappa_L", r.compacts.kappa_L, 1e-9, kBig);
    if (!(r.compacts.kappa_K < r.compacts.kappa_L)) throw ConfigError("'compacts.kappa_K' must be below 'compacts.kappa_L'");
    k->finish();
  }
  top.finish();
  r.seed = c.seed;
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const RunConfig& c) {
  const RunOptions& r = c.run;
  json j;
  j["domain"] = {{"kind", c.domain.kind}};
  if (c.domain.kind == "ball") j["domain"]["n"] = c.domain.n;
  else j["domain"]["semiaxes"] = c.domain.semiaxes;
  j["h"] = {{"kind", c.h.kind}, {"factor", c.h.factor}};
  j["a1"] = r.a1;
  j["stages"] = r.stages;
  j["seed"] = c.seed;
  j["out"] = c.out_dir;
  j["sampling"] = {{"constants_samples", c.constants_samples},
                   {"validation_pairs", c.validation_pairs},
                   {"constants_margin", c.constants_margin},
                   {"boundary_samples", r.step.min_boundary_samples},
                   {"points_per_ball", r.step.points_per_ball},
                   {"max_verify_points", r.step.max_verify_points},
                   {"compact_samples", r.step.compact_samples},
                   {"continuity_pairs", r.step.continuity_pairs},
                   {"properness_samples", r.properness_samples},
                   {"interior_samples", r.interior_samples},
                   {"tail_samples", r.tail_samples},
                   {"spot_points", r.spot_points},
                   {"spot_pairs", r.spot_pairs}};
  j["step"] = {{"retries", r.step.retries},
               {"r_floor_fraction", r.step.r_floor_fraction},
               {"continuity_safety", r.step.continuity_safety},
               {"strict", r.step.strict},
               {"prune_threshold", r.step.prune_threshold},
               {"delta_budget", r.delta_budget},
               {"path_cap", r.path_cap}};
  j["mesh"] = {{"h", r.mesh.h},
               {"collar_fraction", r.mesh.collar_fraction},
               {"max_nodes", r.mesh.max_nodes},
               {"enabled", r.measure_distance}};
  j["compacts"] = {
      {"d0_fraction", r.compacts.d0_fraction}, {"kappa_K", r.compacts.kappa_K}, {"kappa_L", r.compacts.kappa_L}};
  return j.dump(2) + "\n";
}

}  // namespace peakembed
