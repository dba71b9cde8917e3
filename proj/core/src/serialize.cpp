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

#include "peakembed/serialize.hpp"

#include <json.hpp>
#include <memory>

namespace peakembed {
namespace {

using json = nlohmann::json;

json cloud_json(const PointCloud& pc) {
  json out = json::array();
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const double* p = pc.raw(i);
    for (int k = 0; k < 2 * pc.dim(); ++k) out.push_back(p[k]);
  }
  return out;
}

PointCloud cloud_from(const json& j, int n) {
  if (!j.is_array() || j.size() % (2 * static_cast<std::size_t>(n)) != 0) {
    throw ConfigError("dump: point list length is not a multiple of 2n");
  }
  PointCloud pc(n);
  for (std::size_t i = 0; i < j.size(); i += 2 * n) {
    CVector z(n);
    for (int k = 0; k < n; ++k) z[k] = Complex(j[i + 2 * k].get<double>(), j[i + 2 * k + 1].get<double>());
    pc.push_back(z);
  }
  return pc;
}

json covering_json(const Covering& cov, bool normals) {
  json fams = json::array();
  for (const CoveringFamily& f : cov.base()) {
    json jf = {{"centers", cloud_json(f.centers)}};
    if (normals) jf["normals"] = cloud_json(f.normals);
    fams.push_back(std::move(jf));
  }
  return fams;
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("dump: missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("dump: key '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string dump_map(const MapState& F, const DomainConstants& consts) {
  const ConvexDomain& dom = F.domain();
  if (dom.spec().kind == "custom") throw PreconditionError("dump_map: only built-in domains can be dumped");
  json j;
  j["format"] = "peakembed-map";
  j["version"] = 1;
  j["n"] = F.n();
  j["s"] = F.s();
  j["p"] = F.h().p();
  j["domain"] = {{"kind", dom.spec().kind}, {"n", dom.spec().n}, {"semiaxes", dom.spec().semiaxes}};
  j["h"] = {{"kind", F.h().spec().kind}, {"factor", F.h().spec().factor}};
  j["constants"] = {{"alpha1", consts.alpha1}, {"alpha2", consts.alpha2}, {"r1", consts.r1},
                    {"lambda", consts.lambda}, {"gamma1", consts.gamma1}};
  json stages = json::array();
  for (std::size_t t = 0; t < F.stage_count(); ++t) {
    const Stage& st = F.stage(t);
    const PeakParams& p = st.params;
    json js;
    js["k"] = st.k;
    js["a"] = st.a;
    js["eps"] = st.eps;
    js["delta"] = st.delta;
    js["r"] = p.r;
    js["lambda"] = p.lambda;
    js["m"] = p.m;
    js["params"] = {{"eta", p.eta}, {"C2", p.C2},         {"C", p.C},
                    {"mu", p.mu},   {"alpha2", p.alpha2}, {"halvings", p.halvings}};
    js["alpha1"] = st.field.alpha1();
    js["r1"] = st.field.r1();
    js["prune_threshold"] = st.field.prune_threshold();
    js["coefficient_residual"] = st.coefficient_residual;
    js["families"] = covering_json(st.covering, true);
    json coeffs = json::array();
    for (const auto& list : st.field.coeffs()) {
      json jl = json::array();
      for (const Complex b : list) {
        jl.push_back(b.real());
        jl.push_back(b.imag());
      }
      coeffs.push_back(std::move(jl));
    }
    js["coefficients"] = std::move(coeffs);
    stages.push_back(std::move(js));
  }
  j["stages"] = std::move(stages);
  return j.dump(1) + "\n";
}

static LoadedMap load_impl(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("dump: not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "peakembed-map") throw ConfigError("dump: not a peakembed map dump");
  const int n = field<int>(j, "n");
  const int s = field<int>(j, "s");
  const json& jd = j.at("domain");
  DomainSpec spec{field<std::string>(jd, "kind"), field<int>(jd, "n"), field<std::vector<double>>(jd, "semiaxes")};
  if (spec.kind == "ball" && spec.n != n) throw ConfigError("dump: domain.n differs from n");
  const ConvexDomain dom = make_domain(spec);
  const json& jh = j.at("h");
  const InitialMap h(InitialMapSpec{field<std::string>(jh, "kind"), field<double>(jh, "factor")}, dom);
  if (h.p() != field<int>(j, "p")) throw ConfigError("dump: p does not match the h spec");
  const json& jc = j.at("constants");
  DomainConstants c{field<double>(jc, "alpha1"), field<double>(jc, "alpha2"), field<double>(jc, "r1"),
                    field<double>(jc, "lambda"), field<double>(jc, "gamma1")};
  LoadedMap out{MapState(dom, h, s), c};
  for (const json& js : field<json>(j, "stages")) {
    auto st = std::make_shared<Stage>();
    st->k = field<int>(js, "k");
    st->a = field<double>(js, "a");
    st->eps = field<double>(js, "eps");
    st->delta = field<double>(js, "delta");
    PeakParams& p = st->params;
    p.r = field<double>(js, "r");
    p.lambda = field<double>(js, "lambda");
    p.m = field<double>(js, "m");
    const json& jp = js.at("params");
    p.eta = field<double>(jp, "eta");
    p.C2 = field<double>(jp, "C2");
    p.C = field<double>(jp, "C");
    p.mu = field<double>(jp, "mu");
    p.alpha2 = field<double>(jp, "alpha2");
    p.halvings = field<int>(jp, "halvings");
    st->coefficient_residual = field<double>(js, "coefficient_residual");
    std::vector<CoveringFamily> fams;
    for (const json& jf : field<json>(js, "families")) {
      CoveringFamily f(n);
      f.centers = cloud_from(jf.at("centers"), n);
      f.normals = cloud_from(jf.at("normals"), n);
      if (f.centers.size() != f.normals.size()) throw ConfigError("dump: centers and normals differ in count");
      fams.push_back(std::move(f));
    }
    if (static_cast<int>(fams.size()) != s) throw ConfigError("dump: stage family count differs from s");
    st->covering = Covering(p.r, p.lambda, std::move(fams));
    std::vector<std::vector<Complex>> coeffs;
    for (const json& jl : field<json>(js, "coefficients")) {
      std::vector<Complex> list;
      if (jl.size() % 2 != 0) throw ConfigError("dump: coefficient list has odd length");
      for (std::size_t i = 0; i < jl.size(); i += 2) list.emplace_back(jl[i].get<double>(), jl[i + 1].get<double>());
      coeffs.push_back(std::move(list));
    }
    try {
      st->field = PeakField(st->covering, p.m, std::move(coeffs), field<double>(js, "alpha1"), field<double>(js, "r1"),
                            field<double>(js, "prune_threshold"));
    } catch (const Error& e) {
      throw ConfigError(std::string("dump: ") + e.what());
    }
    out.F.add_stage(st);
  }
  return out;
}

LoadedMap load_map(const std::string& text) {
  try {
    return load_impl(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("dump: ") + e.what());
  }
}

std::string dump_covering(const Covering& cov) {
  json j;
  j["format"] = "peakembed-covering";
  j["r"] = cov.r();
  j["lambda"] = cov.lambda();
  j["s"] = cov.s();
  j["total_centers"] = cov.total_centers();
  j["families"] = covering_json(cov, false);
  return j.dump(1) + "\n";
}

}  // namespace peakembed
