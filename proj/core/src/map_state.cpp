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

#include "peakembed/map_state.hpp"

#include <cmath>

namespace peakembed {

InitialMap::InitialMap(const InitialMapSpec& spec, const ConvexDomain& dom) : spec_(spec), n_(dom.dim()) {
  if (!(spec.factor >= 0.0)) throw ConfigError("h.factor must be nonnegative");
  const double R = dom.max_boundary_norm();
  if (spec.kind == "scaled-identity") {
    p_ = n_;
    sup_ = spec.factor * R;
  } else if (spec.kind == "coordinate-embedding") {
    p_ = n_ + 1;
    sup_ = spec.factor * std::sqrt(R * R + R * R * R * R);
  } else {
    throw ConfigError("unknown h kind '" + spec.kind + "'");
  }
  if (!(sup_ < 1.0)) throw ConfigError("h must map the closure into the unit ball (sup_S |h| < 1)");
}

void InitialMap::eval(const CVector& z, Complex* out) const {
  for (int k = 0; k < n_; ++k) out[k] = spec_.factor * z[k];
  if (p_ > n_) out[n_] = spec_.factor * z[0] * z[0];
}

std::vector<Complex> InitialMap::eval(const CVector& z) const {
  std::vector<Complex> out(static_cast<std::size_t>(p_));
  eval(z, out.data());
  return out;
}

void InitialMap::jac(const CVector& z, CMatrix& J, int row0) const {
  for (int k = 0; k < n_; ++k) J(row0 + k, k) += spec_.factor;
  if (p_ > n_) J(row0 + n_, 0) += 2.0 * spec_.factor * z[0];
}

CMatrix InitialMap::jac(const CVector& z) const {
  CMatrix J(p_, n_);
  jac(z, J, 0);
  return J;
}

MapState::MapState(ConvexDomain dom, InitialMap h, int s) : dom_(std::move(dom)), h_(std::move(h)), s_(s) {
  if (s < 1) throw PreconditionError("MapState: s must be >= 1");
  if (h_.n() != dom_.dim()) throw DimensionError("MapState: h and domain dimensions differ");
}

void MapState::add_stage(std::shared_ptr<const Stage> st) {
  if (st->field.s() != s_) throw DimensionError("MapState::add_stage: stage has a different s");
  stages_.push_back(std::move(st));
}

MapState MapState::truncated(std::size_t k) const {
  MapState out(dom_, h_, s_);
  out.stages_.assign(stages_.begin(), stages_.begin() + static_cast<std::ptrdiff_t>(std::min(k, stages_.size())));
  return out;
}

void MapState::eval(const CVector& z, Complex* out) const {
  for (int i = 0; i < 2 * s_; ++i) out[i] = 0.0;
  if (!stages_.empty()) {
    const DepthBounds depth = dom_.depth_bounds(z);
    for (const auto& st : stages_) st->field.add_values(z, depth, out);
  }
  h_.eval(z, out + 2 * s_);
}

std::vector<Complex> MapState::eval(const CVector& z) const {
  std::vector<Complex> out(static_cast<std::size_t>(components()));
  eval(z, out.data());
  return out;
}

CMatrix MapState::jac(const CVector& z, std::vector<Complex>* values) const {
  CMatrix J(components(), n());
  Complex* out = nullptr;
  if (values != nullptr) {
    values->assign(static_cast<std::size_t>(components()), Complex(0.0, 0.0));
    out = values->data();
  }
  if (!stages_.empty()) {
    const DepthBounds depth = dom_.depth_bounds(z);
    for (const auto& st : stages_) st->field.add_jacobian(z, depth, J, 0, out);
  }
  h_.jac(z, J, 2 * s_);
  if (out != nullptr) h_.eval(z, out + 2 * s_);
  return J;
}

std::vector<Complex> MapState::stage_values(std::size_t i, const CVector& z) const {
  std::vector<Complex> out(static_cast<std::size_t>(2 * s_));
  stages_[i]->field.add_values(z, dom_.depth_bounds(z), out.data());
  return out;
}

std::vector<Complex> map_eval(const MapState& F, const CVector& z) { return F.eval(z); }

CMatrix map_jac(const MapState& F, const CVector& z) { return F.jac(z); }

std::vector<Complex> map_eval_naive(const MapState& F, const CVector& z) {
  std::vector<Complex> out(static_cast<std::size_t>(F.components()));
  for (std::size_t t = 0; t < F.stage_count(); ++t) {
    const PeakField& f = F.stage(t).field;
    for (int i = 0; i < f.components(); ++i) out[i] += sum_eval_naive(f.sum(i), z);
  }
  F.h().eval(z, out.data() + 2 * F.s());
  return out;
}

}  // namespace peakembed
