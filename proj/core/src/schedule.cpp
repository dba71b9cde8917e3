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

#include "peakembed/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "peakembed/error.hpp"

namespace peakembed {

double zeta_three_halves() {
  // sum_(k<N) k^-s plus the tail integral, half term and two Bernoulli corrections.
  constexpr int kN = 1000;
  constexpr double s = 1.5;
  double acc = 0.0;
  for (int k = kN - 1; k >= 1; --k) acc += std::pow(static_cast<double>(k), -s);
  const double N = kN;
  acc += std::pow(N, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(N, -s);
  acc += s / 12.0 * std::pow(N, -s - 1.0);
  acc -= s * (s + 1.0) * (s + 2.0) / 720.0 * std::pow(N, -s - 3.0);
  return acc;
}

double Schedule::eps(int k) const {
  if (k < 1) throw PreconditionError("Schedule::eps: k must be >= 1");
  return c / (static_cast<double>(k) * k * k);
}

double Schedule::a(int k) const {
  if (k < 1) throw PreconditionError("Schedule::a: k must be >= 1");
  if (k == 1) return a1;
  double acc = 0.0;
  for (int l = 1; l < k; ++l) acc += std::sqrt(eps(l));
  return a1 + 3.0 * acc + 2.0 * std::sqrt(eps(k));
}

double Schedule::band_margin(int k) const { return a(k + 1) - std::sqrt(eps(k + 1)) - a(k) - eps(k); }

double Schedule::start_margin(double h_sup) const { return a1 - std::sqrt(eps(1)) - std::max(h_sup, 0.5); }

double Schedule::gain_sum(int k) const {
  double acc = 0.0;
  for (int j = 1; j <= k; ++j) acc += std::pow(eps(j), 5.0 / 16.0);
  return acc;
}

Schedule make_schedule(double h_sup, double a1, int K) {
  if (!(a1 < 1.0)) throw PreconditionError("make_schedule: a1 must be < 1");
  if (K < 0) throw PreconditionError("make_schedule: K must be >= 0");
  Schedule sch;
  sch.a1 = a1;
  sch.count = K;
  const double root = (1.0 - a1) / (3.0 * zeta_three_halves());
  sch.c = root * root;
  if (!(std::max(h_sup, 0.5) < a1) || !(sch.start_margin(h_sup) > 0.0)) {
    throw PreconditionError("a1 too small for this h");
  }
  for (int k = 1; k < std::max(K, 1); ++k) {
    if (!(sch.band_margin(k) > 0.0)) throw PreconditionError("make_schedule: band condition fails at k = " + std::to_string(k));
  }
  return sch;
}

}  // namespace peakembed
