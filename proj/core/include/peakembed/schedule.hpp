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

#include <vector>

namespace peakembed {

/// zeta(3/2) by Euler-Maclaurin summation.
double zeta_three_halves();

/// eps_k = c k^-3 with 3 sum_k eps_k^(1/2) = 1 - a1, and
/// a_k = a1 + 3 sum_(l<k) eps_l^(1/2) + 2 eps_k^(1/2) for k >= 2.
struct Schedule {
  double a1 = 0.0;
  double c = 0.0;
  int count = 0;
  std::vector<double> deltas;  // delta_k at index k - 1, filled by the driver

  double eps(int k) const;
  double a(int k) const;
  /// a_(k+1) - eps_(k+1)^(1/2) - a_k - eps_k; positive when the chained band condition holds.
  double band_margin(int k) const;
  /// a1 - eps_1^(1/2) - max(h_sup, 1/2).
  double start_margin(double h_sup) const;
  /// sum_(j <= k) eps_j^(5/16).
  double gain_sum(int k) const;
};

/// Throws PreconditionError("a1 too small for this h") when the start condition fails.
Schedule make_schedule(double h_sup, double a1, int K);

}  // namespace peakembed
