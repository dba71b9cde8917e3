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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "peakembed/domain.hpp"

namespace peakembed {

/// Squared Euclidean distance of two packed points with `dim` real coordinates.
inline double packed_distance_sq(const double* a, const double* b, int dim) {
  double acc = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return acc;
}

/// Uniform hashed grid over a point cloud. Cell keys are hashed, so two
/// distinct cells may share a bucket; callers always test true distances.
class SpatialGrid {
 public:
  SpatialGrid() = default;
  SpatialGrid(const PointCloud& pts, double cell);

  double cell() const { return cell_; }
  std::size_t size() const { return order_.size(); }

  /// Calls visit(index, coords) for every point within `radius` of q (and
  /// possibly more). Coordinates come from a grid-ordered copy, so scans are
  /// contiguous. Stops early when visit returns false.
  template <class Visit>
  void for_each_candidate(const double* q, double radius, Visit&& visit) const;

  /// Exact indices within `radius` of q, ascending.
  std::vector<std::uint32_t> within(const double* q, double radius) const;

  /// Half-open range of grid positions sharing one cell.
  struct Range {
    std::uint32_t begin;
    std::uint32_t end;
  };

  /// Occupied cells in grid order.
  const std::vector<Range>& blocks() const { return blocks_; }

  /// Indices into blocks() of the cells that may hold a point within
  /// `radius` of some point of block `bi`.
  void neighbor_blocks(std::uint32_t bi, double radius, std::vector<std::uint32_t>& out) const;

  /// Index into blocks() of the cell containing q, or -1 if that cell is empty.
  std::int64_t block_containing(const double* q) const;

  /// Squared distance from q to the box of cell `bi`.
  double block_distance_sq(std::uint32_t bi, const double* q) const {
    const double* lo = corners_.data() + static_cast<std::size_t>(bi) * dim_;
    double acc = 0.0;
    for (int k = 0; k < dim_; ++k) {
      double d = 0.0;
      if (q[k] < lo[k]) {
        d = lo[k] - q[k];
      } else if (q[k] > lo[k] + cell_) {
        d = q[k] - lo[k] - cell_;
      }
      acc += d * d;
    }
    return acc;
  }

  std::uint32_t index_at(std::uint32_t pos) const { return order_[pos]; }
  const double* coords_at(std::uint32_t pos) const { return xy_.data() + static_cast<std::size_t>(pos) * dim_; }

 private:
  std::uint64_t key(const std::int64_t* c) const;

  const PointCloud* pts_ = nullptr;
  int dim_ = 0;
  bool exact_ = true;  // keys pack cell coordinates without collisions
  int bits_ = 0;
  std::int64_t offset_ = 0;
  double cell_ = 1.0;
  std::vector<std::uint32_t> order_;
  std::vector<double> xy_;  // coordinates in grid order
  std::unordered_map<std::uint64_t, std::uint32_t> cells_;  // key -> block index
  std::vector<Range> blocks_;
  std::vector<double> corners_;  // lower cell corner per block
};

template <class Visit>
void SpatialGrid::for_each_candidate(const double* q, double radius, Visit&& visit) const {
  if (order_.empty()) return;
  std::int64_t lo[2 * kMaxDim];
  std::int64_t hi[2 * kMaxDim];
  std::int64_t c[2 * kMaxDim];
  double cube = 1.0;
  for (int k = 0; k < dim_; ++k) {
    lo[k] = static_cast<std::int64_t>(std::floor((q[k] - radius) / cell_));
    hi[k] = static_cast<std::int64_t>(std::floor((q[k] + radius) / cell_));
    c[k] = lo[k];
    cube *= static_cast<double>(hi[k] - lo[k] + 1);
  }
  if (cube > static_cast<double>(cells_.size())) {
    for (std::size_t p = 0; p < order_.size(); ++p) {
      if (!visit(order_[p], xy_.data() + p * dim_)) return;
    }
    return;
  }
  std::vector<std::uint32_t> seen;
  while (true) {
    const auto it = cells_.find(key(c));
    bool fresh = it != cells_.end();
    if (fresh && !exact_) {
      fresh = std::find(seen.begin(), seen.end(), it->second) == seen.end();
      if (fresh) seen.push_back(it->second);
    }
    if (fresh) {
      const Range& rg = blocks_[it->second];
      for (std::uint32_t p = rg.begin; p < rg.end; ++p) {
        if (!visit(order_[p], xy_.data() + static_cast<std::size_t>(p) * dim_)) return;
      }
    }
    int k = 0;
    while (k < dim_ && c[k] == hi[k]) {
      c[k] = lo[k];
      ++k;
    }
    if (k == dim_) return;
    ++c[k];
  }
}

/// Farthest-point sampling: starting from point 0, repeatedly add the point
/// farthest from the chosen set (ties to the lowest index) while that
/// distance is >= threshold. Returns chosen indices in selection order.
std::vector<std::uint32_t> farthest_point_sampling(const PointCloud& pts, double threshold);

}  // namespace peakembed
