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

#include "peakembed/spatial.hpp"

#include <limits>
#include <numeric>

namespace peakembed {
namespace {

constexpr std::uint64_t kMissing = std::numeric_limits<std::uint64_t>::max();

std::uint64_t mix(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

SpatialGrid::SpatialGrid(const PointCloud& pts, double cell) : pts_(&pts), dim_(2 * pts.dim()), cell_(cell) {
  if (!(cell > 0.0)) throw PreconditionError("SpatialGrid: cell size must be positive");
  const std::size_t n = pts.size();
  if (n >= std::numeric_limits<std::uint32_t>::max()) throw PreconditionError("SpatialGrid: too many points");

  std::int64_t span = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = pts.raw(i);
    for (int k = 0; k < dim_; ++k) {
      span = std::max(span, static_cast<std::int64_t>(std::abs(std::floor(p[k] / cell_))) + 2);
    }
  }
  offset_ = span;
  bits_ = 1;
  while ((std::int64_t{1} << bits_) < 2 * span + 1) ++bits_;
  exact_ = bits_ * dim_ <= 63;

  std::vector<std::uint64_t> keys(n);
  std::int64_t c[2 * kMaxDim];
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = pts.raw(i);
    for (int k = 0; k < dim_; ++k) c[k] = static_cast<std::int64_t>(std::floor(p[k] / cell_));
    keys[i] = key(c);
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  std::stable_sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });
  xy_.resize(n * dim_);
  for (std::size_t p = 0; p < n; ++p) std::copy(pts.raw(order_[p]), pts.raw(order_[p]) + dim_, xy_.data() + p * dim_);
  cells_.reserve(n / 2 + 1);
  std::size_t s = 0;
  while (s < n) {
    std::size_t e = s + 1;
    while (e < n && keys[order_[e]] == keys[order_[s]]) ++e;
    cells_.emplace(keys[order_[s]], static_cast<std::uint32_t>(blocks_.size()));
    blocks_.push_back(Range{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(e)});
    const double* p = coords_at(static_cast<std::uint32_t>(s));
    for (int k = 0; k < dim_; ++k) corners_.push_back(std::floor(p[k] / cell_) * cell_);
    s = e;
  }
}

std::uint64_t SpatialGrid::key(const std::int64_t* c) const {
  if (exact_) {
    std::uint64_t k = 0;
    for (int d = 0; d < dim_; ++d) {
      const std::int64_t v = c[d] + offset_;
      if (v < 0 || v >= (std::int64_t{1} << bits_)) return kMissing;
      k = (k << bits_) | static_cast<std::uint64_t>(v);
    }
    return k;
  }
  std::uint64_t h = 0x9E3779B97F4A7C15ull;
  for (int d = 0; d < dim_; ++d) h = mix(h ^ static_cast<std::uint64_t>(c[d]));
  return h == kMissing ? h - 1 : h;
}

void SpatialGrid::neighbor_blocks(std::uint32_t bi, double radius, std::vector<std::uint32_t>& out) const {
  out.clear();
  const double* p = corners_.data() + static_cast<std::size_t>(bi) * dim_;
  std::int64_t lo[2 * kMaxDim];
  std::int64_t hi[2 * kMaxDim];
  std::int64_t c[2 * kMaxDim];
  double cube = 1.0;
  for (int k = 0; k < dim_; ++k) {
    const double base = p[k];
    lo[k] = static_cast<std::int64_t>(std::floor((base - radius) / cell_));
    hi[k] = static_cast<std::int64_t>(std::ceil((base + cell_ + radius) / cell_)) - 1;
    c[k] = lo[k];
    cube *= static_cast<double>(hi[k] - lo[k] + 1);
  }
  if (cube > static_cast<double>(cells_.size())) {
    out.resize(blocks_.size());
    std::iota(out.begin(), out.end(), 0u);
    return;
  }
  while (true) {
    const auto it = cells_.find(key(c));
    if (it != cells_.end()) {
      if (exact_ || std::find(out.begin(), out.end(), it->second) == out.end()) out.push_back(it->second);
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

std::int64_t SpatialGrid::block_containing(const double* q) const {
  std::int64_t c[2 * kMaxDim];
  for (int k = 0; k < dim_; ++k) c[k] = static_cast<std::int64_t>(std::floor(q[k] / cell_));
  const auto it = cells_.find(key(c));
  if (it == cells_.end()) return -1;
  // Hashed keys can collide; confirm the corner.
  const double* lo = corners_.data() + static_cast<std::size_t>(it->second) * dim_;
  for (int k = 0; k < dim_; ++k) {
    if (static_cast<std::int64_t>(std::floor(lo[k] / cell_ + 0.5)) != c[k]) return -1;
  }
  return it->second;
}

std::vector<std::uint32_t> SpatialGrid::within(const double* q, double radius) const {
  std::vector<std::uint32_t> out;
  const double r2 = radius * radius;
  for_each_candidate(q, radius, [&](std::uint32_t i, const double* x) {
    if (packed_distance_sq(q, x, dim_) <= r2) out.push_back(i);
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// kd-tree whose nodes carry the (max distance, min index) aggregate of the
// current distance-to-chosen-set, so an update only descends where a point
// can actually get closer.
class FpsTree {
 public:
  explicit FpsTree(const PointCloud& pts) : dim_(2 * pts.dim()), n_(pts.size()) {
    perm_.resize(n_);
    std::iota(perm_.begin(), perm_.end(), 0u);
    xy_.resize(n_ * dim_);
    build_from(pts);
    d2_.assign(n_, std::numeric_limits<double>::infinity());
    for (std::size_t i = nodes_.size(); i-- > 0;) refresh(static_cast<int>(i));
  }

  std::uint32_t best_index() const { return perm_[nodes_[0].best_pos]; }
  double best_d2() const { return nodes_[0].best_d2; }
  const double* point_of(std::uint32_t original) const { return xy_.data() + pos_of_[original] * dim_; }

  void add_center(const double* q) { update(0, q); }

 private:
  struct Node {
    std::uint32_t begin, end;
    int left = -1, right = -1;
    double best_d2 = 0.0;
    std::uint32_t best_pos = 0;
  };
  const double* lo(int id) const { return box_.data() + static_cast<std::size_t>(id) * 2 * dim_; }
  const double* hi(int id) const { return lo(id) + dim_; }

  void build_from(const PointCloud& pts) {
    std::vector<double> tmp(n_ * dim_);
    for (std::size_t i = 0; i < n_; ++i) std::copy(pts.raw(i), pts.raw(i) + dim_, tmp.data() + i * dim_);
    nodes_.reserve(2 * (n_ / kLeaf + 1));
    build(tmp, 0, static_cast<std::uint32_t>(n_));
    pos_of_.resize(n_);
    for (std::size_t p = 0; p < n_; ++p) {
      pos_of_[perm_[p]] = static_cast<std::uint32_t>(p);
      std::copy(tmp.data() + perm_[p] * dim_, tmp.data() + (perm_[p] + 1) * dim_, xy_.data() + p * dim_);
    }
  }

  int build(const std::vector<double>& src, std::uint32_t b, std::uint32_t e) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{b, e});
    box_.resize(nodes_.size() * 2 * dim_);
    std::vector<double> lo(dim_, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim_, -std::numeric_limits<double>::infinity());
    for (std::uint32_t p = b; p < e; ++p) {
      const double* x = src.data() + static_cast<std::size_t>(perm_[p]) * dim_;
      for (int k = 0; k < dim_; ++k) {
        lo[k] = std::min(lo[k], x[k]);
        hi[k] = std::max(hi[k], x[k]);
      }
    }
    if (e - b > kLeaf) {
      int axis = 0;
      for (int k = 1; k < dim_; ++k) {
        if (hi[k] - lo[k] > hi[axis] - lo[axis]) axis = k;
      }
      const std::uint32_t mid = b + (e - b) / 2;
      std::nth_element(perm_.begin() + b, perm_.begin() + mid, perm_.begin() + e, [&](std::uint32_t x, std::uint32_t y) {
        return src[static_cast<std::size_t>(x) * dim_ + axis] < src[static_cast<std::size_t>(y) * dim_ + axis];
      });
      const int l = build(src, b, mid);
      const int r = build(src, mid, e);
      nodes_[id].left = l;
      nodes_[id].right = r;
    }
    std::copy(lo.begin(), lo.end(), box_.begin() + static_cast<std::ptrdiff_t>(id) * 2 * dim_);
    std::copy(hi.begin(), hi.end(), box_.begin() + static_cast<std::ptrdiff_t>(id) * 2 * dim_ + dim_);
    return id;
  }

  // Larger distance wins; ties go to the lower original index.
  bool better(double d2a, std::uint32_t pa, double d2b, std::uint32_t pb) const {
    if (d2a != d2b) return d2a > d2b;
    return perm_[pa] < perm_[pb];
  }

  void refresh(int id) {
    Node& nd = nodes_[id];
    if (nd.left < 0) {
      nd.best_pos = nd.begin;
      nd.best_d2 = d2_[nd.begin];
      for (std::uint32_t p = nd.begin + 1; p < nd.end; ++p) {
        if (better(d2_[p], p, nd.best_d2, nd.best_pos)) {
          nd.best_d2 = d2_[p];
          nd.best_pos = p;
        }
      }
      return;
    }
    const Node& l = nodes_[nd.left];
    const Node& r = nodes_[nd.right];
    if (better(l.best_d2, l.best_pos, r.best_d2, r.best_pos)) {
      nd.best_d2 = l.best_d2;
      nd.best_pos = l.best_pos;
    } else {
      nd.best_d2 = r.best_d2;
      nd.best_pos = r.best_pos;
    }
  }

  double box_d2(int id, const double* q) const {
    const double* l = lo(id);
    const double* h = hi(id);
    double acc = 0.0;
    for (int k = 0; k < dim_; ++k) {
      double d = 0.0;
      if (q[k] < l[k]) {
        d = l[k] - q[k];
      } else if (q[k] > h[k]) {
        d = q[k] - h[k];
      }
      acc += d * d;
    }
    return acc;
  }

  void update(int id, const double* q) {
    Node& nd = nodes_[id];
    if (nd.best_d2 <= box_d2(id, q)) return;
    if (nd.left < 0) {
      for (std::uint32_t p = nd.begin; p < nd.end; ++p) {
        const double d = packed_distance_sq(q, xy_.data() + static_cast<std::size_t>(p) * dim_, dim_);
        double& cur = d2_[p];
        if (d < cur) cur = d;
      }
    } else {
      update(nd.left, q);
      update(nd.right, q);
    }
    refresh(id);
  }

  static constexpr std::uint32_t kLeaf = 16;
  int dim_;
  std::size_t n_;
  std::vector<std::uint32_t> perm_;
  std::vector<std::uint32_t> pos_of_;
  std::vector<double> xy_;
  std::vector<double> d2_;  // by tree position
  std::vector<Node> nodes_;
  std::vector<double> box_;
};

}  // namespace

std::vector<std::uint32_t> farthest_point_sampling(const PointCloud& pts, double threshold) {
  std::vector<std::uint32_t> chosen;
  if (pts.empty()) return chosen;
  FpsTree tree(pts);
  const double t2 = threshold * threshold;
  while (tree.best_d2() >= t2) {
    const std::uint32_t idx = tree.best_index();
    chosen.push_back(idx);
    tree.add_center(tree.point_of(idx));
    if (tree.best_d2() == 0.0 && t2 == 0.0) break;
  }
  return chosen;
}

}  // namespace peakembed
