/*
 * Copyright 2026 The staticcolor Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory_resource>
#include <string>
#include <vector>

#include "staticcolor/errors.hpp"
#include "staticcolor/grid.hpp"
#include "staticcolor/legend.hpp"

namespace staticcolor {

enum class Adjacency { Four = 4, Eight = 8 };

inline Adjacency parse_adjacency(int n) {
  if (n == 4) return Adjacency::Four;
  if (n == 8) return Adjacency::Eight;
  throw ConfigError("adjacency must be 4 or 8, got " + std::to_string(n));
}

using SegmentId = std::uint32_t;

/// Segment id reserved for nodata pixels.
inline constexpr SegmentId kNoSegment = 0;

/// Disjoint sets over dense ids 0..size-1. Unions keep the smaller root so
/// the structure is deterministic; finds use path halving.
class DisjointSets {
 public:
  using allocator_type = std::pmr::polymorphic_allocator<SegmentId>;

  explicit DisjointSets(allocator_type alloc = {}) : parent_(alloc) {}

  SegmentId make_set() {
    const auto id = static_cast<SegmentId>(parent_.size());
    parent_.push_back(id);
    return id;
  }

  SegmentId find(SegmentId x) noexcept {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  SegmentId unite(SegmentId a, SegmentId b) noexcept {
    ++unions_;
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return a;
  }

  std::size_t size() const noexcept { return parent_.size(); }
  std::size_t union_count() const noexcept { return unions_; }
  void clear() noexcept { parent_.clear(); }

 private:
  std::pmr::vector<SegmentId> parent_;
  std::size_t unions_ = 0;
};

/// Dense per-pixel segment ids (1..segment_count, 0 for nodata).
struct SegmentationMap {
  Grid<SegmentId> ids;
  SegmentId segment_count = 0;

  std::size_t rows() const noexcept { return ids.rows(); }
  std::size_t cols() const noexcept { return ids.cols(); }

  friend bool operator==(const SegmentationMap&, const SegmentationMap&) = default;
};

struct CclStats {
  std::size_t pixel_visits = 0;
  std::size_t unions = 0;
};

namespace detail {

// Already-visited neighbors of (r, c) in a row-major raster scan, as
// (row delta, col delta) pairs: W, NW, N, NE for 8-adjacency; W, N for 4.
inline constexpr int kPrior8[4][2] = {{0, -1}, {-1, -1}, {-1, 0}, {-1, 1}};
inline constexpr int kPrior4[2][2] = {{0, -1}, {-1, 0}};

template <typename Fn>
void for_each_prior(Adjacency adj, Fn&& fn) {
  if (adj == Adjacency::Eight) {
    for (const auto& d : kPrior8) fn(d[0], d[1]);
  } else {
    for (const auto& d : kPrior4) fn(d[0], d[1]);
  }
}

// Pass 1 over `labels`: provisional ids (1-based, into `sets` offset by one)
// written to `ids`; equivalences recorded in `sets`.
template <typename L>
void provisional_labels(const Grid<L>& labels, L nodata, Adjacency adj, Grid<SegmentId>& ids,
                        DisjointSets& sets, std::size_t& visits) {
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(labels.rows());
  const std::ptrdiff_t cols = static_cast<std::ptrdiff_t>(labels.cols());
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
      ++visits;
      const L here = labels(r, c);
      if (here == nodata) {
        ids(r, c) = kNoSegment;
        continue;
      }
      SegmentId assigned = kNoSegment;
      for_each_prior(adj, [&](int dr, int dc) {
        const std::ptrdiff_t nr = r + dr, nc = c + dc;
        if (nr < 0 || nc < 0 || nc >= cols) return;
        if (labels(nr, nc) != here) return;
        const SegmentId other = ids(nr, nc);
        if (assigned == kNoSegment) {
          assigned = other;
        } else if (other != assigned) {
          sets.unite(assigned - 1, other - 1);
        }
      });
      if (assigned == kNoSegment) assigned = sets.make_set() + 1;
      ids(r, c) = assigned;
    }
  }
}

}  // namespace detail

/// Two-pass connected-component labeling. Pass 1 assigns provisional ids
/// and records equivalences in a union-find; pass 2 rewrites each pixel
/// with a dense id given in row-major order of first appearance.
/// Pixels equal to `nodata` get kNoSegment and join no segment.
template <typename L>
SegmentationMap connected_components(const Grid<L>& labels, L nodata, Adjacency adj,
                                     CclStats* stats = nullptr) {
  SegmentationMap out{Grid<SegmentId>(labels.rows(), labels.cols(), kNoSegment), 0};
  DisjointSets sets;
  std::size_t visits = 0;
  detail::provisional_labels(labels, nodata, adj, out.ids, sets, visits);

  std::vector<SegmentId> dense(sets.size(), kNoSegment);
  for (auto& id : out.ids.values()) {
    ++visits;
    if (id == kNoSegment) continue;
    SegmentId& d = dense[sets.find(id - 1)];
    if (d == kNoSegment) d = ++out.segment_count;
    id = d;
  }
  if (stats) {
    stats->pixel_visits += visits;
    stats->unions += sets.union_count();
  }
  return out;
}

inline SegmentationMap connected_components(const CategoricalMap& map,
                                            Adjacency adj = Adjacency::Eight,
                                            CclStats* stats = nullptr) {
  return connected_components<Label>(map.labels, kNoDataLabel, adj, stats);
}

/// Connected-component labeling over an image delivered as consecutive row
/// strips, holding only one strip plus one seam row at a time.
///
/// Pass 1: label_strip() labels each strip locally, gives every local
/// component a global provisional id and unites ids across the seam with the
/// previous strip's last row. The caller keeps the returned provisional
/// strips (e.g. spilled to disk). Pass 2: relabel() each provisional strip,
/// in the same order, into dense final ids. The result equals
/// connected_components() on the whole image, id for id.
///
/// Strip buffers come from `strip_resource`; the global equivalence table
/// (one entry per strip-local component) comes from `table_resource`.
template <typename L>
class StripedConnectedComponents {
 public:
  StripedConnectedComponents(std::size_t cols, L nodata, Adjacency adj,
                             std::pmr::memory_resource* strip_resource =
                                 std::pmr::get_default_resource(),
                             std::pmr::memory_resource* table_resource =
                                 std::pmr::get_default_resource())
      : cols_(cols),
        nodata_(nodata),
        adj_(adj),
        strip_resource_(strip_resource),
        global_(table_resource),
        dense_(table_resource),
        seam_labels_(strip_resource),
        seam_ids_(strip_resource) {}

  Grid<SegmentId> label_strip(const Grid<L>& rows) {
    if (rows.cols() != cols_) throw DimensionError("strip width differs from image width");
    if (finished_) throw ConfigError("label_strip() after finish()");
    Grid<SegmentId> ids(rows.rows(), cols_, kNoSegment, strip_resource_);
    DisjointSets local(strip_resource_);
    detail::provisional_labels(rows, nodata_, adj_, ids, local, stats_.pixel_visits);
    stats_.unions += local.union_count();

    // One global id per local root.
    std::pmr::vector<SegmentId> to_global(local.size(), kNoSegment, strip_resource_);
    for (SegmentId i = 0; i < local.size(); ++i) {
      const SegmentId root = local.find(i);
      if (to_global[root] == kNoSegment) to_global[root] = global_.make_set() + 1;
      to_global[i] = to_global[root];
    }
    for (auto& id : ids.values()) {
      if (id != kNoSegment) id = to_global[id - 1];
    }

    // Seam: first row of this strip against the last row of the previous one.
    if (!seam_labels_.empty() && rows.rows() > 0) {
      for (std::size_t c = 0; c < cols_; ++c) {
        const L here = rows(0, c);
        if (here == nodata_) continue;
        detail::for_each_prior(adj_, [&](int dr, int dc) {
          if (dr == 0) return;
          const std::ptrdiff_t nc = static_cast<std::ptrdiff_t>(c) + dc;
          if (nc < 0 || nc >= static_cast<std::ptrdiff_t>(cols_)) return;
          if (seam_labels_[nc] != here) return;
          global_.unite(ids(0, c) - 1, seam_ids_[nc] - 1);
        });
      }
    }
    if (rows.rows() > 0) {
      const auto last = rows.rows() - 1;
      seam_labels_.assign(rows.row(last).begin(), rows.row(last).end());
      seam_ids_.assign(ids.row(last).begin(), ids.row(last).end());
    }
    return ids;
  }

  /// Ends pass 1. Returns the number of final segments.
  SegmentId finish() {
    finished_ = true;
    segment_count_ = 0;
    for (SegmentId i = 0; i < global_.size(); ++i) {
      if (global_.find(i) == i) ++segment_count_;
    }
    dense_.assign(global_.size(), kNoSegment);
    seam_labels_.clear();
    seam_ids_.clear();
    return segment_count_;
  }

  /// Pass 2, in place. Strips must arrive in the same order as in pass 1.
  void relabel(Grid<SegmentId>& provisional) {
    if (!finished_) throw ConfigError("relabel() before finish()");
    for (auto& id : provisional.values()) {
      ++stats_.pixel_visits;
      if (id == kNoSegment) continue;
      SegmentId& d = dense_[global_.find(id - 1)];
      if (d == kNoSegment) d = ++next_dense_;
      id = d;
    }
  }

  SegmentId segment_count() const noexcept { return segment_count_; }
  std::size_t provisional_count() const noexcept { return global_.size(); }
  CclStats stats() const noexcept {
    CclStats s = stats_;
    s.unions += global_.union_count();
    return s;
  }

 private:
  std::size_t cols_;
  L nodata_;
  Adjacency adj_;
  std::pmr::memory_resource* strip_resource_;
  DisjointSets global_;
  std::pmr::vector<SegmentId> dense_;
  std::pmr::vector<L> seam_labels_;
  std::pmr::vector<SegmentId> seam_ids_;
  bool finished_ = false;
  SegmentId segment_count_ = 0;
  SegmentId next_dense_ = 0;
  CclStats stats_;
};

}  // namespace staticcolor
