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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory_resource>
#include <numbers>
#include <vector>

#include "staticcolor/ccl.hpp"
#include "staticcolor/errors.hpp"
#include "staticcolor/grid.hpp"
#include "staticcolor/legend.hpp"
#include "staticcolor/parallel.hpp"
#include "staticcolor/raster.hpp"

namespace staticcolor {

using AuraMap = Grid<std::uint8_t>;

struct AuraStats {
  std::size_t neighbor_visits = 0;
};

/// Cross-aura counts for rows [first, last) of `window`: for each pixel, the
/// number of neighbors (under `adj`) inside the window whose label differs.
/// Rows outside [first, last) serve only as context, so a strip loaded with
/// one row of overlap gives the same counts as the whole image. Nodata
/// pixels count 0 and never count as a differing neighbor.
template <typename L>
AuraMap cross_aura_rows(const Grid<L>& window, std::size_t first, std::size_t last, L nodata,
                        Adjacency adj, AuraStats* stats = nullptr,
                        std::pmr::memory_resource* resource = std::pmr::get_default_resource()) {
  static constexpr int k8[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                   {0, 1},   {1, -1}, {1, 0},  {1, 1}};
  static constexpr int k4[4][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
  const auto* offsets = adj == Adjacency::Eight ? k8 : k4;
  const int n = static_cast<int>(adj);
  const auto rows = static_cast<std::ptrdiff_t>(window.rows());
  const auto cols = static_cast<std::ptrdiff_t>(window.cols());
  AuraMap out(last - first, window.cols(), 0, resource);
  std::size_t visits = 0;
  for (std::size_t r = first; r < last; ++r) {
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
      const L here = window(r, c);
      if (here == nodata) continue;
      std::uint8_t count = 0;
      for (int k = 0; k < n; ++k) {
        ++visits;
        const std::ptrdiff_t nr = static_cast<std::ptrdiff_t>(r) + offsets[k][0];
        const std::ptrdiff_t nc = c + offsets[k][1];
        if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
        const L other = window(nr, nc);
        if (other != nodata && other != here) ++count;
      }
      out(r - first, c) = count;
    }
  }
  if (stats) stats->neighbor_visits += visits;
  return out;
}

template <typename L>
AuraMap cross_aura(const Grid<L>& labels, L nodata, Adjacency adj, AuraStats* stats = nullptr,
                   std::size_t workers = 1) {
  if (workers <= 1) return cross_aura_rows(labels, 0, labels.rows(), nodata, adj, stats);
  AuraMap out(labels.rows(), labels.cols(), 0);
  std::vector<AuraStats> per_worker(workers);
  for_each_row_block(labels.rows(), workers, [&](std::size_t w, std::size_t first, std::size_t last) {
    const AuraMap part = cross_aura_rows(labels, first, last, nodata, adj, &per_worker[w]);
    std::copy(part.values().begin(), part.values().end(), out.row(first).data());
  });
  if (stats) {
    for (const auto& s : per_worker) stats->neighbor_visits += s.neighbor_visits;
  }
  return out;
}

inline AuraMap cross_aura(const CategoricalMap& map, Adjacency adj = Adjacency::Eight,
                          AuraStats* stats = nullptr, std::size_t workers = 1) {
  return cross_aura<Label>(map.labels, kNoDataLabel, adj, stats, workers);
}

/// One row of the superpixel description table.
struct SuperpixelRecord {
  SegmentId segment_id = 0;
  Label label = 0;  ///< the segment's class label (its stratum)
  std::size_t pixel_count = 0;
  std::size_t min_row = 0, min_col = 0, max_row = 0, max_col = 0;
  std::vector<double> band_sums;
  std::uint64_t perimeter = 0;  ///< sum of cross-aura counts over member pixels
  double compactness = 1.0;

  double mean(std::size_t band) const { return band_sums.at(band) / static_cast<double>(pixel_count); }

  friend bool operator==(const SuperpixelRecord&, const SuperpixelRecord&) = default;
};

/// Isoperimetric quotient 4*pi*A / P^2 clamped to (0, 1]; 1 when P == 0.
inline double compactness(std::size_t area, std::uint64_t perimeter) {
  if (perimeter == 0) return 1.0;
  const double p = static_cast<double>(perimeter);
  return std::min(1.0, 4.0 * std::numbers::pi * static_cast<double>(area) / (p * p));
}

/// Accumulates the superpixel table from row blocks delivered in order.
class SuperpixelAccumulator {
 public:
  SuperpixelAccumulator(SegmentId segment_count, std::size_t band_count)
      : records_(segment_count), band_count_(band_count) {
    for (SegmentId i = 0; i < segment_count; ++i) {
      records_[i].segment_id = i + 1;
      records_[i].band_sums.assign(band_count, 0.0);
      records_[i].min_row = records_[i].min_col = std::numeric_limits<std::size_t>::max();
    }
  }

  /// All grids hold the same rows; `first_row` is their absolute row.
  /// `image` may be null when no band sums are wanted.
  void add_rows(std::size_t first_row, const Grid<SegmentId>& seg, const Grid<Label>& labels,
                const AuraMap& aura, const MultiSpectralImage* image) {
    require_same_shape(seg, labels, "segment ids vs labels");
    require_same_shape(seg, aura, "segment ids vs cross-aura");
    if (image && (image->rows() != seg.rows() || image->cols() != seg.cols())) {
      throw DimensionError("segment ids vs image");
    }
    if (image && image->band_count() != band_count_) throw DimensionError("band count changed");
    for (std::size_t r = 0; r < seg.rows(); ++r) {
      for (std::size_t c = 0; c < seg.cols(); ++c) {
        const SegmentId id = seg(r, c);
        if (id == kNoSegment) continue;
        if (id > records_.size()) throw DimensionError("segment id beyond segment count");
        auto& rec = records_[id - 1];
        const std::size_t ar = first_row + r;
        if (rec.pixel_count == 0) {
          rec.label = labels(r, c);
        } else if (rec.label != labels(r, c)) {
          throw DataError("segment " + std::to_string(id) + " is not label-homogeneous");
        }
        ++rec.pixel_count;
        rec.min_row = std::min(rec.min_row, ar);
        rec.max_row = std::max(rec.max_row, ar);
        rec.min_col = std::min(rec.min_col, c);
        rec.max_col = std::max(rec.max_col, c);
        rec.perimeter += aura(r, c);
        if (image) {
          for (std::size_t b = 0; b < band_count_; ++b) rec.band_sums[b] += image->sample(b, r, c);
        }
      }
    }
  }

  std::vector<SuperpixelRecord> finish() {
    for (auto& rec : records_) {
      if (rec.pixel_count == 0) {
        throw DataError("segment " + std::to_string(rec.segment_id) + " has no pixels");
      }
      rec.compactness = compactness(rec.pixel_count, rec.perimeter);
    }
    return std::move(records_);
  }

 private:
  std::vector<SuperpixelRecord> records_;
  std::size_t band_count_;
};

/// One record per segment: class label, area, bounding box, per-band sums,
/// perimeter (sum of cross-aura) and compactness.
inline std::vector<SuperpixelRecord> build_superpixel_table(const CategoricalMap& map,
                                                            const SegmentationMap& seg,
                                                            const MultiSpectralImage& image,
                                                            const AuraMap& aura) {
  require_same_shape(map.labels, seg.ids, "map vs segmentation");
  if (image.rows() != map.rows() || image.cols() != map.cols()) {
    throw DimensionError("map vs image dimensions");
  }
  SuperpixelAccumulator acc(seg.segment_count, image.band_count());
  acc.add_rows(0, seg.ids, map.labels, aura, &image);
  return acc.finish();
}

/// Writes per-segment band means into rows of `out` (same rows as `seg`).
/// Pixels without a segment are invalid in the output.
inline void reconstruct_rows(const Grid<SegmentId>& seg,
                             const std::vector<SuperpixelRecord>& table,
                             MultiSpectralImage& out) {
  for (std::size_t r = 0; r < seg.rows(); ++r) {
    for (std::size_t c = 0; c < seg.cols(); ++c) {
      const SegmentId id = seg(r, c);
      if (id == kNoSegment) {
        out.valid()(r, c) = 0;
        for (std::size_t b = 0; b < out.band_count(); ++b) out.plane(b)(r, c) = 0.0;
        continue;
      }
      if (id > table.size()) throw DimensionError("segment id beyond the superpixel table");
      const auto& rec = table[id - 1];
      out.valid()(r, c) = 1;
      for (std::size_t b = 0; b < out.band_count(); ++b) out.plane(b)(r, c) = rec.mean(b);
    }
  }
}

/// Superpixelwise-constant approximation: each pixel takes its segment's
/// band means.
inline MultiSpectralImage reconstruct(const SegmentationMap& seg,
                                      const std::vector<SuperpixelRecord>& table,
                                      const MultiSpectralImage& image) {
  if (image.rows() != seg.rows() || image.cols() != seg.cols()) {
    throw DimensionError("segmentation vs image dimensions");
  }
  if (table.size() != seg.segment_count) throw DimensionError("table size vs segment count");
  MultiSpectralImage out(image.rows(), image.cols(), image.bands());
  out.set_storage({SampleType::Float64, false});
  reconstruct_rows(seg.ids, table, out);
  return out;
}

/// Running min/max/mean/population standard deviation (Welford).
class SummaryStats {
 public:
  void add(double v) noexcept {
    ++n_;
    min_ = std::min(min_, v);
    max_ = std::max(max_, v);
    const double delta = v - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (v - mean_);
  }

  std::size_t count() const noexcept { return n_; }
  double min() const noexcept { return n_ ? min_ : 0.0; }
  double max() const noexcept { return n_ ? max_ : 0.0; }
  double mean() const noexcept { return n_ ? mean_ : 0.0; }
  double stdev() const noexcept { return n_ ? std::sqrt(m2_ / static_cast<double>(n_)) : 0.0; }

 private:
  std::size_t n_ = 0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct RmseMap {
  Grid<double> values;
  Mask valid;
  SummaryStats stats;  ///< over valid pixels only
};

/// Per-pixel RMSE over bands between two images, accumulated into `stats`.
/// Pixels invalid in either input are 0 and excluded.
inline RmseMap rmse_rows(const MultiSpectralImage& original, const MultiSpectralImage& approx,
                         SummaryStats stats = {},
                         std::pmr::memory_resource* resource = std::pmr::get_default_resource()) {
  if (!original.same_shape(approx)) throw DimensionError("rmse: image dimensions differ");
  if (original.band_count() != approx.band_count()) throw DimensionError("rmse: band counts differ");
  RmseMap out{Grid<double>(original.rows(), original.cols(), 0.0, resource),
              Mask(original.rows(), original.cols(), 0, resource), stats};
  const auto nb = static_cast<double>(original.band_count());
  for (std::size_t r = 0; r < original.rows(); ++r) {
    for (std::size_t c = 0; c < original.cols(); ++c) {
      if (!original.is_valid(r, c) || !approx.is_valid(r, c)) continue;
      double sum = 0.0;
      for (std::size_t b = 0; b < original.band_count(); ++b) {
        const double d = original.sample(b, r, c) - approx.sample(b, r, c);
        sum += d * d;
      }
      const double v = std::sqrt(sum / nb);
      out.values(r, c) = v;
      out.valid(r, c) = 1;
      out.stats.add(v);
    }
  }
  return out;
}

inline RmseMap rmse_map(const MultiSpectralImage& original, const MultiSpectralImage& approx) {
  return rmse_rows(original, approx);
}

}  // namespace staticcolor
