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

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <memory>
#include <memory_resource>
#include <vector>

#include "staticcolor/ccl.hpp"
#include "staticcolor/classify.hpp"
#include "staticcolor/errors.hpp"
#include "staticcolor/legend.hpp"
#include "staticcolor/raster.hpp"
#include "staticcolor/streaming.hpp"
#include "staticcolor/superpixels.hpp"

namespace staticcolor {

/// Anonymous temporary file holding fixed-width rows of T, written in order
/// and read back by row range.
template <typename T>
class SpillFile {
 public:
  explicit SpillFile(std::size_t cols) : cols_(cols), file_(std::tmpfile(), &std::fclose) {
    if (!file_) throw IoError("cannot create a temporary spill file");
  }

  std::size_t rows() const noexcept { return rows_; }

  void append(const Grid<T>& strip) {
    if (strip.cols() != cols_) throw DimensionError("spill strip width differs");
    std::fseek(file_.get(), 0, SEEK_END);
    if (std::fwrite(strip.data(), sizeof(T), strip.size(), file_.get()) != strip.size()) {
      throw IoError("spill file write failed");
    }
    rows_ += strip.rows();
  }

  Grid<T> read(std::size_t first, std::size_t last, std::pmr::memory_resource* resource) {
    if (first > last || last > rows_) throw DimensionError("spill read beyond written rows");
    Grid<T> out(last - first, cols_, T{}, resource);
    std::fseek(file_.get(), static_cast<long>(first * cols_ * sizeof(T)), SEEK_SET);
    if (std::fread(out.data(), sizeof(T), out.size(), file_.get()) != out.size()) {
      throw IoError("spill file read failed");
    }
    return out;
  }

 private:
  std::size_t cols_;
  std::size_t rows_ = 0;
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> file_;
};

/// Per-pixel RMSE of `image` against its segment means, without building the
/// reconstruction. Gives the same values as rmse_map(image, reconstruct(...)).
inline RmseMap rmse_against_table(const MultiSpectralImage& image, const Grid<SegmentId>& ids,
                                  const std::vector<SuperpixelRecord>& table, SummaryStats stats,
                                  std::pmr::memory_resource* resource) {
  if (image.rows() != ids.rows() || image.cols() != ids.cols()) {
    throw DimensionError("segment ids vs image");
  }
  RmseMap out{Grid<double>(ids.rows(), ids.cols(), 0.0, resource),
              Mask(ids.rows(), ids.cols(), 0, resource), stats};
  const auto nb = static_cast<double>(image.band_count());
  for (std::size_t r = 0; r < ids.rows(); ++r) {
    for (std::size_t c = 0; c < ids.cols(); ++c) {
      const SegmentId id = ids(r, c);
      if (id == kNoSegment || !image.is_valid(r, c)) continue;
      const auto& rec = table.at(id - 1);
      double sum = 0.0;
      for (std::size_t b = 0; b < image.band_count(); ++b) {
        const double d = image.sample(b, r, c) - rec.mean(b);
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

struct StreamOptions {
  std::size_t strip_height = 64;
  Adjacency adjacency = Adjacency::Eight;       ///< for segments
  Adjacency aura_adjacency = Adjacency::Eight;  ///< for cross-aura and perimeter
  std::pmr::memory_resource* strip_resource = std::pmr::get_default_resource();
  std::pmr::memory_resource* table_resource = std::pmr::get_default_resource();
};

/// Receivers for strip outputs; each is optional. `first` is the absolute
/// row of the strip's first row. Reconstruction arrives one row at a time.
struct StreamSinks {
  std::function<void(std::size_t first, const Grid<Label>&)> labels;
  std::function<void(std::size_t first, const Grid<SegmentId>&)> segments;
  std::function<void(std::size_t first, const AuraMap&)> aura;
  std::function<void(std::size_t row, const MultiSpectralImage&)> reconstruction;
  std::function<void(std::size_t first, const RmseMap&)> rmse;
};

struct StreamResult {
  SegmentId segment_count = 0;
  std::vector<SuperpixelRecord> table;
  SummaryStats rmse;
  CclStats ccl;
  AuraStats aura;
  std::size_t provisional_segments = 0;
};

/// Strip-wise segmentation of the labels produced by `next_labels(first,
/// last, resource)`, which is called once per strip in order. With an image
/// source the superpixel table carries band sums and reconstruction and
/// RMSE are produced; `image` may be null. Outputs equal the whole-image
/// computation exactly. Three passes:
///   1. labels -> provisional ids (both spilled), seam merge
///   2. final ids, cross-aura over a one-row context window, superpixel sums
///   3. reconstruction and RMSE from the completed table
template <typename ImageSource, typename LabelFn>
StreamResult stream_segment(std::size_t rows, std::size_t cols, ImageSource* image,
                            LabelFn&& next_labels, const StreamOptions& options,
                            const StreamSinks& sinks = {}) {
  auto* res = options.strip_resource;
  SpillFile<Label> label_spill(cols);
  SpillFile<SegmentId> id_spill(cols);
  StripedConnectedComponents<Label> ccl(cols, kNoDataLabel, options.adjacency, res,
                                        options.table_resource);
  StreamResult result;

  {
    StripCursor cursor(rows, options.strip_height);
    while (auto s = cursor.next()) {
      const Grid<Label> labels = next_labels(s->first, s->last, res);
      if (labels.rows() != s->rows() || labels.cols() != cols) {
        throw DimensionError("label strip has the wrong shape");
      }
      if (sinks.labels) sinks.labels(s->first, labels);
      label_spill.append(labels);
      id_spill.append(ccl.label_strip(labels));
    }
  }
  result.segment_count = ccl.finish();
  result.provisional_segments = ccl.provisional_count();

  const std::size_t nbands = image ? image->bands().size() : 0;
  SuperpixelAccumulator acc(result.segment_count, nbands);
  {
    StripCursor cursor(rows, options.strip_height, 1);
    while (auto s = cursor.next()) {
      Grid<SegmentId> ids = id_spill.read(s->core_first, s->core_last, res);
      ccl.relabel(ids);
      const AuraMap aura = [&] {
        const Grid<Label> window = label_spill.read(s->first, s->last, res);
        return cross_aura_rows(window, s->core_offset(), s->core_offset() + s->core_rows(),
                               kNoDataLabel, options.aura_adjacency, &result.aura, res);
      }();
      const Grid<Label> core = label_spill.read(s->core_first, s->core_last, res);
      if (image) {
        const MultiSpectralImage strip = image->read_rows(s->core_first, s->core_last, res);
        acc.add_rows(s->core_first, ids, core, aura, &strip);
      } else {
        acc.add_rows(s->core_first, ids, core, aura, nullptr);
      }
      if (sinks.segments) sinks.segments(s->core_first, ids);
      if (sinks.aura) sinks.aura(s->core_first, aura);
    }
  }
  result.table = acc.finish();

  if (image) {
    StripCursor cursor(rows, options.strip_height);
    while (auto s = cursor.next()) {
      Grid<SegmentId> ids = id_spill.read(s->first, s->last, res);
      ccl.relabel(ids);
      const MultiSpectralImage strip = image->read_rows(s->first, s->last, res);
      if (sinks.reconstruction) {
        MultiSpectralImage row(1, cols, strip.bands(), res);
        row.set_storage({SampleType::Float64, false});
        for (std::size_t r = 0; r < ids.rows(); ++r) {
          Grid<SegmentId> one(1, cols, kNoSegment, res);
          std::copy_n(ids.row(r).data(), cols, one.data());
          reconstruct_rows(one, result.table, row);
          sinks.reconstruction(s->first + r, row);
        }
      }
      RmseMap rmse = rmse_against_table(strip, ids, result.table, result.rmse, res);
      result.rmse = rmse.stats;
      if (sinks.rmse) sinks.rmse(s->first, rmse);
    }
  }
  result.ccl = ccl.stats();
  return result;
}

/// Classifies strips of `image` with `rules` and segments the result.
template <typename ImageSource>
StreamResult stream_classify_segment(ImageSource& image, const RuleSet& rules,
                                     const StreamOptions& options, const StreamSinks& sinks = {},
                                     ClassifyStats* classify_stats = nullptr) {
  const BoundRules bound = bind_rules(rules, image.bands());
  ClassifyStats local;
  auto next = [&](std::size_t first, std::size_t last, std::pmr::memory_resource* res) {
    const MultiSpectralImage strip = image.read_rows(first, last, res);
    Grid<Label> labels(strip.rows(), strip.cols(), kNoDataLabel, res);
    classify_rows(strip, bound, 0, strip.rows(), labels, local);
    return labels;
  };
  StreamResult out = stream_segment(image.rows(), image.cols(), &image, next, options, sinks);
  if (classify_stats) *classify_stats = local;
  return out;
}

}  // namespace staticcolor
