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
#include <cstddef>
#include <memory_resource>
#include <optional>
#include <utility>
#include <vector>

#include "staticcolor/errors.hpp"
#include "staticcolor/raster.hpp"

namespace staticcolor {

/// Row range of one strip. `first`/`last` bound the rows that are loaded
/// (core plus context); `core_first`/`core_last` bound the rows the strip
/// owns. All values are absolute image rows.
struct StripBounds {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t core_first = 0;
  std::size_t core_last = 0;

  std::size_t rows() const noexcept { return last - first; }
  std::size_t core_rows() const noexcept { return core_last - core_first; }
  /// Local index (within the loaded rows) of the first core row.
  std::size_t core_offset() const noexcept { return core_first - first; }

  friend bool operator==(const StripBounds&, const StripBounds&) = default;
};

/// Walks an image of `height` rows in strips of `strip_height` core rows,
/// each widened by up to `overlap` context rows above and below.
class StripCursor {
 public:
  StripCursor(std::size_t height, std::size_t strip_height, std::size_t overlap = 0)
      : height_(height), strip_height_(strip_height), overlap_(overlap) {
    if (strip_height_ == 0) throw ConfigError("strip height must be at least 1");
  }

  std::size_t strip_height() const noexcept { return strip_height_; }
  std::size_t overlap() const noexcept { return overlap_; }
  std::size_t current_row() const noexcept { return current_row_; }

  std::optional<StripBounds> next() noexcept {
    if (current_row_ >= height_) return std::nullopt;
    StripBounds s;
    s.core_first = current_row_;
    s.core_last = std::min(height_, current_row_ + strip_height_);
    s.first = s.core_first - std::min(s.core_first, overlap_);
    s.last = std::min(height_, s.core_last + overlap_);
    current_row_ = s.core_last;
    return s;
  }

 private:
  std::size_t height_;
  std::size_t strip_height_;
  std::size_t overlap_;
  std::size_t current_row_ = 0;
};

/// A loaded strip: rows [bounds.first, bounds.last) of the source image.
struct ImageStrip {
  StripBounds bounds;
  MultiSpectralImage image;
};

/// Row-strip view over an image already in memory.
class MemoryImageSource {
 public:
  explicit MemoryImageSource(const MultiSpectralImage& image) : image_(&image) {}

  std::size_t rows() const noexcept { return image_->rows(); }
  std::size_t cols() const noexcept { return image_->cols(); }
  const std::vector<BandMetadata>& bands() const noexcept { return image_->bands(); }

  MultiSpectralImage read_rows(std::size_t first, std::size_t last,
                               std::pmr::memory_resource* resource =
                                   std::pmr::get_default_resource()) const {
    MultiSpectralImage out(last - first, cols(), image_->bands(), resource);
    for (std::size_t b = 0; b < image_->band_count(); ++b) {
      for (std::size_t r = first; r < last; ++r) {
        std::copy_n(image_->plane(b).row(r).data(), cols(), out.plane(b).row(r - first).data());
      }
    }
    for (std::size_t r = first; r < last; ++r) {
      std::copy_n(image_->valid().row(r).data(), cols(), out.valid().row(r - first).data());
    }
    out.set_storage(image_->storage());
    return out;
  }

 private:
  const MultiSpectralImage* image_;
};

/// Calls `fn(ImageStrip&&)` for every strip of `source`. Only one strip is
/// alive at a time, so working memory is bounded by the strip footprint.
/// `Source` needs rows() and read_rows(first, last, resource).
template <typename Source, typename Fn>
void stream_strips(Source& source, std::size_t strip_height, std::size_t overlap, Fn&& fn,
                   std::pmr::memory_resource* resource = std::pmr::get_default_resource()) {
  StripCursor cursor(source.rows(), strip_height, overlap);
  while (auto bounds = cursor.next()) {
    fn(ImageStrip{*bounds, source.read_rows(bounds->first, bounds->last, resource)});
  }
}

}  // namespace staticcolor
