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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "staticcolor/errors.hpp"
#include "staticcolor/grid.hpp"

namespace staticcolor {

using Plane = Grid<double>;
using Mask = Grid<std::uint8_t>;

enum class SampleType { UInt8, UInt16, Int16, UInt32, Int32, Float32, Float64 };

constexpr std::size_t sample_size(SampleType type) noexcept {
  switch (type) {
    case SampleType::UInt8: return 1;
    case SampleType::UInt16:
    case SampleType::Int16: return 2;
    case SampleType::UInt32:
    case SampleType::Int32:
    case SampleType::Float32: return 4;
    case SampleType::Float64: return 8;
  }
  return 0;
}

constexpr bool is_integral(SampleType type) noexcept {
  return type != SampleType::Float32 && type != SampleType::Float64;
}

constexpr std::string_view to_string(SampleType type) noexcept {
  switch (type) {
    case SampleType::UInt8: return "uint8";
    case SampleType::UInt16: return "uint16";
    case SampleType::Int16: return "int16";
    case SampleType::UInt32: return "uint32";
    case SampleType::Int32: return "int32";
    case SampleType::Float32: return "float32";
    case SampleType::Float64: return "float64";
  }
  return "?";
}

inline SampleType parse_sample_type(std::string_view name) {
  for (auto type : {SampleType::UInt8, SampleType::UInt16, SampleType::Int16,
                    SampleType::UInt32, SampleType::Int32, SampleType::Float32,
                    SampleType::Float64}) {
    if (to_string(type) == name) return type;
  }
  throw FormatError("unknown sample type '" + std::string(name) + "'");
}

/// Per-band radiometric metadata. Wavelengths are in micrometers.
struct BandMetadata {
  int band_id = 0;
  double center_wavelength = 0.0;
  double gain = 1.0;
  double offset = 0.0;
  std::optional<double> nodata;

  void validate() const {
    if (!(center_wavelength > 0.0)) {
      throw ConfigError("band " + std::to_string(band_id) +
                        ": center wavelength must be positive");
    }
    if (gain == 0.0 || !std::isfinite(gain)) {
      throw ConfigError("band " + std::to_string(band_id) + ": gain must be finite and non-zero");
    }
    if (!std::isfinite(offset)) {
      throw ConfigError("band " + std::to_string(band_id) + ": offset must be finite");
    }
  }

  friend bool operator==(const BandMetadata&, const BandMetadata&) = default;
};

struct CalibratedPlane {
  Plane values;
  Mask valid;
  std::size_t clamped = 0;  ///< samples pulled back into [0,1]
};

/// Converts raw digital numbers into reflectance: raw * gain + offset,
/// clamped to [0,1]. Samples equal to the band's nodata value are marked
/// invalid and set to zero.
inline CalibratedPlane apply_calibration(const Plane& raw, const BandMetadata& meta,
                                         std::pmr::memory_resource* resource =
                                             std::pmr::get_default_resource()) {
  if (meta.gain == 0.0) {
    throw ConfigError("band " + std::to_string(meta.band_id) + ": gain must be non-zero");
  }
  CalibratedPlane out{Plane(raw.rows(), raw.cols(), 0.0, resource),
                      Mask(raw.rows(), raw.cols(), 1, resource), 0};
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    for (std::size_t c = 0; c < raw.cols(); ++c) {
      const double dn = raw(r, c);
      if (!std::isfinite(dn)) {
        throw DataError("band " + std::to_string(meta.band_id) + ": non-finite raw value at row " +
                        std::to_string(r) + ", column " + std::to_string(c));
      }
      if (meta.nodata && dn == *meta.nodata) {
        out.valid(r, c) = 0;
        continue;
      }
      double v = dn * meta.gain + meta.offset;
      if (v < 0.0 || v > 1.0) {
        v = std::clamp(v, 0.0, 1.0);
        ++out.clamped;
      }
      out.values(r, c) = v;
    }
  }
  return out;
}

/// How an image is encoded on disk; carried along so a read image can be
/// written back with the same encoding.
struct StorageInfo {
  SampleType sample_type = SampleType::Float64;
  bool apply_calibration = false;

  friend bool operator==(const StorageInfo&, const StorageInfo&) = default;
};

/// Band-sequential multispectral image of reflectance samples plus a
/// per-pixel validity mask shared by all bands.
class MultiSpectralImage {
 public:
  using allocator_type = std::pmr::polymorphic_allocator<std::byte>;

  MultiSpectralImage() = default;

  MultiSpectralImage(std::size_t rows, std::size_t cols, std::vector<BandMetadata> bands,
                     allocator_type alloc = {})
      : rows_(rows), cols_(cols), bands_(std::move(bands)), valid_(rows, cols, 1, alloc) {
    if (bands_.empty()) throw ConfigError("image needs at least one band");
    for (const auto& band : bands_) band.validate();
    planes_.reserve(bands_.size());
    for (std::size_t b = 0; b < bands_.size(); ++b) planes_.emplace_back(rows, cols, 0.0, alloc);
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t pixel_count() const noexcept { return rows_ * cols_; }
  std::size_t band_count() const noexcept { return bands_.size(); }

  const std::vector<BandMetadata>& bands() const noexcept { return bands_; }
  const BandMetadata& band(std::size_t b) const { return bands_.at(b); }

  Plane& plane(std::size_t b) { return planes_.at(b); }
  const Plane& plane(std::size_t b) const { return planes_.at(b); }

  Mask& valid() noexcept { return valid_; }
  const Mask& valid() const noexcept { return valid_; }
  bool is_valid(std::size_t r, std::size_t c) const noexcept { return valid_(r, c) != 0; }

  double sample(std::size_t b, std::size_t r, std::size_t c) const noexcept {
    return planes_[b](r, c);
  }

  std::optional<std::size_t> find_band(int band_id) const noexcept {
    for (std::size_t b = 0; b < bands_.size(); ++b) {
      if (bands_[b].band_id == band_id) return b;
    }
    return std::nullopt;
  }

  std::size_t valid_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(valid_.values().begin(), valid_.values().end(),
                                                  [](std::uint8_t v) { return v != 0; }));
  }

  /// Installs a calibrated plane; its invalid pixels become invalid image-wide.
  void assign(std::size_t b, CalibratedPlane&& calibrated) {
    require_same_shape(calibrated.values, valid_, "calibrated plane");
    planes_.at(b) = std::move(calibrated.values);
    for (std::size_t i = 0; i < valid_.size(); ++i) {
      valid_.values()[i] &= calibrated.valid.values()[i];
    }
    clamped_ += calibrated.clamped;
  }

  std::size_t clamped_count() const noexcept { return clamped_; }

  const StorageInfo& storage() const noexcept { return storage_; }
  void set_storage(StorageInfo storage) noexcept { storage_ = storage; }

  bool same_shape(const MultiSpectralImage& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const MultiSpectralImage& a, const MultiSpectralImage& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.bands_ == b.bands_ &&
           a.planes_ == b.planes_ && a.valid_ == b.valid_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BandMetadata> bands_;
  std::vector<Plane> planes_;
  Mask valid_;
  std::size_t clamped_ = 0;
  StorageInfo storage_;
};

}  // namespace staticcolor
