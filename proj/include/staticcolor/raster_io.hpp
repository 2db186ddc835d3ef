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
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory_resource>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "staticcolor/errors.hpp"
#include "staticcolor/grid.hpp"
#include "staticcolor/header.hpp"
#include "staticcolor/legend.hpp"
#include "staticcolor/raster.hpp"

namespace staticcolor::io {

namespace fs = std::filesystem;

template <typename T>
constexpr SampleType sample_type_of() {
  if constexpr (std::is_same_v<T, std::uint8_t>) return SampleType::UInt8;
  else if constexpr (std::is_same_v<T, std::uint16_t>) return SampleType::UInt16;
  else if constexpr (std::is_same_v<T, std::int16_t>) return SampleType::Int16;
  else if constexpr (std::is_same_v<T, std::uint32_t>) return SampleType::UInt32;
  else if constexpr (std::is_same_v<T, std::int32_t>) return SampleType::Int32;
  else if constexpr (std::is_same_v<T, float>) return SampleType::Float32;
  else {
    static_assert(std::is_same_v<T, double>, "unsupported sample type");
    return SampleType::Float64;
  }
}

namespace detail {

template <typename T>
T load_le(const char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto* bytes = reinterpret_cast<unsigned char*>(&value);
    std::reverse(bytes, bytes + sizeof(T));
  }
  return value;
}

template <typename T>
void store_le(char* p, T value) {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto* bytes = reinterpret_cast<unsigned char*>(&value);
    std::reverse(bytes, bytes + sizeof(T));
  }
  std::memcpy(p, &value, sizeof(T));
}

template <typename T>
void decode_as(const char* bytes, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(load_le<T>(bytes + i * sizeof(T)));
}

template <typename T>
void encode_as(const double* values, std::size_t n, char* bytes) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = values[i];
    if constexpr (std::is_integral_v<T>) {
      v = std::nearbyint(v);
      if (!(v >= static_cast<double>(std::numeric_limits<T>::min()) &&
            v <= static_cast<double>(std::numeric_limits<T>::max()))) {
        throw DataError("value " + format_number(values[i]) + " does not fit the sample type");
      }
    }
    store_le<T>(bytes + i * sizeof(T), static_cast<T>(v));
  }
}

}  // namespace detail

inline void decode_samples(SampleType type, const char* bytes, std::size_t n, double* out) {
  switch (type) {
    case SampleType::UInt8: return detail::decode_as<std::uint8_t>(bytes, n, out);
    case SampleType::UInt16: return detail::decode_as<std::uint16_t>(bytes, n, out);
    case SampleType::Int16: return detail::decode_as<std::int16_t>(bytes, n, out);
    case SampleType::UInt32: return detail::decode_as<std::uint32_t>(bytes, n, out);
    case SampleType::Int32: return detail::decode_as<std::int32_t>(bytes, n, out);
    case SampleType::Float32: return detail::decode_as<float>(bytes, n, out);
    case SampleType::Float64: return detail::decode_as<double>(bytes, n, out);
  }
}

/// Integer types round to nearest and must fit; out-of-range is a DataError.
inline void encode_samples(SampleType type, const double* values, std::size_t n, char* bytes) {
  switch (type) {
    case SampleType::UInt8: return detail::encode_as<std::uint8_t>(values, n, bytes);
    case SampleType::UInt16: return detail::encode_as<std::uint16_t>(values, n, bytes);
    case SampleType::Int16: return detail::encode_as<std::int16_t>(values, n, bytes);
    case SampleType::UInt32: return detail::encode_as<std::uint32_t>(values, n, bytes);
    case SampleType::Int32: return detail::encode_as<std::int32_t>(values, n, bytes);
    case SampleType::Float32: return detail::encode_as<float>(values, n, bytes);
    case SampleType::Float64: return detail::encode_as<double>(values, n, bytes);
  }
}

/// Payload lives next to the header: `data_file` key if present, else the
/// header's stem with a `.raw` extension.
inline fs::path payload_path(const fs::path& header_path, const Header& header) {
  if (auto name = header.find("data_file")) return header_path.parent_path() / *name;
  fs::path p = header_path;
  p.replace_extension(".raw");
  return p;
}

struct RasterLayout {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t bands = 0;
  SampleType type = SampleType::Float64;

  std::size_t plane_bytes() const noexcept { return rows * cols * sample_size(type); }
  std::size_t payload_bytes() const noexcept { return plane_bytes() * bands; }
};

inline RasterLayout layout_of(const Header& header) {
  RasterLayout layout;
  layout.cols = header.count("width");
  layout.rows = header.count("height");
  layout.bands = header.count("bands");
  layout.type = parse_sample_type(header.at("dtype"));
  if (auto interleave = header.find("interleave"); interleave && *interleave != "bsq") {
    throw FormatError("unsupported interleave '" + *interleave + "' (only bsq)");
  }
  if (auto order = header.find("byte_order"); order && *order != "little") {
    throw FormatError("unsupported byte order '" + *order + "'");
  }
  if (layout.rows == 0 || layout.cols == 0) throw FormatError("raster has zero extent");
  if (layout.bands == 0) throw FormatError("raster has zero bands");
  return layout;
}

inline Header base_header(std::size_t rows, std::size_t cols, std::size_t bands, SampleType type) {
  Header header;
  header.set("width", cols);
  header.set("height", rows);
  header.set("bands", bands);
  header.set("dtype", std::string(to_string(type)));
  header.set("interleave", "bsq");
  header.set("byte_order", "little");
  return header;
}

/// Random row access into a band-sequential payload on disk.
class RasterFileReader {
 public:
  explicit RasterFileReader(const fs::path& header_path)
      : header_(Header::load(header_path)), layout_(layout_of(header_)) {
    const fs::path data = payload_path(header_path, header_);
    std::error_code ec;
    const auto size = fs::file_size(data, ec);
    if (ec) throw IoError("cannot stat payload " + data.string());
    if (size != layout_.payload_bytes()) {
      throw TruncatedFileError(data.string() + ": payload is " + std::to_string(size) +
                               " bytes, header implies " +
                               std::to_string(layout_.payload_bytes()));
    }
    in_.open(data, std::ios::binary);
    if (!in_) throw IoError("cannot open payload " + data.string());
  }

  const Header& header() const noexcept { return header_; }
  const RasterLayout& layout() const noexcept { return layout_; }

  /// Decodes rows [first, last) of one band into `out` (row-major).
  void read_rows(std::size_t band, std::size_t first, std::size_t last, double* out) {
    const std::size_t n = (last - first) * layout_.cols;
    const std::size_t ss = sample_size(layout_.type);
    buffer_.resize(n * ss);
    const auto offset = band * layout_.plane_bytes() + first * layout_.cols * ss;
    in_.seekg(static_cast<std::streamoff>(offset));
    in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (!in_) throw TruncatedFileError("short read from raster payload");
    decode_samples(layout_.type, buffer_.data(), n, out);
  }

 private:
  Header header_;
  RasterLayout layout_;
  std::ifstream in_;
  std::vector<char> buffer_;
};

/// Writes a band-sequential payload row-block by row-block. The payload is
/// pre-sized so blocks may arrive per band in any order.
class RasterFileWriter {
 public:
  RasterFileWriter(const fs::path& header_path, Header header)
      : header_(std::move(header)), layout_(layout_of(header_)) {
    header_.save(header_path);
    const fs::path data = payload_path(header_path, header_);
    {
      std::ofstream create(data, std::ios::binary | std::ios::trunc);
      if (!create) throw IoError("cannot write payload " + data.string());
    }
    fs::resize_file(data, layout_.payload_bytes());
    out_.open(data, std::ios::binary | std::ios::in | std::ios::out);
    if (!out_) throw IoError("cannot open payload " + data.string());
  }

  const RasterLayout& layout() const noexcept { return layout_; }

  void write_rows(std::size_t band, std::size_t first, std::span<const double> values) {
    const std::size_t ss = sample_size(layout_.type);
    buffer_.resize(values.size() * ss);
    encode_samples(layout_.type, values.data(), values.size(), buffer_.data());
    out_.seekp(static_cast<std::streamoff>(band * layout_.plane_bytes() +
                                           first * layout_.cols * ss));
    out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (!out_) throw IoError("short write to raster payload");
  }

  template <typename T>
  void write_grid_rows(std::size_t band, std::size_t first, const Grid<T>& rows) {
    if constexpr (std::is_same_v<T, double>) {
      write_rows(band, first, rows.values());
    } else {
      std::vector<double> tmp(rows.values().begin(), rows.values().end());
      write_rows(band, first, tmp);
    }
  }

  void close() {
    out_.close();
    if (out_.fail()) throw IoError("error closing raster payload");
  }

 private:
  Header header_;
  RasterLayout layout_;
  std::fstream out_;
  std::vector<char> buffer_;
};

// ---------------------------------------------------------------------------
// Multispectral images

inline std::vector<BandMetadata> band_metadata(const Header& header, std::size_t bands,
                                               bool calibrated) {
  std::vector<BandMetadata> out;
  for (std::size_t b = 1; b <= bands; ++b) {
    const std::string key = "band." + std::to_string(b) + ".";
    BandMetadata meta;
    meta.band_id = static_cast<int>(b);
    if (auto id = header.find(key + "id")) {
      const auto parsed = parse_integer<int>(*id);
      if (!parsed) throw FormatError("bad " + key + "id");
      meta.band_id = *parsed;
    }
    meta.center_wavelength = header.number(key + "wavelength");
    if (calibrated) {
      meta.gain = header.optional_number(key + "gain").value_or(1.0);
      meta.offset = header.optional_number(key + "offset").value_or(0.0);
    }
    meta.nodata = header.optional_number(key + "nodata");
    meta.validate();
    out.push_back(meta);
  }
  return out;
}

inline bool header_requests_calibration(const Header& header) {
  const auto mode = header.find("calibration").value_or("none");
  if (mode == "apply") return true;
  if (mode == "none") return false;
  throw FormatError("calibration must be 'apply' or 'none', got '" + mode + "'");
}

/// Row-strip access to an image file. Calibration is applied per strip.
class ImageFileSource {
 public:
  explicit ImageFileSource(const fs::path& header_path) : reader_(header_path) {
    const auto& h = reader_.header();
    if (reader_.layout().bands < 2) {
      throw FormatError(header_path.string() + ": a multispectral image needs at least 2 bands");
    }
    calibrate_ = header_requests_calibration(h);
    bands_ = band_metadata(h, reader_.layout().bands, calibrate_);
  }

  std::size_t rows() const noexcept { return reader_.layout().rows; }
  std::size_t cols() const noexcept { return reader_.layout().cols; }
  const std::vector<BandMetadata>& bands() const noexcept { return bands_; }
  StorageInfo storage() const noexcept { return {reader_.layout().type, calibrate_}; }

  MultiSpectralImage read_rows(std::size_t first, std::size_t last,
                               std::pmr::memory_resource* resource =
                                   std::pmr::get_default_resource()) {
    MultiSpectralImage image(last - first, cols(), bands_, resource);
    Plane raw(last - first, cols(), 0.0, resource);
    for (std::size_t b = 0; b < bands_.size(); ++b) {
      reader_.read_rows(b, first, last, raw.data());
      image.assign(b, apply_calibration(raw, bands_[b], resource));
    }
    image.set_storage(storage());
    return image;
  }

 private:
  RasterFileReader reader_;
  std::vector<BandMetadata> bands_;
  bool calibrate_ = false;
};

/// Reads a whole image. Samples are decoded from the band-sequential payload
/// and calibrated per band when the header says `calibration = apply`.
inline MultiSpectralImage read_image(const fs::path& header_path) {
  ImageFileSource source(header_path);
  return source.read_rows(0, source.rows());
}

inline Header image_header(const MultiSpectralImage& image) {
  const auto storage = image.storage();
  Header header = base_header(image.rows(), image.cols(), image.band_count(), storage.sample_type);
  header.set("calibration", storage.apply_calibration ? "apply" : "none");
  for (std::size_t b = 0; b < image.band_count(); ++b) {
    const auto& meta = image.band(b);
    const std::string key = "band." + std::to_string(b + 1) + ".";
    header.set(key + "id", meta.band_id);
    header.set(key + "wavelength", meta.center_wavelength);
    if (storage.apply_calibration) {
      header.set(key + "gain", meta.gain);
      header.set(key + "offset", meta.offset);
    }
    if (meta.nodata) header.set(key + "nodata", *meta.nodata);
  }
  return header;
}

/// Encodes rows of `image` into raw samples: the inverse of calibration when
/// the storage applies it; invalid pixels take the band's nodata value.
inline std::vector<double> encode_plane(const MultiSpectralImage& image, std::size_t band) {
  const auto& meta = image.band(band);
  const bool invert = image.storage().apply_calibration;
  const auto values = image.plane(band).values();
  const auto valid = image.valid().values();
  std::vector<double> raw(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!valid[i]) {
      raw[i] = meta.nodata.value_or(0.0);
    } else {
      raw[i] = invert ? (values[i] - meta.offset) / meta.gain : values[i];
    }
  }
  return raw;
}

inline void write_image(const fs::path& header_path, const MultiSpectralImage& image) {
  RasterFileWriter writer(header_path, image_header(image));
  for (std::size_t b = 0; b < image.band_count(); ++b) {
    writer.write_rows(b, 0, encode_plane(image, b));
  }
  writer.close();
}

// ---------------------------------------------------------------------------
// Single-band grids (categorical maps, segment ids, aura counts, RMSE)

template <typename T>
Header grid_header(std::size_t rows, std::size_t cols) {
  return base_header(rows, cols, 1, sample_type_of<T>());
}

template <typename T>
void write_grid(const fs::path& header_path, const Grid<T>& grid, Header header) {
  RasterFileWriter writer(header_path, std::move(header));
  writer.write_grid_rows(0, 0, grid);
  writer.close();
}

/// Reads rows of a single-band file of element type T.
template <typename T>
class GridFileSource {
 public:
  explicit GridFileSource(const fs::path& header_path) : reader_(header_path) {
    if (reader_.layout().bands != 1) throw FormatError(header_path.string() + ": expected 1 band");
    if (reader_.layout().type != sample_type_of<T>()) {
      throw FormatError(header_path.string() + ": expected dtype " +
                        std::string(to_string(sample_type_of<T>())));
    }
  }

  const Header& header() const noexcept { return reader_.header(); }
  std::size_t rows() const noexcept { return reader_.layout().rows; }
  std::size_t cols() const noexcept { return reader_.layout().cols; }

  Grid<T> read_rows(std::size_t first, std::size_t last,
                    std::pmr::memory_resource* resource = std::pmr::get_default_resource()) {
    Grid<T> out(last - first, cols(), T{}, resource);
    std::pmr::vector<double> tmp(out.size(), resource);
    reader_.read_rows(0, first, last, tmp.data());
    std::transform(tmp.begin(), tmp.end(), out.data(),
                   [](double v) { return static_cast<T>(v); });
    return out;
  }

 private:
  RasterFileReader reader_;
};

template <typename T>
std::pair<Header, Grid<T>> read_grid(const fs::path& header_path) {
  GridFileSource<T> source(header_path);
  auto grid = source.read_rows(0, source.rows());
  return {source.header(), std::move(grid)};
}

inline Header categorical_header(std::size_t rows, std::size_t cols, const Legend& legend) {
  Header header = grid_header<Label>(rows, cols);
  header.set("kind", "categorical");
  header.set("nodata", static_cast<int>(kNoDataLabel));
  legend.write_to(header);
  return header;
}

inline void write_categorical_map(const fs::path& header_path, const CategoricalMap& map) {
  write_grid(header_path, map.labels, categorical_header(map.rows(), map.cols(), map.legend));
}

inline CategoricalMap read_categorical_map(const fs::path& header_path) {
  auto [header, labels] = read_grid<Label>(header_path);
  CategoricalMap map{std::move(labels), Legend::read_from(header)};
  map.validate();
  return map;
}

}  // namespace staticcolor::io
