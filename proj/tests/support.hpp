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
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "staticcolor/legend.hpp"
#include "staticcolor/raster.hpp"

namespace testing_support {

namespace fs = std::filesystem;
using namespace staticcolor;

/// Directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("staticcolor_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::vector<BandMetadata> tm_bands(bool with_b7 = true) {
  std::vector<BandMetadata> bands = {{1, 0.48}, {2, 0.56}, {3, 0.66}, {4, 0.83}, {5, 1.6}};
  if (with_b7) bands.push_back({7, 2.2});
  return bands;
}

/// One-pixel image holding `p` (b1, b2, b3, b4, b5, b7).
inline MultiSpectralImage pixel_image(const oracle::Pixel& p, bool with_b7 = true) {
  MultiSpectralImage img(1, 1, tm_bands(with_b7));
  for (std::size_t b = 0; b < img.band_count(); ++b) img.plane(b)(0, 0) = p[b];
  return img;
}

/// Reflectance vector mixing uniform draws with small values so that ratio
/// guards and thresholds near zero get exercised.
inline oracle::Pixel random_pixel(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> small(0.0, 0.3);
  std::uniform_int_distribution<int> pick(0, 9);
  oracle::Pixel p{};
  for (auto& v : p) {
    const int k = pick(rng);
    v = k == 0 ? 0.0 : (k < 6 ? small(rng) : u(rng));
  }
  return p;
}

/// Random image of `bands` bands over `rows` x `cols`, values in [0, 1].
inline MultiSpectralImage random_image(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                       std::size_t bands) {
  std::vector<BandMetadata> meta;
  for (std::size_t b = 0; b < bands; ++b) meta.push_back({static_cast<int>(b + 1), 0.5 + 0.1 * b});
  MultiSpectralImage img(rows, cols, meta);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t b = 0; b < bands; ++b) {
    for (auto& v : img.plane(b).values()) v = u(rng);
  }
  return img;
}

/// Random label grid with labels 1..k, optionally with nodata holes, and
/// spatial clumping so segments span several pixels.
inline Grid<Label> random_labels(std::mt19937_64& rng, std::size_t rows, std::size_t cols, int k,
                                 double nodata_fraction = 0.0) {
  Grid<Label> g(rows, cols, 1);
  std::uniform_int_distribution<int> label(1, k);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = u(rng);
      if (x < nodata_fraction) {
        g(r, c) = kNoDataLabel;
      } else if (c > 0 && x < 0.5) {
        g(r, c) = g(r, c - 1) == kNoDataLabel ? static_cast<Label>(label(rng)) : g(r, c - 1);
      } else if (r > 0 && x < 0.7) {
        g(r, c) = g(r - 1, c) == kNoDataLabel ? static_cast<Label>(label(rng)) : g(r - 1, c);
      } else {
        g(r, c) = static_cast<Label>(label(rng));
      }
    }
  }
  return g;
}

/// Six-band TM-like scene: clumpy patches drawn from a few reflectance
/// prototypes with small per-pixel jitter, so classes form real segments.
inline MultiSpectralImage synthetic_scene(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                          double nodata_fraction = 0.0, int prototypes = 12) {
  std::vector<oracle::Pixel> proto;
  for (int i = 0; i < prototypes; ++i) proto.push_back(random_pixel(rng));
  const Grid<Label> patches = random_labels(rng, rows, cols, prototypes, nodata_fraction);
  MultiSpectralImage img(rows, cols, tm_bands());
  std::uniform_real_distribution<double> jitter(-0.004, 0.004);
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const Label k = patches.values()[i];
    img.valid().values()[i] = k != kNoDataLabel;
    if (k == kNoDataLabel) continue;
    for (std::size_t b = 0; b < 6; ++b) {
      img.plane(b).values()[i] = std::max(0.0, proto[k - 1][b] + jitter(rng));
    }
  }
  return img;
}

inline Legend numbered_legend(int k) {
  std::vector<std::string> names;
  for (int i = 1; i <= k; ++i) names.push_back("class " + std::to_string(i));
  return Legend::from_names(names);
}

/// Label grid from rows of characters; `key` maps characters to labels
/// ('.' is nodata).
inline Grid<Label> grid_from_ascii(const std::vector<std::string>& rows, const std::string& key) {
  Grid<Label> g(rows.size(), rows.front().size(), kNoDataLabel);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const auto at = key.find(rows[r][c]);
      g(r, c) = at == std::string::npos ? kNoDataLabel : static_cast<Label>(at + 1);
    }
  }
  return g;
}

/// Three-level map with nine segments; Vegetation forms segments 1 and 8.
inline CategoricalMap nine_segment_map() {
  const std::vector<std::string> rows = {
      "VVSSVVVVVVWW", "VVSSVVVVVVWW", "VVSSVVWWVVWW", "VVSSVVWWVVWW",
      "VVVVVVSSSSSS", "VVVVVVSSSSSS", "SSWWWWWWVVWW", "SSWWWWWWVVWW",
  };
  return {grid_from_ascii(rows, "VWS"), Legend::from_names({"Vegetation", "Water", "Bare soil"})};
}

template <typename T>
oracle::Raster<T> to_raster(const Grid<T>& g) {
  return {g.rows(), g.cols(), std::vector<T>(g.values().begin(), g.values().end())};
}

template <typename T>
std::vector<T> to_vector(const Grid<T>& g) {
  return std::vector<T>(g.values().begin(), g.values().end());
}

}  // namespace testing_support
