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

// Writes the small raster fixtures under data/scenes and data/maps.
//
//   make_fixtures <data-dir>

#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "staticcolor/raster_io.hpp"

using namespace staticcolor;

namespace {

using Spectrum = std::array<double, 6>;  // b1, b2, b3, b4, b5, b7

// Last-match classes under the built-in rules in the trailing comments.
constexpr Spectrum kVegetation = {0.04, 0.08, 0.05, 0.50, 0.20, 0.10};  // 6
constexpr Spectrum kWater = {0.01, 0.01, 0.01, 0.01, 0.01, 0.01};       // 16 (15 first-match)
constexpr Spectrum kSoil = {0.15, 0.15, 0.20, 0.30, 0.35, 0.30};        // 14 (3 first-match)

const std::vector<std::string> kNineSegments = {
    "VVSSVVVVVVWW", "VVSSVVVVVVWW", "VVSSVVWWVVWW", "VVSSVVWWVVWW",
    "VVVVVVSSSSSS", "VVVVVVSSSSSS", "SSWWWWWWVVWW", "SSWWWWWWVVWW",
};

std::vector<BandMetadata> tm_bands() {
  const int ids[6] = {1, 2, 3, 4, 5, 7};
  const double wl[6] = {0.48, 0.56, 0.66, 0.83, 1.65, 2.2};
  std::vector<BandMetadata> bands;
  for (int b = 0; b < 6; ++b) bands.push_back({ids[b], wl[b], 1e-4, 0.0, 65535.0});
  return bands;
}

/// Scene from a character layout; '.' is nodata.
MultiSpectralImage scene(const std::vector<std::string>& layout) {
  MultiSpectralImage img(layout.size(), layout[0].size(), tm_bands());
  img.set_storage({SampleType::UInt16, true});
  for (std::size_t r = 0; r < layout.size(); ++r) {
    for (std::size_t c = 0; c < layout[r].size(); ++c) {
      const char k = layout[r][c];
      img.valid()(r, c) = k != '.';
      const Spectrum& s = k == 'V' ? kVegetation : (k == 'W' ? kWater : kSoil);
      for (std::size_t b = 0; b < 6; ++b) img.plane(b)(r, c) = k == '.' ? 0.0 : s[b];
    }
  }
  return img;
}

CategoricalMap map_from(const std::vector<std::string>& layout, const std::string& key,
                        const Legend& legend) {
  CategoricalMap map{Grid<Label>(layout.size(), layout[0].size(), kNoDataLabel), legend};
  for (std::size_t r = 0; r < layout.size(); ++r) {
    for (std::size_t c = 0; c < layout[r].size(); ++c) {
      const auto at = key.find(layout[r][c]);
      if (at != std::string::npos) map.labels(r, c) = legend[at].label;
    }
  }
  return map;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: make_fixtures <data-dir>\n");
    return 2;
  }
  const io::fs::path root = argv[1];
  io::fs::create_directories(root / "scenes");
  io::fs::create_directories(root / "maps");
  try {
    io::write_image(root / "scenes" / "nine_segments.hdr", scene(kNineSegments));
    io::write_categorical_map(
        root / "maps" / "nine_segments.hdr",
        map_from(kNineSegments, "VWS", Legend::from_names({"Vegetation", "Water", "Bare soil"})));

    // Clear water on the left, vegetation on the right, a nodata corner.
    io::write_image(root / "scenes" / "clear_water.hdr",
                    scene({"WWWWVVVV", "WWWWVVVV", "WWWSSVVV", "WWSSSVV.", "WWSSSV.."}));

    // NLCD codes, one of them (21) ambiguous under the LCCS-DP mapping.
    Legend nlcd = io::fs::exists(root / "legends" / "nlcd.csv")
                      ? Legend::load_csv(root / "legends" / "nlcd.csv")
                      : Legend{};
    CategoricalMap sample{Grid<Label>(4, 6, kNoDataLabel), nlcd};
    const Label codes[4][6] = {{11, 11, 41, 41, 42, 82},
                               {11, 90, 41, 43, 82, 82},
                               {95, 90, 31, 21, 21, 81},
                               {12, 31, 31, 21, 0, 81}};
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 6; ++c) sample.labels(r, c) = codes[r][c];
    }
    io::write_categorical_map(root / "maps" / "nlcd_sample.hdr", sample);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "make_fixtures: %s\n", e.what());
    return 1;
  }
  return 0;
}
