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

// Classifies a random patchy scene with the built-in rules, segments the
// result and reports timings and the reconstruction error.
//
//   classify_synthetic [rows [cols [seed]]]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <random>

#include "staticcolor/ccl.hpp"
#include "staticcolor/classify.hpp"
#include "staticcolor/specl.hpp"
#include "staticcolor/superpixels.hpp"

using namespace staticcolor;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Reflectance patches: a coarse grid of random spectra plus small noise.
MultiSpectralImage patchy_scene(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> reflectance(0.0, 0.6), noise(-0.003, 0.003);
  const std::vector<BandMetadata> bands = {{1, 0.48}, {2, 0.56}, {3, 0.66},
                                           {4, 0.83}, {5, 1.65}, {7, 2.2}};
  const std::size_t cell = 16;
  const std::size_t gr = rows / cell + 1, gc = cols / cell + 1;
  std::vector<std::vector<double>> spectra(gr * gc, std::vector<double>(bands.size()));
  for (auto& s : spectra) {
    for (auto& v : s) v = reflectance(rng);
  }
  MultiSpectralImage img(rows, cols, bands);
  for (std::size_t b = 0; b < bands.size(); ++b) {
    auto& plane = img.plane(b);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        plane(r, c) = spectra[(r / cell) * gc + c / cell][b] + noise(rng);
      }
    }
  }
  return img;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t rows = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 512;
  const std::size_t cols = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 512;
  const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 1;

  const MultiSpectralImage image = patchy_scene(rows, cols, seed);
  const RuleSet rules = specl_rules();

  auto t0 = std::chrono::steady_clock::now();
  const CategoricalMap map = classify(image, rules, {default_workers()});
  const double t_classify = seconds_since(t0);

  std::map<Label, std::size_t> histogram;
  for (Label l : map.labels.values()) ++histogram[l];
  std::printf("%zu x %zu pixels, classified in %.3f s\n", rows, cols, t_classify);
  for (const auto& [label, n] : histogram) {
    const auto at = map.legend.index_of(label);
    std::printf("  %3d %8zu  %s\n", int(label), n, at ? map.legend[*at].name.c_str() : "nodata");
  }

  t0 = std::chrono::steady_clock::now();
  const auto seg = connected_components(map, Adjacency::Eight);
  const auto aura = cross_aura(map, Adjacency::Eight);
  const auto table = build_superpixel_table(map, seg, image, aura);
  const auto rmse = rmse_map(image, reconstruct(seg, table, image));
  const double t_segment = seconds_since(t0);

  std::printf("%u segments in %.3f s\n", unsigned(seg.segment_count), t_segment);
  std::printf("rmse: mean %.5f, max %.5f, stdev %.5f\n", rmse.stats.mean(), rmse.stats.max(),
              rmse.stats.stdev());
  return 0;
}
