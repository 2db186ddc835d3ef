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

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory_resource>
#include <string>
#include <vector>

#include "staticcolor/errors.hpp"
#include "staticcolor/legend.hpp"
#include "staticcolor/parallel.hpp"
#include "staticcolor/raster.hpp"
#include "staticcolor/rules.hpp"

namespace staticcolor {

/// A rule set bound to the band layout of a particular image.
struct BoundRules {
  const RuleSet* rules = nullptr;
  std::vector<std::size_t> image_band;  ///< per declared band; valid where present
  std::vector<std::uint8_t> present;
  Legend legend;
};

/// Matches declared symbols `b<N>` to image bands with id N. A missing
/// non-optional band is a ConfigError naming the band.
inline BoundRules bind_rules(const RuleSet& rules, const std::vector<BandMetadata>& bands) {
  if (bands.size() < 2) throw ConfigError("classification needs at least 2 image bands");
  BoundRules bound;
  bound.rules = &rules;
  bound.legend = rules.legend();
  for (const auto& decl : rules.bands) {
    std::size_t found = bands.size();
    for (std::size_t b = 0; b < bands.size(); ++b) {
      if (bands[b].band_id == decl.band_id) found = b;
    }
    if (found == bands.size() && !decl.optional) {
      throw ConfigError("image lacks required band " + decl.symbol + " (band id " +
                        std::to_string(decl.band_id) + ")");
    }
    bound.image_band.push_back(found == bands.size() ? 0 : found);
    bound.present.push_back(found == bands.size() ? 0 : 1);
  }
  return bound;
}

struct ClassifyOptions {
  std::size_t workers = 1;
};

struct ClassifyStats {
  std::size_t pixel_visits = 0;
  std::size_t nodata_pixels = 0;
  std::size_t fallback_pixels = 0;
};

/// Labels rows [first, last) of `image` into `out` (same row indexing).
/// Every pixel is visited exactly once.
inline void classify_rows(const MultiSpectralImage& image, const BoundRules& bound,
                          std::size_t first, std::size_t last, Grid<Label>& out,
                          ClassifyStats& stats) {
  const RuleSet& rules = *bound.rules;
  const std::size_t nb = rules.bands.size();
  std::vector<double> values(nb, 0.0);
  const PixelContext px{values, bound.present};
  const Label fallback = static_cast<Label>(rules.fallback.index);
  for (std::size_t r = first; r < last; ++r) {
    for (std::size_t c = 0; c < image.cols(); ++c) {
      ++stats.pixel_visits;
      if (!image.is_valid(r, c)) {
        out(r, c) = kNoDataLabel;
        ++stats.nodata_pixels;
        continue;
      }
      for (std::size_t k = 0; k < nb; ++k) {
        values[k] = bound.present[k] ? image.sample(bound.image_band[k], r, c) : 0.0;
      }
      const Label label = static_cast<Label>(decide(rules, px));
      if (label == fallback) ++stats.fallback_pixels;
      out(r, c) = label;
    }
  }
}

/// One pass over the image: each valid pixel receives the label chosen by
/// the rule set's match policy, invalid pixels receive nodata. Output rows
/// are allocated from `resource`.
inline CategoricalMap classify(const MultiSpectralImage& image, const RuleSet& rules,
                               const ClassifyOptions& options = {}, ClassifyStats* stats = nullptr,
                               std::pmr::memory_resource* resource =
                                   std::pmr::get_default_resource()) {
  const BoundRules bound = bind_rules(rules, image.bands());
  CategoricalMap map{Grid<Label>(image.rows(), image.cols(), kNoDataLabel, resource),
                     bound.legend};
  std::vector<ClassifyStats> per_worker(std::max<std::size_t>(options.workers, 1));
  for_each_row_block(image.rows(), options.workers,
                     [&](std::size_t w, std::size_t first, std::size_t last) {
                       classify_rows(image, bound, first, last, map.labels, per_worker[w]);
                     });
  if (stats) {
    for (const auto& s : per_worker) {
      stats->pixel_visits += s.pixel_visits;
      stats->nodata_pixels += s.nodata_pixels;
      stats->fallback_pixels += s.fallback_pixels;
    }
  }
  return map;
}

/// Total child -> parent function between two legends, used to merge fine
/// color names into coarser ones.
class LegendAggregation {
 public:
  LegendAggregation(Legend child, LegendMapping mapping)
      : child_(std::move(child)), mapping_(std::move(mapping)) {
    for (const auto& e : child_.entries()) {
      if (!mapping_.candidates().count(e.label)) {
        throw MappingError("aggregation does not map child label " + std::to_string(e.label));
      }
      if (mapping_.is_ambiguous(e.label)) {
        throw MappingError("aggregation maps child label " + std::to_string(e.label) +
                           " to several parents");
      }
    }
    for (const auto& [label, parents] : mapping_.candidates()) {
      if (!child_.contains(label)) {
        throw MappingError("aggregation maps label " + std::to_string(label) +
                           " which is not in the child legend");
      }
    }
    if (mapping_.parent_legend().size() > child_.size()) {
      throw MappingError("parent legend is larger than the child legend");
    }
  }

  const Legend& child_legend() const noexcept { return child_; }
  const Legend& parent_legend() const noexcept { return mapping_.parent_legend(); }
  const LegendMapping& mapping() const noexcept { return mapping_; }
  Label parent_of(Label child) const { return mapping_.parent_of(child); }

  /// then(g) is g ∘ this: child -> this parent -> g's parent.
  LegendAggregation then(const LegendAggregation& g) const {
    if (!(g.child_legend() == parent_legend())) {
      throw MappingError("aggregations do not compose: legends differ");
    }
    LegendMapping composed(g.parent_legend());
    for (const auto& e : child_.entries()) composed.add(e.label, {g.parent_of(parent_of(e.label))});
    return LegendAggregation(child_, std::move(composed));
  }

 private:
  Legend child_;
  LegendMapping mapping_;
};

/// out(p) = agg(map(p)); nodata is preserved.
inline CategoricalMap aggregate(const CategoricalMap& map, const LegendAggregation& agg) {
  if (!(map.legend == agg.child_legend())) {
    throw MappingError("map legend differs from the aggregation's child legend");
  }
  return relabel(map, agg.mapping());
}

}  // namespace staticcolor
