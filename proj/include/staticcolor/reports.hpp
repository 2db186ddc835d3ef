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

#include <string>
#include <vector>

#include "staticcolor/csv.hpp"
#include "staticcolor/header.hpp"
#include "staticcolor/legend.hpp"
#include "staticcolor/raster.hpp"
#include "staticcolor/superpixels.hpp"

namespace staticcolor {

/// Superpixel description table as CSV rows: one header row, then one row
/// per segment with its stratum, extent, shape and per-band means. Band
/// columns are named `mean_b<id>`; without bands there are none.
inline std::vector<csv::Row> superpixel_rows(const std::vector<SuperpixelRecord>& table,
                                             const Legend& legend,
                                             const std::vector<BandMetadata>& bands = {}) {
  std::vector<csv::Row> rows;
  csv::Row head = {"segment_id", "label", "class", "pixel_count", "min_row", "min_col",
                   "max_row",    "max_col", "perimeter", "compactness"};
  for (const auto& b : bands) head.push_back("mean_b" + std::to_string(b.band_id));
  rows.push_back(std::move(head));
  for (const auto& rec : table) {
    const auto at = legend.index_of(rec.label);
    csv::Row row = {std::to_string(rec.segment_id),
                    std::to_string(rec.label),
                    at ? legend[*at].name : std::string(),
                    std::to_string(rec.pixel_count),
                    std::to_string(rec.min_row),
                    std::to_string(rec.min_col),
                    std::to_string(rec.max_row),
                    std::to_string(rec.max_col),
                    std::to_string(rec.perimeter),
                    format_number(rec.compactness)};
    for (std::size_t b = 0; b < rec.band_sums.size(); ++b) row.push_back(format_number(rec.mean(b)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace staticcolor
