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
#include <map>
#include <string>
#include <vector>

#include "staticcolor/compare.hpp"
#include "staticcolor/csv.hpp"
#include "staticcolor/errors.hpp"
#include "staticcolor/header.hpp"

namespace staticcolor {

/// Per-object evidence: a color name from the relation's test dictionary
/// and one shape, texture and spatial membership per class.
struct EvidenceVector {
  std::string color_name;
  std::vector<double> shape;
  std::vector<double> texture;
  std::vector<double> spatial;
};

struct ClassScores {
  Legend classes;
  std::vector<double> score;  ///< one per class, in legend order
};

namespace detail {

inline void check_memberships(const std::vector<double>& m, std::size_t classes, const char* what) {
  if (m.size() != classes) {
    throw DimensionError(std::string(what) + " has " + std::to_string(m.size()) +
                         " memberships, the class legend has " + std::to_string(classes));
  }
  for (double v : m) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DataError(std::string(what) + " membership " + format_number(v) + " is outside [0, 1]");
    }
  }
}

}  // namespace detail

/// Fuzzy AND of all evidence per class; classes the relation bars for this
/// color name score 0 whatever the other memberships say.
inline ClassScores combine(const EvidenceVector& ev, const LegendRelation& rel) {
  rel.validate();
  const auto row = rel.test.index_of_name(ev.color_name);
  if (!row) throw ConfigError("unknown color name '" + ev.color_name + "'");
  const std::size_t n = rel.reference.size();
  detail::check_memberships(ev.shape, n, "shape");
  detail::check_memberships(ev.texture, n, "texture");
  detail::check_memberships(ev.spatial, n, "spatial");
  ClassScores out{rel.reference, std::vector<double>(n, 0.0)};
  for (std::size_t c = 0; c < n; ++c) {
    const double allowed = rel.correct(*row, c) ? 1.0 : 0.0;
    out.score[c] = std::min({allowed, ev.shape[c], ev.texture[c], ev.spatial[c]});
  }
  return out;
}

struct EvidenceRecord {
  std::string object;
  EvidenceVector evidence;
};

/// Reads long-format rows `object,color_name,class,shape,texture,spatial`.
/// Every object must give every class of `classes` exactly once and use one
/// color name throughout. A leading header row is skipped.
inline std::vector<EvidenceRecord> evidence_from_rows(const std::vector<csv::Row>& rows,
                                                      const Legend& classes) {
  std::vector<EvidenceRecord> out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<bool>> seen;
  const std::size_t n = classes.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (i == 0 && !row.empty() && row[0] == "object") continue;
    const std::string where = "evidence row " + std::to_string(i + 1);
    if (row.size() != 6) throw FormatError(where + ": expected 6 fields, got " + std::to_string(row.size()));
    auto cls = detail::find_entry(classes, row[2]);
    if (!cls) throw ConfigError(where + ": unknown class '" + row[2] + "'");
    auto [it, fresh] = index.emplace(row[0], out.size());
    if (fresh) {
      out.push_back({row[0], {row[1], std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                              std::vector<double>(n, 0.0)}});
      seen.emplace_back(n, false);
    }
    auto& rec = out[it->second];
    if (rec.evidence.color_name != row[1]) {
      throw FormatError(where + ": object '" + row[0] + "' changes color name");
    }
    if (seen[it->second][*cls]) {
      throw FormatError(where + ": class '" + row[2] + "' repeated for object '" + row[0] + "'");
    }
    seen[it->second][*cls] = true;
    double* dst[3] = {&rec.evidence.shape[*cls], &rec.evidence.texture[*cls],
                      &rec.evidence.spatial[*cls]};
    for (int k = 0; k < 3; ++k) {
      const auto v = parse_double(row[3 + k]);
      if (!v) throw FormatError(where + ": '" + row[3 + k] + "' is not a number");
      *dst[k] = *v;
    }
  }
  for (std::size_t o = 0; o < out.size(); ++o) {
    for (std::size_t c = 0; c < n; ++c) {
      if (!seen[o][c]) {
        throw FormatError("object '" + out[o].object + "' lacks class '" + classes[c].name + "'");
      }
    }
  }
  return out;
}

}  // namespace staticcolor
