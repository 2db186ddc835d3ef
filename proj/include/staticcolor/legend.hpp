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
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "staticcolor/csv.hpp"
#include "staticcolor/errors.hpp"
#include "staticcolor/grid.hpp"
#include "staticcolor/header.hpp"

namespace staticcolor {

using Label = std::uint16_t;

/// Label value reserved for "no data" in categorical rasters.
inline constexpr Label kNoDataLabel = 0;

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;

  std::string hex() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02X%02X%02X", r, g, b);
    return buf;
  }

  static std::optional<Rgb> parse_hex(std::string_view text) {
    if (text.size() != 7 || text[0] != '#') return std::nullopt;
    std::array<std::uint8_t, 3> parts{};
    for (std::size_t i = 0; i < 3; ++i) {
      unsigned v = 0;
      for (std::size_t k = 0; k < 2; ++k) {
        const char ch = text[1 + 2 * i + k];
        v <<= 4;
        if (ch >= '0' && ch <= '9') v |= static_cast<unsigned>(ch - '0');
        else if (ch >= 'a' && ch <= 'f') v |= static_cast<unsigned>(ch - 'a' + 10);
        else if (ch >= 'A' && ch <= 'F') v |= static_cast<unsigned>(ch - 'A' + 10);
        else return std::nullopt;
      }
      parts[i] = static_cast<std::uint8_t>(v);
    }
    return Rgb{parts[0], parts[1], parts[2]};
  }

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct LegendEntry {
  Label label = 0;
  std::string name;
  Rgb color;

  friend bool operator==(const LegendEntry&, const LegendEntry&) = default;
};

/// Ordered dictionary of class labels. Labels are unique and non-zero.
class Legend {
 public:
  Legend() = default;

  explicit Legend(std::vector<LegendEntry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const LegendEntry& a, const LegendEntry& b) { return a.label < b.label; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].label == kNoDataLabel) {
        throw ConfigError("legend label 0 is reserved for nodata");
      }
      if (i && entries_[i].label == entries_[i - 1].label) {
        throw ConfigError("duplicate legend label " + std::to_string(entries_[i].label));
      }
    }
  }

  /// Legend with labels 1..names.size() and grey pseudo-colors.
  static Legend from_names(const std::vector<std::string>& names) {
    std::vector<LegendEntry> entries;
    for (std::size_t i = 0; i < names.size(); ++i) {
      entries.push_back({static_cast<Label>(i + 1), names[i], {}});
    }
    return Legend(std::move(entries));
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<LegendEntry>& entries() const noexcept { return entries_; }
  const LegendEntry& operator[](std::size_t i) const { return entries_.at(i); }

  bool contains(Label label) const noexcept { return index_of(label).has_value(); }

  std::optional<std::size_t> index_of(Label label) const noexcept {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), label,
                               [](const LegendEntry& e, Label l) { return e.label < l; });
    if (it == entries_.end() || it->label != label) return std::nullopt;
    return static_cast<std::size_t>(it - entries_.begin());
  }

  std::optional<std::size_t> index_of_name(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].name == name) return i;
    }
    return std::nullopt;
  }

  /// Dense lookup table label -> legend position (or -1), for per-pixel use.
  std::vector<int> position_table() const {
    std::vector<int> table(65536, -1);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      table[entries_[i].label] = static_cast<int>(i);
    }
    return table;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
  }

  void write_to(Header& header) const {
    header.set("legend.count", entries_.size());
    for (const auto& e : entries_) {
      const std::string key = "legend." + std::to_string(e.label);
      header.set(key + ".name", e.name);
      header.set(key + ".color", e.color.hex());
    }
  }

  static Legend read_from(const Header& header) {
    std::vector<LegendEntry> entries;
    for (const auto& [key, value] : header.entries()) {
      if (key.rfind("legend.", 0) != 0 || key.size() < 13) continue;
      if (key.compare(key.size() - 5, 5, ".name") != 0) continue;
      const auto label = parse_integer<Label>(std::string_view(key).substr(7, key.size() - 12));
      if (!label) throw FormatError("bad legend key '" + key + "'");
      LegendEntry entry{*label, value, {}};
      if (auto color = header.find("legend." + std::to_string(*label) + ".color")) {
        auto rgb = Rgb::parse_hex(*color);
        if (!rgb) throw FormatError("bad legend color '" + *color + "'");
        entry.color = *rgb;
      }
      entries.push_back(std::move(entry));
    }
    if (auto count = header.find("legend.count")) {
      if (parse_integer<std::size_t>(*count) != entries.size()) {
        throw FormatError("legend.count does not match the number of legend entries");
      }
    }
    return Legend(std::move(entries));
  }

  /// Rows `label,name[,#RRGGBB]`; a non-numeric first row is a header.
  static Legend from_rows(const std::vector<csv::Row>& rows, const std::string& origin) {
    std::vector<LegendEntry> entries;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (row.empty()) continue;
      const auto label = parse_integer<Label>(row[0]);
      const std::string where = origin + ": row " + std::to_string(i + 1);
      if (!label) {
        if (i == 0) continue;
        throw FormatError(where + ": bad label '" + row[0] + "'");
      }
      if (row.size() < 2 || row[1].empty()) throw FormatError(where + ": missing class name");
      LegendEntry entry{*label, row[1], {}};
      if (row.size() > 2 && !row[2].empty()) {
        auto rgb = Rgb::parse_hex(row[2]);
        if (!rgb) throw FormatError(where + ": bad color '" + row[2] + "'");
        entry.color = *rgb;
      }
      entries.push_back(std::move(entry));
    }
    return Legend(std::move(entries));
  }

  static Legend load_csv(const std::filesystem::path& path) {
    return from_rows(csv::load(path), path.string());
  }

  friend bool operator==(const Legend&, const Legend&) = default;

 private:
  std::vector<LegendEntry> entries_;
};

/// Per-pixel class labels over a legend. Label 0 marks nodata.
struct CategoricalMap {
  Grid<Label> labels;
  Legend legend;

  std::size_t rows() const noexcept { return labels.rows(); }
  std::size_t cols() const noexcept { return labels.cols(); }

  /// Throws MappingError if a non-nodata pixel carries a label outside the legend.
  void validate() const {
    const auto table = legend.position_table();
    for (std::size_t r = 0; r < labels.rows(); ++r) {
      for (std::size_t c = 0; c < labels.cols(); ++c) {
        const Label l = labels(r, c);
        if (l != kNoDataLabel && table[l] < 0) {
          throw MappingError("pixel (" + std::to_string(r) + ", " + std::to_string(c) +
                             ") has label " + std::to_string(l) + " outside the legend");
        }
      }
    }
  }

  friend bool operator==(const CategoricalMap&, const CategoricalMap&) = default;
};

/// Relation from child labels to one or more candidate parent labels.
/// A mapping is usable for relabeling only once it is a function over the
/// labels being relabeled; ambiguous children need an explicit resolution.
class LegendMapping {
 public:
  LegendMapping() = default;
  explicit LegendMapping(Legend parent) : parent_(std::move(parent)) {}

  const Legend& parent_legend() const noexcept { return parent_; }
  const std::map<Label, std::vector<Label>>& candidates() const noexcept { return candidates_; }

  void add(Label child, std::vector<Label> parents) {
    if (parents.empty()) throw MappingError("child " + std::to_string(child) + " has no parent");
    for (Label p : parents) {
      if (!parent_.contains(p)) {
        throw MappingError("parent label " + std::to_string(p) + " is not in the parent legend");
      }
    }
    if (!candidates_.emplace(child, std::move(parents)).second) {
      throw MappingError("child label " + std::to_string(child) + " mapped twice");
    }
  }

  bool is_ambiguous(Label child) const {
    auto it = candidates_.find(child);
    return it != candidates_.end() && it->second.size() > 1;
  }

  std::vector<Label> ambiguous_children() const {
    std::vector<Label> out;
    for (const auto& [child, parents] : candidates_) {
      if (parents.size() > 1) out.push_back(child);
    }
    return out;
  }

  /// Picks one parent for each listed ambiguous child; the choice must be
  /// one of the candidates.
  LegendMapping resolved(const std::map<Label, Label>& choices) const {
    LegendMapping out(parent_);
    for (const auto& [child, parents] : candidates_) {
      auto it = choices.find(child);
      if (it == choices.end()) {
        out.candidates_.emplace(child, parents);
        continue;
      }
      if (std::find(parents.begin(), parents.end(), it->second) == parents.end()) {
        throw MappingError("resolution " + std::to_string(child) + " -> " +
                           std::to_string(it->second) + " is not one of the candidates");
      }
      out.candidates_.emplace(child, std::vector<Label>{it->second});
    }
    for (const auto& [child, parent] : choices) {
      if (!candidates_.count(child)) {
        throw MappingError("resolution for unmapped child " + std::to_string(child));
      }
    }
    return out;
  }

  /// The unique parent of `child`. Throws if unmapped or ambiguous.
  Label parent_of(Label child) const {
    auto it = candidates_.find(child);
    if (it == candidates_.end()) {
      throw MappingError("label " + std::to_string(child) + " is not mapped");
    }
    if (it->second.size() != 1) {
      throw MappingError("label " + std::to_string(child) + " is ambiguous (" +
                         std::to_string(it->second.size()) +
                         " candidate parents); supply a resolution");
    }
    return it->second.front();
  }

  /// Dense child -> parent lookup over `children`; every child must have a
  /// unique parent.
  std::vector<Label> lookup_table(const Legend& children) const {
    std::vector<Label> table(65536, kNoDataLabel);
    for (const auto& e : children.entries()) table[e.label] = parent_of(e.label);
    return table;
  }

  /// Reads CSV rows `child_label,parent_label[,parent_name]`. A parent
  /// field may list alternatives separated by '|'; names pair up with them.
  /// A header row whose first field is not a number is skipped.
  static LegendMapping load_csv(const std::filesystem::path& path) {
    return from_rows(csv::load(path), path.string());
  }

  static LegendMapping from_rows(const std::vector<csv::Row>& rows, const std::string& origin) {
    std::map<Label, std::string> parent_names;
    std::vector<std::pair<Label, std::vector<Label>>> links;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (row.empty()) continue;
      const auto child = parse_integer<Label>(row[0]);
      if (!child) {
        if (i == 0) continue;
        throw FormatError(origin + ": row " + std::to_string(i + 1) + ": bad child label");
      }
      if (row.size() < 2) {
        throw FormatError(origin + ": row " + std::to_string(i + 1) + ": missing parent label");
      }
      const auto parents = split(row[1]);
      const auto names = row.size() > 2 ? split(row[2]) : std::vector<std::string>{};
      std::vector<Label> labels;
      for (std::size_t k = 0; k < parents.size(); ++k) {
        const auto parent = parse_integer<Label>(parents[k]);
        if (!parent || *parent == kNoDataLabel) {
          throw FormatError(origin + ": row " + std::to_string(i + 1) + ": bad parent label");
        }
        labels.push_back(*parent);
        auto& name = parent_names[*parent];
        if (k < names.size() && !names[k].empty()) name = names[k];
        if (name.empty()) name = "class " + std::to_string(*parent);
      }
      links.emplace_back(*child, std::move(labels));
    }
    std::vector<LegendEntry> entries;
    for (const auto& [label, name] : parent_names) entries.push_back({label, name, {}});
    LegendMapping mapping{Legend(std::move(entries))};
    for (auto& [child, parents] : links) mapping.add(child, std::move(parents));
    return mapping;
  }

  /// Reads CSV rows `child_label,parent_label` choosing one candidate each.
  static std::map<Label, Label> load_resolutions(const std::filesystem::path& path) {
    std::map<Label, Label> out;
    const auto rows = csv::load(path);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto child = parse_integer<Label>(rows[i].at(0));
      if (!child) {
        if (i == 0) continue;
        throw FormatError(path.string() + ": row " + std::to_string(i + 1) + ": bad label");
      }
      const auto parent = rows[i].size() > 1 ? parse_integer<Label>(rows[i][1]) : std::nullopt;
      if (!parent) {
        throw FormatError(path.string() + ": row " + std::to_string(i + 1) + ": bad parent");
      }
      if (!out.emplace(*child, *parent).second) {
        throw MappingError(path.string() + ": duplicate resolution for " + std::to_string(*child));
      }
    }
    return out;
  }

 private:
  static std::vector<std::string> split(const std::string& field) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const auto bar = field.find('|', start);
      parts.emplace_back(detail::trim(std::string_view(field).substr(start, bar - start)));
      if (bar == std::string::npos) break;
      start = bar + 1;
    }
    return parts;
  }

  Legend parent_;
  std::map<Label, std::vector<Label>> candidates_;
};

/// out(p) = mapping(map(p)); nodata preserved. The mapping must give a
/// unique parent for every label of the map's legend.
inline CategoricalMap relabel(const CategoricalMap& map, const LegendMapping& mapping) {
  const auto table = mapping.lookup_table(map.legend);
  CategoricalMap out{Grid<Label>(map.rows(), map.cols(), kNoDataLabel), mapping.parent_legend()};
  const auto src = map.labels.values();
  auto dst = out.labels.values();
  const auto known = map.legend.position_table();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Label l = src[i];
    if (l == kNoDataLabel) continue;
    if (known[l] < 0) {
      throw MappingError("label " + std::to_string(l) + " is outside the map legend");
    }
    dst[i] = table[l];
  }
  return out;
}

}  // namespace staticcolor
