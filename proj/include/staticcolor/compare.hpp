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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "staticcolor/csv.hpp"
#include "staticcolor/errors.hpp"
#include "staticcolor/grid.hpp"
#include "staticcolor/header.hpp"
#include "staticcolor/legend.hpp"
#include "staticcolor/parallel.hpp"

namespace staticcolor {

using Counts = Grid<std::uint64_t>;
using Probabilities = Grid<double>;
using BinaryMatrix = Grid<std::uint8_t>;

/// Binary relation between a test dictionary (rows) and a reference
/// dictionary (columns); 1 marks a "correct" pair.
struct LegendRelation {
  Legend test;
  Legend reference;
  BinaryMatrix correct;

  std::size_t test_size() const noexcept { return test.size(); }
  std::size_t reference_size() const noexcept { return reference.size(); }

  void validate() const {
    if (correct.rows() != test.size() || correct.cols() != reference.size()) {
      throw DimensionError("relation matrix is " + std::to_string(correct.rows()) + "x" +
                           std::to_string(correct.cols()) + ", dictionaries are " +
                           std::to_string(test.size()) + "x" + std::to_string(reference.size()));
    }
    for (auto v : correct.values()) {
      if (v > 1) throw DataError("relation entries must be 0 or 1");
    }
  }

  std::size_t correct_count() const noexcept {
    std::size_t n = 0;
    for (auto v : correct.values()) n += v;
    return n;
  }

  friend bool operator==(const LegendRelation&, const LegendRelation&) = default;
};

struct ContingencyTable {
  Legend test;
  Legend reference;
  Counts counts;

  std::uint64_t total() const noexcept {
    std::uint64_t n = 0;
    for (auto v : counts.values()) n += v;
    return n;
  }

  std::vector<std::uint64_t> row_sums() const {
    std::vector<std::uint64_t> out(counts.rows(), 0);
    for (std::size_t t = 0; t < counts.rows(); ++t) {
      for (std::size_t r = 0; r < counts.cols(); ++r) out[t] += counts(t, r);
    }
    return out;
  }

  std::vector<std::uint64_t> column_sums() const {
    std::vector<std::uint64_t> out(counts.cols(), 0);
    for (std::size_t t = 0; t < counts.rows(); ++t) {
      for (std::size_t r = 0; r < counts.cols(); ++r) out[r] += counts(t, r);
    }
    return out;
  }

  /// Same table with test and reference swapped.
  ContingencyTable transposed() const {
    ContingencyTable out{reference, test, Counts(counts.cols(), counts.rows(), 0)};
    for (std::size_t t = 0; t < counts.rows(); ++t) {
      for (std::size_t r = 0; r < counts.cols(); ++r) out.counts(r, t) = counts(t, r);
    }
    return out;
  }

  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;
};

/// Overlapping area matrix of two co-registered maps. A pixel counts only
/// when it is valid (non-nodata) in both.
inline ContingencyTable build_contingency(const CategoricalMap& test, const CategoricalMap& reference,
                                          std::size_t workers = 1) {
  if (test.rows() != reference.rows() || test.cols() != reference.cols()) {
    throw DimensionError("test map is " + std::to_string(test.rows()) + "x" +
                         std::to_string(test.cols()) + ", reference map is " +
                         std::to_string(reference.rows()) + "x" + std::to_string(reference.cols()));
  }
  const auto tpos = test.legend.position_table();
  const auto rpos = reference.legend.position_table();
  const std::size_t tc = test.legend.size();
  const std::size_t rc = reference.legend.size();
  workers = std::max<std::size_t>(1, workers);
  std::vector<Counts> partial(workers, Counts(tc, rc, 0));
  for_each_row_block(test.rows(), workers, [&](std::size_t w, std::size_t first, std::size_t last) {
    auto& counts = partial[w];
    for (std::size_t row = first; row < last; ++row) {
      for (std::size_t c = 0; c < test.cols(); ++c) {
        const Label a = test.labels(row, c);
        const Label b = reference.labels(row, c);
        if (a == kNoDataLabel || b == kNoDataLabel) continue;
        if (tpos[a] < 0) throw MappingError("test label " + std::to_string(a) + " is outside its legend");
        if (rpos[b] < 0) {
          throw MappingError("reference label " + std::to_string(b) + " is outside its legend");
        }
        ++counts(static_cast<std::size_t>(tpos[a]), static_cast<std::size_t>(rpos[b]));
      }
    }
  });
  ContingencyTable out{test.legend, reference.legend, Counts(tc, rc, 0)};
  for (const auto& counts : partial) {
    for (std::size_t i = 0; i < counts.size(); ++i) out.counts.values()[i] += counts.values()[i];
  }
  if (out.total() == 0) throw DataError("test and reference maps share no valid pixel");
  return out;
}

struct HarmonizationTrace {
  ContingencyTable table;       ///< step 1
  Probabilities joint;          ///< step 2, counts / N
  Probabilities given_test;     ///< step 3, p(r | t): rows sum to 1
  BinaryMatrix given_test_cut;  ///< step 4, p(r | t) >= TH1
  Probabilities given_ref;      ///< step 5, p(t | r): columns sum to 1
  BinaryMatrix given_ref_cut;   ///< step 6, p(t | r) >= TH2
  BinaryMatrix candidate;       ///< step 7, step 4 OR step 6
  double th1 = 0.0;
  double th2 = 0.0;

  LegendRelation candidate_relation() const { return {table.test, table.reference, candidate}; }
};

inline void check_thresholds(double th1, double th2) {
  if (!std::isfinite(th1) || !std::isfinite(th2) || th2 < 0.0 || th2 > th1 || th1 > 1.0) {
    throw ConfigError("thresholds must satisfy 0 <= TH2 <= TH1 <= 1 (got TH1=" +
                      format_number(th1) + ", TH2=" + format_number(th2) + ")");
  }
}

/// Data-driven steps of the harmonization protocol. A cell survives a
/// threshold when its count is positive and its conditional probability is
/// >= the threshold. Rows or
/// columns with zero marginal get all-zero conditionals.
inline HarmonizationTrace harmonize(const ContingencyTable& table, double th1, double th2) {
  check_thresholds(th1, th2);
  const std::size_t tc = table.counts.rows();
  const std::size_t rc = table.counts.cols();
  if (table.test.size() != tc || table.reference.size() != rc) {
    throw DimensionError("contingency counts do not match their dictionaries");
  }
  const auto n = table.total();
  if (n == 0) throw DataError("contingency table is empty");
  const auto row = table.row_sums();
  const auto col = table.column_sums();

  HarmonizationTrace tr{table,
                        Probabilities(tc, rc, 0.0),
                        Probabilities(tc, rc, 0.0),
                        BinaryMatrix(tc, rc, 0),
                        Probabilities(tc, rc, 0.0),
                        BinaryMatrix(tc, rc, 0),
                        BinaryMatrix(tc, rc, 0),
                        th1,
                        th2};
  for (std::size_t t = 0; t < tc; ++t) {
    for (std::size_t r = 0; r < rc; ++r) {
      const auto k = static_cast<double>(table.counts(t, r));
      tr.joint(t, r) = k / static_cast<double>(n);
      if (row[t]) tr.given_test(t, r) = k / static_cast<double>(row[t]);
      if (col[r]) tr.given_ref(t, r) = k / static_cast<double>(col[r]);
      // Zero-count cells never become data-driven candidates, even at TH = 0.
      tr.given_test_cut(t, r) = k > 0 && tr.given_test(t, r) >= th1;
      tr.given_ref_cut(t, r) = k > 0 && tr.given_ref(t, r) >= th2;
      tr.candidate(t, r) = tr.given_test_cut(t, r) | tr.given_ref_cut(t, r);
    }
  }
  return tr;
}

/// Expert decision on one cell, with its mandatory rationale.
struct Override {
  std::size_t test = 0;       ///< row position
  std::size_t reference = 0;  ///< column position
  std::uint8_t value = 0;
  std::string note;
};

struct AuditEntry {
  std::string test_name;
  std::string reference_name;
  std::uint8_t before = 0;
  std::uint8_t after = 0;
  std::string note;
};

struct OverrideResult {
  LegendRelation relation;
  std::vector<AuditEntry> audit;
};

/// Final relation: each override replaces its cell; every override is
/// logged, including those that leave the cell unchanged.
inline OverrideResult apply_overrides(const HarmonizationTrace& trace,
                                      const std::vector<Override>& overrides) {
  OverrideResult out{trace.candidate_relation(), {}};
  auto& m = out.relation.correct;
  std::vector<std::uint8_t> seen(m.size(), 0);
  for (const auto& o : overrides) {
    if (o.test >= m.rows() || o.reference >= m.cols()) {
      throw ConfigError("override cell (" + std::to_string(o.test) + ", " +
                        std::to_string(o.reference) + ") is outside the " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " table");
    }
    if (o.value > 1) throw ConfigError("override value must be 0 or 1");
    if (o.note.empty()) throw ConfigError("override without a note");
    auto& flag = seen[o.test * m.cols() + o.reference];
    if (flag) {
      throw ConfigError("duplicate override for (" + out.relation.test[o.test].name + ", " +
                        out.relation.reference[o.reference].name + ")");
    }
    flag = 1;
    out.audit.push_back({out.relation.test[o.test].name, out.relation.reference[o.reference].name,
                         m(o.test, o.reference), o.value, o.note});
    m(o.test, o.reference) = o.value;
  }
  return out;
}

/// Membership of a row with j correct entries: 1 at j == 1, Gaussian decay
/// with standard deviation RC/3 above that, 0 for an empty row.
inline double row_membership(std::size_t j, std::size_t reference_size) {
  if (j == 0) return 0.0;
  const double sd = static_cast<double>(reference_size) / 3.0;
  const double d = static_cast<double>(j) - 1.0;
  return std::exp(-(d * d) / (2.0 * sd * sd));
}

/// Categorical variable pair association index in [0, 1].
inline double cvpai2(const BinaryMatrix& correct) {
  const std::size_t tc = correct.rows();
  const std::size_t rc = correct.cols();
  if (tc == 0 || rc == 0) throw ConfigError("cvpai2 of an empty relation");
  double sum = 0.0;
  for (std::size_t r = 0; r < rc; ++r) {
    bool covered = false;
    for (std::size_t t = 0; t < tc && !covered; ++t) covered = correct(t, r) != 0;
    sum += covered ? 1.0 : 0.0;
  }
  for (std::size_t t = 0; t < tc; ++t) {
    std::size_t j = 0;
    for (std::size_t r = 0; r < rc; ++r) j += correct(t, r) != 0;
    sum += row_membership(j, rc);
  }
  return sum / static_cast<double>(tc + rc);
}

inline double cvpai2(const LegendRelation& rel) {
  rel.validate();
  return cvpai2(rel.correct);
}

/// Relabels a map through a child -> parent function over its legend.
inline CategoricalMap translate_legend(const CategoricalMap& map, const LegendMapping& mapping) {
  return relabel(map, mapping);
}

// ---------------------------------------------------------------------------
// CSV interchange: a corner cell, reference names across, test names down.

namespace detail {

/// Finds a dictionary entry by name, else by numeric label.
inline std::optional<std::size_t> find_entry(const Legend& legend, const std::string& key) {
  if (auto i = legend.index_of_name(key)) return i;
  if (auto l = parse_integer<Label>(key)) return legend.index_of(*l);
  return std::nullopt;
}

template <typename T, typename Fmt>
std::vector<csv::Row> matrix_rows(const Legend& test, const Legend& reference, const Grid<T>& m,
                                  Fmt fmt) {
  std::vector<csv::Row> rows;
  csv::Row head{"test\\reference"};
  for (const auto& e : reference.entries()) head.push_back(e.name);
  rows.push_back(std::move(head));
  for (std::size_t t = 0; t < m.rows(); ++t) {
    csv::Row row{test[t].name};
    for (std::size_t r = 0; r < m.cols(); ++r) row.push_back(fmt(m(t, r)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

template <typename T>
std::string matrix_csv(const Legend& test, const Legend& reference, const Grid<T>& m) {
  std::string out;
  const auto rows = detail::matrix_rows(test, reference, m, [](T v) {
    if constexpr (std::is_floating_point_v<T>) {
      return format_number(v);
    } else {
      return std::to_string(static_cast<std::uint64_t>(v));
    }
  });
  for (const auto& row : rows) out += csv::format_row(row);
  return out;
}

inline std::string to_csv(const ContingencyTable& table) {
  return matrix_csv(table.test, table.reference, table.counts);
}

inline std::string to_csv(const LegendRelation& rel) {
  return matrix_csv(rel.test, rel.reference, rel.correct);
}

/// Count matrix from CSV rows. Dictionaries get labels 1..n in file order.
inline ContingencyTable counts_from_rows(const std::vector<csv::Row>& rows) {
  if (rows.size() < 2 || rows[0].size() < 2) {
    throw FormatError("count matrix needs a header row and at least one data row");
  }
  const std::vector<std::string> ref_names(rows[0].begin() + 1, rows[0].end());
  std::vector<std::string> test_names;
  const std::size_t rc = ref_names.size();
  Counts counts(rows.size() - 1, rc, 0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != rc + 1) {
      throw FormatError("count matrix row " + std::to_string(i + 1) + " has " +
                        std::to_string(row.size()) + " cells, expected " + std::to_string(rc + 1));
    }
    test_names.push_back(row[0]);
    for (std::size_t r = 0; r < rc; ++r) {
      const auto v = parse_integer<std::uint64_t>(row[r + 1]);
      if (!v) {
        throw FormatError("count matrix row " + std::to_string(i + 1) + ": '" + row[r + 1] +
                          "' is not a non-negative integer");
      }
      counts(i - 1, r) = *v;
    }
  }
  return {Legend::from_names(test_names), Legend::from_names(ref_names), std::move(counts)};
}

/// Relation matrix from CSV rows with 0/1 cells.
inline LegendRelation relation_from_rows(const std::vector<csv::Row>& rows) {
  const ContingencyTable t = counts_from_rows(rows);
  LegendRelation rel{t.test, t.reference, BinaryMatrix(t.counts.rows(), t.counts.cols(), 0)};
  for (std::size_t i = 0; i < t.counts.size(); ++i) {
    if (t.counts.values()[i] > 1) throw FormatError("relation cells must be 0 or 1");
    rel.correct.values()[i] = static_cast<std::uint8_t>(t.counts.values()[i]);
  }
  return rel;
}

inline LegendRelation load_relation_csv(const std::string& path) {
  return relation_from_rows(csv::load(path));
}

inline ContingencyTable parse_counts_csv(std::string_view text) {
  return counts_from_rows(csv::parse(text));
}

inline ContingencyTable load_counts_csv(const std::string& path) {
  return counts_from_rows(csv::load(path));
}

/// Reads `test_label,reference_label,value,note`. Labels match dictionary
/// names first, then numeric labels. A leading header row is skipped.
inline std::vector<Override> parse_overrides(const std::vector<csv::Row>& rows, const Legend& test,
                                             const Legend& reference) {
  std::vector<Override> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (i == 0 && row.size() >= 3 && row[0] == "test_label") continue;
    const std::string where = "override row " + std::to_string(i + 1);
    if (row.size() != 4) throw FormatError(where + ": expected 4 fields, got " + std::to_string(row.size()));
    const auto t = detail::find_entry(test, row[0]);
    if (!t) throw ConfigError(where + ": unknown test label '" + row[0] + "'");
    const auto r = detail::find_entry(reference, row[1]);
    if (!r) throw ConfigError(where + ": unknown reference label '" + row[1] + "'");
    if (row[2] != "0" && row[2] != "1") throw FormatError(where + ": value must be 0 or 1");
    out.push_back({*t, *r, static_cast<std::uint8_t>(row[2] == "1"), row[3]});
  }
  return out;
}

inline std::vector<Override> load_overrides(const std::string& path, const Legend& test,
                                            const Legend& reference) {
  return parse_overrides(csv::load(path), test, reference);
}

}  // namespace staticcolor
