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

// Independent reference implementations used by the tests. None of these
// share code with the library beyond plain data types.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

/// Reflectances in band order b1, b2, b3, b4, b5, b7.
using Pixel = std::array<double, 6>;

namespace detail {
constexpr double kEps = 1e-9;
inline bool ratio_ok(double d) { return std::fabs(d) >= kEps; }
}  // namespace detail

/// Which of the 17 spectral rules fire, hand-coded straight from the rule
/// table. A ratio with a near-zero denominator makes its comparison false.
/// The b7 branch of rules 13 and 14 is skipped when b7 is absent.
inline std::array<bool, 18> specl_fires(const Pixel& p, bool has_b7) {
  const double b1 = p[0], b2 = p[1], b3 = p[2], b4 = p[3], b5 = p[4], b7 = p[5];
  using detail::ratio_ok;
  const bool d3 = ratio_ok(b3), d4 = ratio_ok(b4), d5 = ratio_ok(b5);
  const double r43 = d3 ? b4 / b3 : 0, r14 = d4 ? b1 / b4 : 0, r45 = d5 ? b4 / b5 : 0;
  const double r23 = d3 ? b2 / b3 : 0, r54 = d4 ? b5 / b4 : 0, r75 = d5 ? b7 / b5 : 0;
  std::array<bool, 18> f{};
  f[1] = d3 && r43 <= 1.3 && b3 >= 0.2 && b5 <= 0.12;
  f[2] = b4 >= 0.25 && d4 && 0.85 <= r14 && r14 <= 1.15 && d5 && r45 >= 0.9 && b5 >= 0.2;
  f[3] = b4 >= 0.15 && d3 && 1.3 <= r43 && r43 <= 3.0;
  f[4] = f[3] && b2 <= 0.10;
  const bool veg = d3 && r43 >= 3.0 && ((d3 && r23 >= 0.8) || b3 <= 0.15);
  f[5] = veg && 0.28 <= b4 && b4 <= 0.45;
  f[6] = veg && b4 >= 0.45;
  f[7] = veg && b3 <= 0.08 && b4 <= 0.28;
  f[8] = d3 && r43 >= 2.0 && b2 >= b3 && b3 >= 0.08 && d5 && r45 >= 1.5;
  f[9] = d3 && 2.0 <= r43 && r43 <= 3.0 && 0.05 <= b3 && b3 <= 0.15 && b4 >= 0.15;
  f[10] = d3 && r43 <= 1.6 && 0.05 <= b3 && b3 <= 0.20 && 0.05 <= b4 && b4 <= 0.20 &&
          0.05 <= b5 && b5 <= 0.25 && d4 && r54 >= 0.7;
  f[11] = d3 && r43 <= 2.0 && b4 >= 0.15 && b5 >= 0.15;
  f[12] = d3 && r43 <= 2.0 && b4 >= 0.15 && (b4 >= 0.25 || b5 >= 0.30);
  const bool dry_a = d3 && 1.7 <= r43 && r43 <= 2.0 && b4 >= 0.25;
  const bool dry_b = has_b7 && d3 && 1.4 <= r43 && r43 <= 2.0 && d5 && r75 <= 0.83;
  f[13] = dry_a || dry_b;
  const bool sparse_a = d3 && 1.4 <= r43 && r43 <= 1.7 && b4 >= 0.25;
  const bool sparse_b = has_b7 && d3 && 1.4 <= r43 && r43 <= 2.0 && d5 && r75 <= 0.83 && d4 &&
                        r54 >= 1.2;
  f[14] = sparse_a || sparse_b;
  f[15] = b4 <= 0.11 && b5 <= 0.05;
  f[16] = b4 <= 0.02 && b5 <= 0.02;
  f[17] = b3 >= 0.02 && b3 >= b4 + 0.005 && b5 <= 0.02;
  return f;
}

/// Class index: highest (last-match) or lowest (first-match) firing rule,
/// else 19.
inline int specl_class(const Pixel& p, bool has_b7, bool last_match = true) {
  const auto f = specl_fires(p, has_b7);
  if (last_match) {
    for (int i = 17; i >= 1; --i) {
      if (f[i]) return i;
    }
  } else {
    for (int i = 1; i <= 17; ++i) {
      if (f[i]) return i;
    }
  }
  return 19;
}

/// Row-major label raster.
template <typename L>
struct Raster {
  std::size_t rows = 0, cols = 0;
  std::vector<L> v;
  L& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  const L& at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

/// Breadth-first flood fill. Ids start at 1 in order of first pixel in
/// row-major order; nodata pixels get 0.
template <typename L>
std::pair<std::vector<std::uint32_t>, std::uint32_t> flood_fill(const Raster<L>& m, L nodata,
                                                                 int adjacency) {
  std::vector<std::uint32_t> id(m.v.size(), 0);
  std::uint32_t next = 0;
  const int n = adjacency;
  const int dr8[8] = {-1, -1, -1, 0, 0, 1, 1, 1}, dc8[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  const int dr4[4] = {-1, 0, 0, 1}, dc4[4] = {0, -1, 1, 0};
  const int* dr = n == 8 ? dr8 : dr4;
  const int* dc = n == 8 ? dc8 : dc4;
  for (std::size_t s = 0; s < m.v.size(); ++s) {
    if (id[s] || m.v[s] == nodata) continue;
    id[s] = ++next;
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty()) {
      const std::size_t p = q.front();
      q.pop();
      const long r = static_cast<long>(p / m.cols), c = static_cast<long>(p % m.cols);
      for (int k = 0; k < n; ++k) {
        const long nr = r + dr[k], nc = c + dc[k];
        if (nr < 0 || nc < 0 || nr >= static_cast<long>(m.rows) || nc >= static_cast<long>(m.cols)) continue;
        const std::size_t np = static_cast<std::size_t>(nr) * m.cols + static_cast<std::size_t>(nc);
        if (id[np] || m.v[np] != m.v[p]) continue;
        id[np] = next;
        q.push(np);
      }
    }
  }
  return {id, next};
}

/// True when a bijection between the two id sets maps one onto the other
/// (0 must map to 0).
template <typename A, typename B>
bool same_partition(const std::vector<A>& a, const std::vector<B>& b) {
  if (a.size() != b.size()) return false;
  std::map<A, B> fwd;
  std::map<B, A> back;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] == 0) != (b[i] == 0)) return false;
    auto [f, fi] = fwd.emplace(a[i], b[i]);
    auto [g, gi] = back.emplace(b[i], a[i]);
    if (f->second != b[i] || g->second != a[i]) return false;
  }
  return true;
}

/// Per-cell neighbor tally of differing non-nodata labels.
template <typename L>
std::vector<int> aura(const Raster<L>& m, L nodata, int adjacency) {
  std::vector<int> out(m.v.size(), 0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (m.at(r, c) == nodata) continue;
      int count = 0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          if (adjacency == 4 && dr != 0 && dc != 0) continue;
          const long nr = static_cast<long>(r) + dr, nc = static_cast<long>(c) + dc;
          if (nr < 0 || nc < 0 || nr >= static_cast<long>(m.rows) || nc >= static_cast<long>(m.cols)) continue;
          const L o = m.at(static_cast<std::size_t>(nr), static_cast<std::size_t>(nc));
          if (o != nodata && o != m.at(r, c)) ++count;
        }
      }
      out[r * m.cols + c] = count;
    }
  }
  return out;
}

/// Group-by mean of `values` keyed by `keys` (key 0 skipped).
inline std::map<std::uint32_t, double> group_mean(const std::vector<std::uint32_t>& keys,
                                                  const std::vector<double>& values) {
  std::map<std::uint32_t, std::pair<long double, std::size_t>> acc;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!keys[i]) continue;
    acc[keys[i]].first += values[i];
    acc[keys[i]].second += 1;
  }
  std::map<std::uint32_t, double> out;
  for (const auto& [k, s] : acc) out[k] = static_cast<double>(s.first / s.second);
  return out;
}

/// Two-pass scalar statistics (population standard deviation).
struct Summary {
  double min = 0, max = 0, mean = 0, stdev = 0;
  std::size_t count = 0;
};

inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  s.min = xs[0];
  s.max = xs[0];
  long double sum = 0;
  for (double x : xs) {
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
    sum += x;
  }
  s.mean = static_cast<double>(sum / xs.size());
  long double ss = 0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stdev = std::sqrt(static_cast<double>(ss / xs.size()));
  return s;
}

/// Pixel tally of co-occurring labels, keyed by (test, reference).
template <typename L>
std::map<std::pair<L, L>, std::uint64_t> tally(const Raster<L>& test, const Raster<L>& ref, L nodata) {
  std::map<std::pair<L, L>, std::uint64_t> out;
  for (std::size_t i = 0; i < test.v.size(); ++i) {
    if (test.v[i] == nodata || ref.v[i] == nodata) continue;
    ++out[{test.v[i], ref.v[i]}];
  }
  return out;
}

/// Closed-form association index: column coverage plus Gaussian row
/// penalty, written independently from the library.
inline double association_index(const std::vector<std::vector<int>>& m) {
  const std::size_t tc = m.size(), rc = m[0].size();
  double total = 0;
  for (std::size_t r = 0; r < rc; ++r) {
    int col = 0;
    for (std::size_t t = 0; t < tc; ++t) col += m[t][r];
    total += col > 0 ? 1 : 0;
  }
  const double sigma = rc / 3.0;
  for (std::size_t t = 0; t < tc; ++t) {
    int row = 0;
    for (int x : m[t]) row += x;
    if (row > 0) total += std::exp(-0.5 * std::pow((row - 1) / sigma, 2));
  }
  return total / static_cast<double>(tc + rc);
}

}  // namespace oracle
