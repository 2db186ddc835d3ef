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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "staticcolor/errors.hpp"
#include "staticcolor/legend.hpp"

namespace staticcolor {

enum class CmpOp { LessEqual, GreaterEqual, Less, Greater };

enum class NodeKind {
  BandRef,       // numeric: value of a declared band
  Constant,      // numeric
  Ratio,         // numeric: children[0] / children[1]
  Sum,           // numeric: children[0] + children[1]
  Diff,          // numeric: children[0] - children[1]
  Compare,       // boolean: children[0] op children[1]
  And,           // boolean: all children
  Or,            // boolean: any child
  RequiresBand,  // boolean: children[0], evaluated only when `band` is present
};

/// Spectral rule expression tree. `band` indexes the rule set's declared
/// bands (BandRef, RequiresBand); `value` holds a Constant.
struct Expr {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;
  std::size_t band = 0;
  CmpOp op = CmpOp::LessEqual;
  std::vector<Expr> children;

  static Expr band_ref(std::size_t band) {
    Expr e;
    e.kind = NodeKind::BandRef;
    e.band = band;
    return e;
  }
  static Expr constant(double value) {
    Expr e;
    e.kind = NodeKind::Constant;
    e.value = value;
    return e;
  }
  static Expr binary(NodeKind kind, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = kind;
    e.children.push_back(std::move(lhs));
    e.children.push_back(std::move(rhs));
    return e;
  }
  static Expr ratio(Expr num, Expr den) { return binary(NodeKind::Ratio, std::move(num), std::move(den)); }
  static Expr sum(Expr a, Expr b) { return binary(NodeKind::Sum, std::move(a), std::move(b)); }
  static Expr diff(Expr a, Expr b) { return binary(NodeKind::Diff, std::move(a), std::move(b)); }
  static Expr compare(Expr lhs, CmpOp op, Expr rhs) {
    Expr e = binary(NodeKind::Compare, std::move(lhs), std::move(rhs));
    e.op = op;
    return e;
  }
  static Expr all_of(std::vector<Expr> terms) {
    Expr e;
    e.kind = NodeKind::And;
    e.children = std::move(terms);
    return e;
  }
  static Expr any_of(std::vector<Expr> terms) {
    Expr e;
    e.kind = NodeKind::Or;
    e.children = std::move(terms);
    return e;
  }
  static Expr requires_band(std::size_t band, Expr body) {
    Expr e;
    e.kind = NodeKind::RequiresBand;
    e.band = band;
    e.children.push_back(std::move(body));
    return e;
  }

  bool is_numeric() const noexcept {
    return kind == NodeKind::BandRef || kind == NodeKind::Constant || kind == NodeKind::Ratio ||
           kind == NodeKind::Sum || kind == NodeKind::Diff;
  }

  friend bool operator==(const Expr&, const Expr&) = default;
};

/// A band symbol declared in a rule file preamble, e.g. `b5@1.6`.
/// Symbols are `b<N>` and bind to the image band whose id is N.
struct BandDecl {
  std::string symbol;
  int band_id = 0;
  double wavelength = 0.0;  ///< micrometers
  bool optional = false;

  friend bool operator==(const BandDecl&, const BandDecl&) = default;
};

struct Rule {
  int index = 0;
  std::string name;
  Rgb color;
  std::optional<Expr> expr;  ///< empty for declared-but-ruleless classes

  friend bool operator==(const Rule&, const Rule&) = default;
};

enum class MatchPolicy { LastMatch, FirstMatch };

inline std::string_view to_string(MatchPolicy policy) noexcept {
  return policy == MatchPolicy::LastMatch ? "last-match" : "first-match";
}

inline MatchPolicy parse_match_policy(std::string_view text) {
  if (text == "last-match") return MatchPolicy::LastMatch;
  if (text == "first-match") return MatchPolicy::FirstMatch;
  throw ConfigError("unknown match policy '" + std::string(text) + "'");
}

/// Ordered decision list. `rules` is sorted by index and also carries the
/// ruleless classes; `fallback` is assigned when no rule fires.
struct RuleSet {
  std::vector<BandDecl> bands;
  std::vector<Rule> rules;
  Rule fallback;
  MatchPolicy policy = MatchPolicy::LastMatch;

  Legend legend() const {
    std::vector<LegendEntry> entries;
    for (const auto& rule : rules) {
      entries.push_back({static_cast<Label>(rule.index), rule.name, rule.color});
    }
    entries.push_back({static_cast<Label>(fallback.index), fallback.name, fallback.color});
    return Legend(std::move(entries));
  }

  const Rule* find(int index) const noexcept {
    for (const auto& rule : rules) {
      if (rule.index == index) return &rule;
    }
    return fallback.index == index ? &fallback : nullptr;
  }

  std::optional<std::size_t> band_index(std::string_view symbol) const noexcept {
    for (std::size_t i = 0; i < bands.size(); ++i) {
      if (bands[i].symbol == symbol) return i;
    }
    return std::nullopt;
  }

  friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

/// Denominators smaller than this in magnitude make a ratio undefined.
inline constexpr double kRatioEpsilon = 1e-9;

/// Three-valued outcome: a clause guarded on an absent band is Dropped and
/// leaves its enclosing AND/OR as if it were not written.
enum class Truth : std::uint8_t { False, True, Dropped };

/// Band values for one pixel, indexed by declared band. `present[k] == 0`
/// means the image has no such band.
struct PixelContext {
  std::span<const double> values;
  std::span<const std::uint8_t> present;

  bool has(std::size_t band) const noexcept { return present.empty() || present[band] != 0; }
};

/// Numeric value of a subtree, or nullopt when undefined (ratio with a
/// near-zero denominator, absent band).
inline std::optional<double> eval_numeric(const Expr& e, const PixelContext& px) {
  switch (e.kind) {
    case NodeKind::BandRef:
      if (!px.has(e.band)) return std::nullopt;
      return px.values[e.band];
    case NodeKind::Constant:
      return e.value;
    case NodeKind::Ratio: {
      const auto num = eval_numeric(e.children[0], px);
      const auto den = eval_numeric(e.children[1], px);
      if (!num || !den || std::fabs(*den) < kRatioEpsilon) return std::nullopt;
      return *num / *den;
    }
    case NodeKind::Sum:
    case NodeKind::Diff: {
      const auto a = eval_numeric(e.children[0], px);
      const auto b = eval_numeric(e.children[1], px);
      if (!a || !b) return std::nullopt;
      return e.kind == NodeKind::Sum ? *a + *b : *a - *b;
    }
    default:
      return std::nullopt;
  }
}

inline Truth eval_truth(const Expr& e, const PixelContext& px) {
  switch (e.kind) {
    case NodeKind::Compare: {
      const auto a = eval_numeric(e.children[0], px);
      const auto b = eval_numeric(e.children[1], px);
      if (!a || !b) return Truth::False;
      bool ok = false;
      switch (e.op) {
        case CmpOp::LessEqual: ok = *a <= *b; break;
        case CmpOp::GreaterEqual: ok = *a >= *b; break;
        case CmpOp::Less: ok = *a < *b; break;
        case CmpOp::Greater: ok = *a > *b; break;
      }
      return ok ? Truth::True : Truth::False;
    }
    case NodeKind::And: {
      bool any = false;
      for (const auto& child : e.children) {
        const Truth t = eval_truth(child, px);
        if (t == Truth::False) return Truth::False;
        any = any || t == Truth::True;
      }
      return any ? Truth::True : Truth::Dropped;
    }
    case NodeKind::Or: {
      bool any = false;
      for (const auto& child : e.children) {
        const Truth t = eval_truth(child, px);
        if (t == Truth::True) return Truth::True;
        any = any || t == Truth::False;
      }
      return any ? Truth::False : Truth::Dropped;
    }
    case NodeKind::RequiresBand:
      if (!px.has(e.band)) return Truth::Dropped;
      return eval_truth(e.children[0], px);
    default:
      throw ConfigError("numeric expression used where a condition is expected");
  }
}

/// A rule fires only when its expression is True; an expression that is
/// Dropped as a whole carries no evidence and does not fire.
inline bool eval_rule(const Expr& e, const PixelContext& px) {
  return eval_truth(e, px) == Truth::True;
}

inline bool eval_rule(const Expr& e, std::span<const double> pixel) {
  return eval_rule(e, PixelContext{pixel, {}});
}

/// Label assigned to one pixel by the rule set under its match policy.
inline int decide(const RuleSet& rules, const PixelContext& px) {
  if (rules.policy == MatchPolicy::LastMatch) {
    for (auto it = rules.rules.rbegin(); it != rules.rules.rend(); ++it) {
      if (it->expr && eval_rule(*it->expr, px)) return it->index;
    }
  } else {
    for (const auto& rule : rules.rules) {
      if (rule.expr && eval_rule(*rule.expr, px)) return rule.index;
    }
  }
  return rules.fallback.index;
}

}  // namespace staticcolor
