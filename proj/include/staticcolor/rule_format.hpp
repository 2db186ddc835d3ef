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

#include "staticcolor/header.hpp"
#include "staticcolor/rules.hpp"

namespace staticcolor {

namespace detail {

inline const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::LessEqual: return "<=";
    case CmpOp::GreaterEqual: return ">=";
    case CmpOp::Less: return "<";
    case CmpOp::Greater: return ">";
  }
  return "?";
}

inline int arith_precedence(const Expr& e) {
  switch (e.kind) {
    case NodeKind::Sum:
    case NodeKind::Diff: return 1;
    case NodeKind::Ratio: return 2;
    default: return 3;
  }
}

inline std::string format_arith(const Expr& e, const RuleSet& rs) {
  switch (e.kind) {
    case NodeKind::BandRef: return rs.bands.at(e.band).symbol;
    case NodeKind::Constant: return format_number(e.value);
    default: break;
  }
  const int prec = arith_precedence(e);
  std::string lhs = format_arith(e.children[0], rs);
  std::string rhs = format_arith(e.children[1], rs);
  // Left-associative: the right operand needs parentheses at equal precedence.
  if (arith_precedence(e.children[0]) < prec) lhs = "(" + lhs + ")";
  if (arith_precedence(e.children[1]) <= prec) rhs = "(" + rhs + ")";
  const char* op = e.kind == NodeKind::Ratio ? " / " : e.kind == NodeKind::Sum ? " + " : " - ";
  return lhs + op + rhs;
}

inline bool is_chain(const Expr& e) {
  return e.kind == NodeKind::And && e.children.size() == 2 &&
         e.children[0].kind == NodeKind::Compare && e.children[1].kind == NodeKind::Compare &&
         e.children[0].children[1] == e.children[1].children[0];
}

inline std::string format_bool(const Expr& e, const RuleSet& rs);

// Children of AND/OR that are themselves AND/OR keep their grouping.
inline std::string format_operand(const Expr& e, const RuleSet& rs) {
  const bool group = (e.kind == NodeKind::And && !is_chain(e)) || e.kind == NodeKind::Or;
  const std::string text = format_bool(e, rs);
  return group ? "(" + text + ")" : text;
}

inline std::string format_bool(const Expr& e, const RuleSet& rs) {
  switch (e.kind) {
    case NodeKind::Compare:
      return format_arith(e.children[0], rs) + " " + cmp_text(e.op) + " " +
             format_arith(e.children[1], rs);
    case NodeKind::And:
    case NodeKind::Or: {
      if (is_chain(e)) {
        const auto& a = e.children[0];
        const auto& b = e.children[1];
        return format_arith(a.children[0], rs) + " " + cmp_text(a.op) + " " +
               format_arith(a.children[1], rs) + " " + cmp_text(b.op) + " " +
               format_arith(b.children[1], rs);
      }
      const char* sep = e.kind == NodeKind::And ? " AND " : " OR ";
      std::string out;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += sep;
        out += format_operand(e.children[i], rs);
      }
      return out;
    }
    case NodeKind::RequiresBand:
      return "requires " + rs.bands.at(e.band).symbol + " (" +
             format_bool(e.children[0], rs) + ")";
    default:
      return format_arith(e, rs);
  }
}

inline std::string format_class_head(const char* keyword, const Rule& rule) {
  std::string name;
  for (char ch : rule.name) {
    if (ch == '"' || ch == '\\') name += '\\';
    name += ch;
  }
  return std::string(keyword) + " " + std::to_string(rule.index) + " \"" + name + "\" color " +
         rule.color.hex();
}

}  // namespace detail

/// Text of one expression in rule-file syntax.
inline std::string format_expr(const Expr& e, const RuleSet& rs) {
  return detail::format_bool(e, rs);
}

/// Canonical rule-file text; parse_rules(format_rules(rs)) == rs.
inline std::string format_rules(const RuleSet& rs) {
  std::string out = "bands: ";
  for (std::size_t i = 0; i < rs.bands.size(); ++i) {
    if (i) out += ", ";
    out += rs.bands[i].symbol + "@" + format_number(rs.bands[i].wavelength);
    if (rs.bands[i].optional) out += "?";
  }
  out += "\npolicy ";
  out += to_string(rs.policy);
  out += "\n\n";
  for (const auto& rule : rs.rules) {
    if (rule.expr) {
      out += detail::format_class_head("rule", rule) + " {\n  " + format_expr(*rule.expr, rs) +
             "\n}\n";
    } else {
      out += detail::format_class_head("class", rule) + "\n";
    }
  }
  out += detail::format_class_head("fallback", rs.fallback) + "\n";
  return out;
}

}  // namespace staticcolor
