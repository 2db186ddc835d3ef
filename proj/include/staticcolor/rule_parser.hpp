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
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "staticcolor/errors.hpp"
#include "staticcolor/header.hpp"
#include "staticcolor/rules.hpp"

namespace staticcolor {

/*
 * Rule file grammar (informal):
 *
 *   file       ::= { statement }
 *   statement  ::= "bands" ":" band { "," band }
 *                | "policy" ( "last-match" | "first-match" )
 *                | "rule" INT STRING [ "color" HEX ] "{" or_expr "}"
 *                | "class" INT STRING [ "color" HEX ]          -- ruleless class
 *                | "fallback" INT STRING [ "color" HEX ]
 *   band       ::= IDENT "@" NUMBER [ "?" ]                   -- "?" marks optional
 *   or_expr    ::= and_expr { "OR" and_expr }
 *   and_expr   ::= unary { "AND" unary }
 *   unary      ::= comparison
 *                | "requires" IDENT { "," IDENT } "(" or_expr ")"
 *                | "(" or_expr ")"
 *   comparison ::= arith CMP arith [ CMP arith ]              -- chains desugar to AND
 *   arith      ::= term { ("+" | "-") term }
 *   term       ::= factor { "/" factor }
 *   factor     ::= NUMBER | "-" NUMBER | IDENT | "(" arith ")"
 *   CMP        ::= "<=" | ">=" | "<" | ">" | "≤" | "≥"
 *
 * "#" followed by whitespace (or at end of line) starts a comment; "#" followed
 * by six hex digits is a color. AND/OR are case-insensitive.
 */
namespace detail {

enum class Tok {
  End, Ident, Number, String, Color, LBrace, RBrace, LParen, RParen, Comma, Colon, At,
  Question, Slash, Plus, Minus, Cmp
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  CmpOp op = CmpOp::LessEqual;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      Token t;
      t.line = line_;
      t.column = column_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      const char ch = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        t.kind = Tok::Ident;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                      src_[pos_] == '_')) {
          t.text += src_[pos_];
          advance();
        }
      } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
        lex_number(t);
      } else if (ch == '"') {
        lex_string(t);
      } else if (ch == '#') {
        t.kind = Tok::Color;
        t.text = std::string(src_.substr(pos_, 7));
        for (std::size_t i = 0; i < t.text.size(); ++i) advance();
        if (!Rgb::parse_hex(t.text)) fail("malformed color '" + t.text + "'", t);
      } else if (src_.substr(pos_, 2) == "<=" || src_.substr(pos_, 2) == ">=") {
        t.kind = Tok::Cmp;
        t.op = ch == '<' ? CmpOp::LessEqual : CmpOp::GreaterEqual;
        advance();
        advance();
      } else if (src_.substr(pos_, 3) == "≤" || src_.substr(pos_, 3) == "≥") {
        t.kind = Tok::Cmp;
        t.op = src_.substr(pos_, 3) == "≤" ? CmpOp::LessEqual : CmpOp::GreaterEqual;
        advance_bytes(3);
      } else {
        advance();
        switch (ch) {
          case '{': t.kind = Tok::LBrace; break;
          case '}': t.kind = Tok::RBrace; break;
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case ',': t.kind = Tok::Comma; break;
          case ':': t.kind = Tok::Colon; break;
          case '@': t.kind = Tok::At; break;
          case '?': t.kind = Tok::Question; break;
          case '/': t.kind = Tok::Slash; break;
          case '+': t.kind = Tok::Plus; break;
          case '-': t.kind = Tok::Minus; break;
          case '<': t.kind = Tok::Cmp; t.op = CmpOp::Less; break;
          case '>': t.kind = Tok::Cmp; t.op = CmpOp::Greater; break;
          default: fail(std::string("unexpected character '") + ch + "'", t);
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] static void fail(const std::string& msg, const Token& at) {
    throw ParseError(msg, at.line, at.column);
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
      ++column_;
    }
    ++pos_;
  }
  void advance_bytes(std::size_t n) {
    pos_ += n;
    ++column_;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const char ch = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        advance();
      } else if (ch == '#' && (pos_ + 1 >= src_.size() ||
                               std::isspace(static_cast<unsigned char>(src_[pos_ + 1])) ||
                               src_[pos_ + 1] == '#')) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  void lex_number(Token& t) {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
      advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    }
    t.kind = Tok::Number;
    t.text = std::string(src_.substr(start, pos_ - start));
    const auto value = parse_double(t.text);
    if (!value) fail("malformed number '" + t.text + "'", t);
    t.number = *value;
  }

  void lex_string(Token& t) {
    advance();
    t.kind = Tok::String;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') fail("unterminated string", t);
      const char ch = src_[pos_];
      advance();
      if (ch == '"') return;
      if (ch == '\\' && pos_ < src_.size()) {
        t.text += src_[pos_];
        advance();
      } else {
        t.text += ch;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

inline bool keyword(const Token& t, std::string_view word) {
  if (t.kind != Tok::Ident || t.text.size() != word.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(t.text[i])) != word[i]) return false;
  }
  return true;
}

class RuleParser {
 public:
  explicit RuleParser(std::string_view text) : tokens_(Lexer(text).run()) {}

  RuleSet run() {
    if (peek().kind == Tok::End) fail("empty rule file", peek());
    RuleSet set;
    bool have_fallback = false;
    bool have_policy = false;
    std::set<int> indices;
    auto claim_index = [&](int index, const Token& at) {
      if (index < 1 || index > 65535) fail("class index must be in 1..65535", at);
      if (!indices.insert(index).second) fail("duplicate class index " + std::to_string(index), at);
    };

    while (peek().kind != Tok::End) {
      const Token& head = peek();
      if (keyword(head, "bands")) {
        if (!rules_.bands.empty()) fail("bands declared twice", head);
        next();
        expect(Tok::Colon, "':' after 'bands'");
        parse_band_list();
        set.bands = rules_.bands;
      } else if (keyword(head, "policy")) {
        if (have_policy) fail("policy declared twice", head);
        next();
        std::string name = expect(Tok::Ident, "policy name").text;
        while (peek().kind == Tok::Minus) {
          next();
          name += "-" + expect(Tok::Ident, "policy name").text;
        }
        if (name == "last-match") set.policy = MatchPolicy::LastMatch;
        else if (name == "first-match") set.policy = MatchPolicy::FirstMatch;
        else fail("unknown policy '" + name + "'", head);
        have_policy = true;
      } else if (keyword(head, "rule") || keyword(head, "class") || keyword(head, "fallback")) {
        const bool is_rule = keyword(head, "rule");
        const bool is_fallback = keyword(head, "fallback");
        next();
        const Token& index_tok = expect(Tok::Number, "class index");
        const auto index = parse_integer<int>(index_tok.text);
        if (!index) fail("class index must be an integer", index_tok);
        claim_index(*index, index_tok);
        Rule rule;
        rule.index = *index;
        rule.name = expect(Tok::String, "quoted class name").text;
        if (keyword(peek(), "color")) {
          next();
          rule.color = *Rgb::parse_hex(expect(Tok::Color, "#RRGGBB color").text);
        }
        if (is_rule) {
          if (rules_.bands.empty()) fail("rules must follow the 'bands' declaration", head);
          const Token& open = expect(Tok::LBrace, "'{'");
          if (peek().kind == Tok::RBrace) fail("empty rule body", open);
          rule.expr = parse_or();
          expect(Tok::RBrace, "'}' closing the rule body");
          set.rules.push_back(std::move(rule));
        } else if (is_fallback) {
          if (have_fallback) fail("fallback declared twice", head);
          set.fallback = std::move(rule);
          have_fallback = true;
        } else {
          set.rules.push_back(std::move(rule));
        }
      } else {
        fail("expected 'bands', 'policy', 'rule', 'class' or 'fallback'", head);
      }
    }
    if (!have_fallback) fail("missing 'fallback' class", peek());
    if (std::none_of(set.rules.begin(), set.rules.end(), [](const Rule& r) { return r.expr; })) {
      fail("rule file defines no rules", peek());
    }
    std::sort(set.rules.begin(), set.rules.end(),
              [](const Rule& a, const Rule& b) { return a.index < b.index; });
    return set;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, const Token& at) {
    throw ParseError(msg, at.line, at.column);
  }

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }

  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) {
      fail("expected " + what + (peek().kind == Tok::End ? " before end of input" : ""), peek());
    }
    return next();
  }

  void parse_band_list() {
    do {
      const Token& sym = expect(Tok::Ident, "band symbol");
      BandDecl decl;
      decl.symbol = sym.text;
      const auto id = sym.text.size() > 1 && (sym.text[0] == 'b' || sym.text[0] == 'B')
                          ? parse_integer<int>(std::string_view(sym.text).substr(1))
                          : std::nullopt;
      if (!id || *id <= 0) fail("band symbol must look like b<N>, got '" + sym.text + "'", sym);
      decl.band_id = *id;
      expect(Tok::At, "'@' and a wavelength");
      const Token& wl = expect(Tok::Number, "center wavelength in micrometers");
      if (!(wl.number > 0.0)) fail("wavelength must be positive", wl);
      decl.wavelength = wl.number;
      if (peek().kind == Tok::Question) {
        next();
        decl.optional = true;
      }
      if (rules_.band_index(decl.symbol)) fail("band '" + decl.symbol + "' declared twice", sym);
      rules_.bands.push_back(decl);
    } while (peek().kind == Tok::Comma && (next(), true));
  }

  Expr parse_or() {
    std::vector<Expr> terms;
    terms.push_back(parse_and());
    while (keyword(peek(), "or")) {
      next();
      terms.push_back(parse_and());
    }
    return terms.size() == 1 ? std::move(terms.front()) : Expr::any_of(std::move(terms));
  }

  Expr parse_and() {
    std::vector<Expr> terms;
    terms.push_back(parse_unary());
    while (keyword(peek(), "and")) {
      next();
      terms.push_back(parse_unary());
    }
    return terms.size() == 1 ? std::move(terms.front()) : Expr::all_of(std::move(terms));
  }

  Expr parse_unary() {
    if (keyword(peek(), "requires")) {
      next();
      std::vector<std::size_t> guards;
      do {
        const Token& sym = expect(Tok::Ident, "band symbol after 'requires'");
        const auto band = rules_.band_index(sym.text);
        if (!band) fail("undeclared band symbol '" + sym.text + "'", sym);
        guards.push_back(*band);
      } while (peek().kind == Tok::Comma && (next(), true));
      expect(Tok::LParen, "'(' after the guarded band list");
      guarded_.insert(guarded_.end(), guards.begin(), guards.end());
      Expr body = parse_or();
      guarded_.resize(guarded_.size() - guards.size());
      expect(Tok::RParen, "')' closing the guarded clause");
      for (auto it = guards.rbegin(); it != guards.rend(); ++it) {
        body = Expr::requires_band(*it, std::move(body));
      }
      return body;
    }
    // A '(' may open either a boolean group or an arithmetic operand; try
    // the comparison reading first and fall back to the group.
    const std::size_t start = pos_;
    try {
      return parse_comparison();
    } catch (const ParseError& as_comparison) {
      if (tokens_[start].kind != Tok::LParen) throw;
      pos_ = start;
      next();
      try {
        Expr group = parse_or();
        expect(Tok::RParen, "')'");
        return group;
      } catch (const ParseError& as_group) {
        if (as_group.line() > as_comparison.line() ||
            (as_group.line() == as_comparison.line() &&
             as_group.column() >= as_comparison.column())) {
          throw;
        }
        throw as_comparison;
      }
    }
  }

  Expr parse_comparison() {
    Expr lhs = parse_arith();
    if (peek().kind != Tok::Cmp) fail("expected a comparison operator", peek());
    const CmpOp op1 = next().op;
    Expr mid = parse_arith();
    if (peek().kind != Tok::Cmp) return Expr::compare(std::move(lhs), op1, std::move(mid));
    const CmpOp op2 = next().op;
    Expr rhs = parse_arith();
    Expr first = Expr::compare(std::move(lhs), op1, mid);
    Expr second = Expr::compare(std::move(mid), op2, std::move(rhs));
    return Expr::all_of({std::move(first), std::move(second)});
  }

  Expr parse_arith() {
    Expr lhs = parse_term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const bool plus = next().kind == Tok::Plus;
      Expr rhs = parse_term();
      lhs = plus ? Expr::sum(std::move(lhs), std::move(rhs))
                 : Expr::diff(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    while (peek().kind == Tok::Slash) {
      next();
      lhs = Expr::ratio(std::move(lhs), parse_factor());
    }
    return lhs;
  }

  Expr parse_factor() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        next();
        return Expr::constant(t.number);
      case Tok::Minus: {
        next();
        const Token& num = expect(Tok::Number, "number after unary '-'");
        return Expr::constant(-num.number);
      }
      case Tok::Ident: {
        if (keyword(t, "and") || keyword(t, "or") || keyword(t, "requires")) {
          fail("expected a band, number or '('", t);
        }
        const auto band = rules_.band_index(t.text);
        if (!band) fail("undeclared band symbol '" + t.text + "'", t);
        if (rules_.bands[*band].optional &&
            std::find(guarded_.begin(), guarded_.end(), *band) == guarded_.end()) {
          fail("optional band '" + t.text + "' used outside 'requires " + t.text + " (...)'", t);
        }
        next();
        return Expr::band_ref(*band);
      }
      case Tok::LParen: {
        next();
        Expr inner = parse_arith();
        expect(Tok::RParen, "')'");
        return inner;
      }
      default:
        fail("expected a band, number or '('", t);
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  RuleSet rules_;  // holds declared bands while parsing
  std::vector<std::size_t> guarded_;
};

}  // namespace detail

/// Parses rule-file text. Throws ParseError with a line/column on any
/// syntax or semantic problem.
inline RuleSet parse_rules(std::string_view text) { return detail::RuleParser(text).run(); }

inline RuleSet load_rules(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open rule file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_rules(buf.str());
  } catch (const ParseError& e) {
    throw e.in_file(path.string());
  }
}

}  // namespace staticcolor
