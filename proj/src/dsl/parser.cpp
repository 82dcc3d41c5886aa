#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "photoscout/dsl.hpp"
#include "photoscout/errors.hpp"

namespace photoscout::dsl {

namespace {

// ============================================================================
// Lexer
// ============================================================================

enum class Tok { Ident, String, HoleRef, LParen, RParen, Comma, Dot, Arrow, OrOp, AndOp, NotOp, ExistsSym, ForallSym, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

std::vector<Token> lex(std::string_view src) {
  // UTF-8 spellings of the logical symbols.
  static const std::pair<std::string_view, Tok> kSymbols[] = {
      {"\xE2\x88\x83", Tok::ExistsSym},  // ∃
      {"\xE2\x88\x80", Tok::ForallSym},  // ∀
      {"\xE2\x88\xA7", Tok::AndOp},      // ∧
      {"\xE2\x88\xA8", Tok::OrOp},       // ∨
      {"\xC2\xAC", Tok::NotOp},          // ¬
      {"\xE2\x86\x92", Tok::Arrow},      // →
      {"->", Tok::Arrow},
      {"&&", Tok::AndOp},
      {"||", Tok::OrOp},
  };

  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    bool matched = false;
    for (const auto& [spelling, kind] : kSymbols) {
      if (src.substr(i, spelling.size()) == spelling) {
        out.push_back({kind, std::string(spelling), i});
        i += spelling.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;

    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), i});
      i = j;
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"') ++j;
      if (j >= src.size()) throw SyntaxError(i, "unterminated string");
      out.push_back({Tok::String, std::string(src.substr(i + 1, j - i - 1)), i});
      i = j + 1;
      continue;
    }
    if (c == '?') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] >= '0' && src[j] <= '9') ++j;
      if (j == i + 1) throw SyntaxError(i, "expected hole number after '?'");
      out.push_back({Tok::HoleRef, std::string(src.substr(i, j - i)), i});
      i = j;
      continue;
    }
    switch (c) {
      case '(':
        out.push_back({Tok::LParen, "(", i});
        break;
      case ')':
        out.push_back({Tok::RParen, ")", i});
        break;
      case ',':
        out.push_back({Tok::Comma, ",", i});
        break;
      case '.':
        out.push_back({Tok::Dot, ".", i});
        break;
      case '!':
        out.push_back({Tok::NotOp, "!", i});
        break;
      default:
        throw SyntaxError(i, std::string("unexpected character '") + c + "'");
    }
    ++i;
  }
  out.push_back({Tok::End, "", src.size()});
  return out;
}

// ============================================================================
// Recursive descent
// ============================================================================

class Parser {
 public:
  Parser(std::string_view src, const Vocabulary* vocab) : tokens_(lex(src)), vocab_(vocab) {}

  ExprPtr parse_program() {
    ExprPtr e = parse_expr();
    if (peek().kind != Tok::End) throw SyntaxError(peek().pos, "unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }

  bool at_keyword(std::string_view kw) const {
    return peek().kind == Tok::Ident && canonicalize(peek().text) == kw;
  }

  void expect(Tok kind, std::string_view what) {
    if (peek().kind != kind) {
      const std::string got = peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'";
      throw SyntaxError(peek().pos, "expected " + std::string(what) + ", got " + got);
    }
    ++pos_;
  }

  bool at_or() const { return peek().kind == Tok::OrOp || at_keyword("or"); }
  bool at_and() const { return peek().kind == Tok::AndOp || at_keyword("and"); }
  bool at_not() const { return peek().kind == Tok::NotOp || at_keyword("not"); }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_or();
    if (peek().kind == Tok::Arrow) {
      advance();
      return Expr::implies(std::move(lhs), parse_expr());
    }
    return lhs;
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (at_or()) {
      advance();
      lhs = Expr::disj(std::move(lhs), parse_and());
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_unary();
    while (at_and()) {
      advance();
      lhs = Expr::conj(std::move(lhs), parse_unary());
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (at_not()) {
      advance();
      return Expr::negate(parse_unary());
    }
    if (peek().kind == Tok::ExistsSym || at_keyword("exists")) return parse_quantifier(true);
    if (peek().kind == Tok::ForallSym || at_keyword("forall")) return parse_quantifier(false);
    if (peek().kind == Tok::LParen) {
      advance();
      ExprPtr inner = parse_expr();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (peek().kind == Tok::Ident) return parse_atom();
    if (peek().kind == Tok::End) throw SyntaxError(peek().pos, "unexpected end of input");
    throw SyntaxError(peek().pos, "unexpected '" + peek().text + "'");
  }

  ExprPtr parse_quantifier(bool existential) {
    advance();
    const Token& var = peek();
    if (var.kind != Tok::Ident) throw SyntaxError(var.pos, "expected variable after quantifier");
    static const char* const kKeywords[] = {"exists", "forall", "and", "or", "not"};
    for (const char* kw : kKeywords) {
      if (canonicalize(var.text) == kw) throw SyntaxError(var.pos, "keyword used as variable");
    }
    if (std::find(scope_.begin(), scope_.end(), var.text) != scope_.end()) {
      throw SyntaxError(var.pos, "variable '" + var.text + "' shadows an enclosing binding");
    }
    std::string name = var.text;
    advance();
    expect(Tok::Dot, "'.' after quantified variable");
    scope_.push_back(name);
    ExprPtr body = parse_expr();
    scope_.pop_back();
    return existential ? Expr::exists(std::move(name), std::move(body))
                       : Expr::forall(std::move(name), std::move(body));
  }

  bool bound(const std::string& name) const {
    return std::find(scope_.begin(), scope_.end(), name) != scope_.end();
  }

  Variable variable_arg(const Token& t) {
    if (t.kind != Tok::Ident) throw SyntaxError(t.pos, "expected a variable, got '" + t.text + "'");
    if (!bound(t.text)) throw UnboundVariable(t.text);
    return Variable{t.text};
  }

  Argument constant_arg(const Token& t, Slot slot) {
    if (t.kind == Tok::HoleRef) {
      if (!vocab_) throw SyntaxError(t.pos, "hole " + t.text + " in a complete program");
      return Hole{next_hole_++, t.text, slot, t.pos};
    }
    if (t.kind != Tok::Ident && t.kind != Tok::String) {
      throw SyntaxError(t.pos, "expected a constant, got '" + t.text + "'");
    }
    std::string value = canonicalize(t.text);
    if (value.empty()) throw SyntaxError(t.pos, "empty constant");
    if (vocab_ && !vocab_->knows(slot, value)) return Hole{next_hole_++, t.text, slot, t.pos};
    return Constant{std::move(value)};
  }

  ExprPtr parse_atom() {
    const Token name = advance();
    expect(Tok::LParen, "'(' after predicate name");
    std::vector<Token> args;
    if (peek().kind != Tok::RParen) {
      while (true) {
        const Token& t = peek();
        if (t.kind != Tok::Ident && t.kind != Tok::String && t.kind != Tok::HoleRef) {
          throw SyntaxError(t.pos, "expected an argument, got " +
                                       (t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'"));
        }
        args.push_back(advance());
        if (peek().kind != Tok::Comma) break;
        advance();
      }
    }
    expect(Tok::RParen, "')'");

    const auto relation = relation_from_name(name.text);
    if (!relation) return unknown_predicate(name, args);

    const std::size_t want = relation_arity(*relation);
    if (args.size() != want) throw ArityError(std::string(relation_name(*relation)), args.size(), want);

    Predicate p{*relation, {}};
    p.args.emplace_back(variable_arg(args[0]));
    if (*relation == Relation::HasRelation) p.args.emplace_back(variable_arg(args[1]));
    p.args.push_back(constant_arg(args.back(), constant_slot(*relation)));
    return Expr::pred(std::move(p));
  }

  // r(x, y) with both arguments bound variables reads as HasRelation(x, y, r).
  ExprPtr unknown_predicate(const Token& name, const std::vector<Token>& args) {
    if (!vocab_) throw SyntaxError(name.pos, "unknown predicate '" + name.text + "'");
    const bool binary_on_vars = args.size() == 2 &&
                                std::all_of(args.begin(), args.end(), [&](const Token& t) {
                                  return t.kind == Tok::Ident && bound(t.text);
                                });
    if (!binary_on_vars) throw SyntaxError(name.pos, "unknown predicate '" + name.text + "'");
    Predicate p{Relation::HasRelation, {Variable{args[0].text}, Variable{args[1].text}}};
    p.args.push_back(constant_arg(name, Slot::RelationConst));
    return Expr::pred(std::move(p));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const Vocabulary* vocab_;
  std::vector<std::string> scope_;
  int next_hole_ = 1;
};

}  // namespace

ExprPtr parse(std::string_view text) {
  Parser parser(text, nullptr);
  return parser.parse_program();
}

SketchOrFailure parse_with_holes(std::string_view text, const Vocabulary& vocab) {
  try {
    Parser parser(text, &vocab);
    Sketch sketch;
    sketch.expr = parser.parse_program();
    sketch.holes = collect_holes(sketch.expr);
    return sketch;
  } catch (const Error& e) {
    return ParseFailure{e.what()};
  }
}

}  // namespace photoscout::dsl
