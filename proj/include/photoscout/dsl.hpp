#pragma once

// Query language for structured image search: a first-order formula over the
// objects detected in one image. Atoms are the four built-in relations
// (HasType, HasEmotion, HasProperty, HasRelation); formulas combine them with
// the usual connectives and with exists/forall over image objects.
//
// Concrete syntax, lowest to highest precedence:
//
//   expr  := or ('->' expr)?                      right associative
//   or    := and ('||' and)*
//   and   := unary ('&&' unary)*
//   unary := '!' unary | quant | atom | '(' expr ')'
//   quant := ('exists' | 'forall') IDENT '.' expr  body extends to the right
//   atom  := NAME '(' arg (',' arg)* ')'
//
// `and` / `or` / `not` and the symbols ∃ ∀ ∧ ∨ ¬ → are accepted as synonyms.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace photoscout::dsl {

enum class Relation : std::uint8_t { HasType, HasEmotion, HasProperty, HasRelation };

// Which constant vocabulary an argument position draws from.
enum class Slot : std::uint8_t { TypeConst, PropertyConst, EmotionConst, RelationConst };

std::string_view relation_name(Relation r);
std::optional<Relation> relation_from_name(std::string_view name);
std::string_view slot_name(Slot s);
std::size_t relation_arity(Relation r);
Slot constant_slot(Relation r);

// Trim ASCII whitespace and fold ASCII letters to lower case.
std::string canonicalize(std::string_view token);
bool is_identifier(std::string_view s);

struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
};

struct Constant {
  std::string value;  // canonical form
  friend bool operator==(const Constant&, const Constant&) = default;
};

struct Hole {
  int id = 0;
  std::string origin_token;  // as written in the source, e.g. "Holding"
  Slot slot = Slot::TypeConst;
  std::size_t position = 0;  // byte offset of the origin token
  friend bool operator==(const Hole& a, const Hole& b) {
    return a.id == b.id && a.origin_token == b.origin_token && a.slot == b.slot;
  }
};

using Argument = std::variant<Variable, Constant, Hole>;

struct Predicate {
  Relation relation = Relation::HasType;
  std::vector<Argument> args;
  friend bool operator==(const Predicate&, const Predicate&) = default;
};

enum class ExprKind : std::uint8_t { Pred, Implies, And, Or, Not, Exists, Forall };

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable AST node. Subtrees are shared between expressions, so building a
// completion only copies the spine above the filled holes.
class Expr {
 public:
  static ExprPtr pred(Predicate p);
  static ExprPtr implies(ExprPtr lhs, ExprPtr rhs);
  static ExprPtr conj(ExprPtr lhs, ExprPtr rhs);
  static ExprPtr disj(ExprPtr lhs, ExprPtr rhs);
  static ExprPtr negate(ExprPtr operand);
  static ExprPtr exists(std::string var, ExprPtr body);
  static ExprPtr forall(std::string var, ExprPtr body);

  ExprKind kind() const noexcept { return kind_; }
  bool is_binary() const noexcept;
  bool is_quantifier() const noexcept;

  const Predicate& predicate() const noexcept { return pred_; }
  const ExprPtr& lhs() const noexcept { return lhs_; }
  const ExprPtr& rhs() const noexcept { return rhs_; }
  // Operand of Not, body of a quantifier.
  const ExprPtr& operand() const noexcept { return lhs_; }
  const std::string& var() const noexcept { return var_; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  Expr() = default;

  ExprKind kind_ = ExprKind::Pred;
  Predicate pred_;
  std::string var_;
  ExprPtr lhs_;
  ExprPtr rhs_;
};

bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

// Constants the parser treats as known, per slot.
struct Vocabulary {
  std::set<std::string> types;
  std::set<std::string> properties;
  std::set<std::string> emotions;
  std::set<std::string> relations;

  bool knows(Slot slot, std::string_view canonical) const;
  const std::set<std::string>& for_slot(Slot slot) const;

  // Face attributes, emotions and spatial relations known without any album.
  // `types` holds only "face".
  static Vocabulary builtin();
  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

const std::vector<std::string>& builtin_properties();
const std::vector<std::string>& builtin_emotions();
const std::vector<std::string>& builtin_relations();

struct Sketch {
  ExprPtr expr;
  std::vector<Hole> holes;  // ordered by id

  bool complete() const noexcept { return holes.empty(); }
};

struct ParseFailure {
  std::string reason;
};

using SketchOrFailure = std::variant<Sketch, ParseFailure>;

// Strict parse of a complete program. Throws SyntaxError, UnboundVariable or
// ArityError. Constants are not checked against any vocabulary.
ExprPtr parse(std::string_view text);

// Lenient parse of DSL text or raw LLM output. Constants unknown to `vocab`
// become holes, and an unknown predicate applied to two bound variables,
// r(x, y), becomes HasRelation(x, y, ?) with origin token r. Anything else
// that does not parse yields ParseFailure.
SketchOrFailure parse_with_holes(std::string_view text, const Vocabulary& vocab);

std::string render(const Expr& e);
std::string render(const ExprPtr& e);
std::string render(const Sketch& s);

// Node count: quantifiers, connectives, predicates and terms (holes included)
// each count as one.
std::size_t ast_size(const Expr& e);

std::vector<Hole> collect_holes(const ExprPtr& e);
bool has_holes(const Expr& e);

// Replace holes by the constants in `fill` (hole id -> canonical constant).
// Holes absent from `fill` are left in place.
ExprPtr fill_holes(const ExprPtr& e, const std::map<int, std::string>& fill);

// Visit every constant with the slot it occupies.
template <typename F>
void for_each_constant(const Expr& e, F&& f) {
  switch (e.kind()) {
    case ExprKind::Pred: {
      const Predicate& p = e.predicate();
      for (const Argument& a : p.args) {
        if (const auto* c = std::get_if<Constant>(&a)) f(constant_slot(p.relation), c->value);
      }
      return;
    }
    case ExprKind::Not:
    case ExprKind::Exists:
    case ExprKind::Forall:
      for_each_constant(*e.operand(), f);
      return;
    default:
      for_each_constant(*e.lhs(), f);
      for_each_constant(*e.rhs(), f);
  }
}

}  // namespace photoscout::dsl
