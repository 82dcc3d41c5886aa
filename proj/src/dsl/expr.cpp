#include <algorithm>
#include <cassert>
#include <utility>

#include "photoscout/dsl.hpp"

namespace photoscout::dsl {

std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::HasType:
      return "HasType";
    case Relation::HasEmotion:
      return "HasEmotion";
    case Relation::HasProperty:
      return "HasProperty";
    case Relation::HasRelation:
      return "HasRelation";
  }
  return "?";
}

std::optional<Relation> relation_from_name(std::string_view name) {
  const std::string folded = canonicalize(name);
  if (folded == "hastype") return Relation::HasType;
  if (folded == "hasemotion") return Relation::HasEmotion;
  if (folded == "hasproperty") return Relation::HasProperty;
  if (folded == "hasrelation") return Relation::HasRelation;
  return std::nullopt;
}

std::string_view slot_name(Slot s) {
  switch (s) {
    case Slot::TypeConst:
      return "type";
    case Slot::PropertyConst:
      return "property";
    case Slot::EmotionConst:
      return "emotion";
    case Slot::RelationConst:
      return "relation";
  }
  return "?";
}

std::size_t relation_arity(Relation r) { return r == Relation::HasRelation ? 3 : 2; }

Slot constant_slot(Relation r) {
  switch (r) {
    case Relation::HasType:
      return Slot::TypeConst;
    case Relation::HasEmotion:
      return Slot::EmotionConst;
    case Relation::HasProperty:
      return Slot::PropertyConst;
    case Relation::HasRelation:
      return Slot::RelationConst;
  }
  return Slot::TypeConst;
}

// ============================================================================
// Expr
// ============================================================================

ExprPtr Expr::pred(Predicate p) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = ExprKind::Pred;
  e->pred_ = std::move(p);
  return e;
}

#define PHOTOSCOUT_BINARY(name, k)                  \
  ExprPtr Expr::name(ExprPtr lhs, ExprPtr rhs) {    \
    assert(lhs && rhs);                             \
    auto e = std::shared_ptr<Expr>(new Expr());     \
    e->kind_ = ExprKind::k;                         \
    e->lhs_ = std::move(lhs);                       \
    e->rhs_ = std::move(rhs);                       \
    return e;                                       \
  }

PHOTOSCOUT_BINARY(implies, Implies)
PHOTOSCOUT_BINARY(conj, And)
PHOTOSCOUT_BINARY(disj, Or)

#undef PHOTOSCOUT_BINARY

ExprPtr Expr::negate(ExprPtr operand) {
  assert(operand);
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = ExprKind::Not;
  e->lhs_ = std::move(operand);
  return e;
}

ExprPtr Expr::exists(std::string var, ExprPtr body) {
  assert(body);
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = ExprKind::Exists;
  e->var_ = std::move(var);
  e->lhs_ = std::move(body);
  return e;
}

ExprPtr Expr::forall(std::string var, ExprPtr body) {
  assert(body);
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = ExprKind::Forall;
  e->var_ = std::move(var);
  e->lhs_ = std::move(body);
  return e;
}

bool Expr::is_binary() const noexcept {
  return kind_ == ExprKind::Implies || kind_ == ExprKind::And || kind_ == ExprKind::Or;
}

bool Expr::is_quantifier() const noexcept {
  return kind_ == ExprKind::Exists || kind_ == ExprKind::Forall;
}

bool operator==(const Expr& a, const Expr& b) {
  if (&a == &b) return true;
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case ExprKind::Pred:
      return a.pred_ == b.pred_;
    case ExprKind::Not:
      return *a.lhs_ == *b.lhs_;
    case ExprKind::Exists:
    case ExprKind::Forall:
      return a.var_ == b.var_ && *a.lhs_ == *b.lhs_;
    default:
      return *a.lhs_ == *b.lhs_ && *a.rhs_ == *b.rhs_;
  }
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return a == b;
  return *a == *b;
}

// ============================================================================
// Size, holes, substitution
// ============================================================================

std::size_t ast_size(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Pred:
      return 1 + e.predicate().args.size();
    case ExprKind::Not:
    case ExprKind::Exists:
    case ExprKind::Forall:
      return 1 + ast_size(*e.operand());
    default:
      return 1 + ast_size(*e.lhs()) + ast_size(*e.rhs());
  }
}

namespace {

void gather_holes(const Expr& e, std::vector<Hole>& out) {
  switch (e.kind()) {
    case ExprKind::Pred:
      for (const Argument& a : e.predicate().args) {
        if (const auto* h = std::get_if<Hole>(&a)) out.push_back(*h);
      }
      return;
    case ExprKind::Not:
    case ExprKind::Exists:
    case ExprKind::Forall:
      gather_holes(*e.operand(), out);
      return;
    default:
      gather_holes(*e.lhs(), out);
      gather_holes(*e.rhs(), out);
  }
}

}  // namespace

std::vector<Hole> collect_holes(const ExprPtr& e) {
  std::vector<Hole> out;
  if (e) gather_holes(*e, out);
  std::sort(out.begin(), out.end(), [](const Hole& a, const Hole& b) { return a.id < b.id; });
  return out;
}

bool has_holes(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Pred:
      return std::any_of(e.predicate().args.begin(), e.predicate().args.end(),
                         [](const Argument& a) { return std::holds_alternative<Hole>(a); });
    case ExprKind::Not:
    case ExprKind::Exists:
    case ExprKind::Forall:
      return has_holes(*e.operand());
    default:
      return has_holes(*e.lhs()) || has_holes(*e.rhs());
  }
}

ExprPtr fill_holes(const ExprPtr& e, const std::map<int, std::string>& fill) {
  switch (e->kind()) {
    case ExprKind::Pred: {
      bool touched = false;
      Predicate p = e->predicate();
      for (Argument& a : p.args) {
        if (const auto* h = std::get_if<Hole>(&a)) {
          auto it = fill.find(h->id);
          if (it != fill.end()) {
            a = Constant{it->second};
            touched = true;
          }
        }
      }
      return touched ? Expr::pred(std::move(p)) : e;
    }
    case ExprKind::Not: {
      auto inner = fill_holes(e->operand(), fill);
      return inner == e->operand() ? e : Expr::negate(std::move(inner));
    }
    case ExprKind::Exists:
    case ExprKind::Forall: {
      auto inner = fill_holes(e->operand(), fill);
      if (inner == e->operand()) return e;
      return e->kind() == ExprKind::Exists ? Expr::exists(e->var(), std::move(inner))
                                           : Expr::forall(e->var(), std::move(inner));
    }
    case ExprKind::Implies:
    case ExprKind::And:
    case ExprKind::Or: {
      auto l = fill_holes(e->lhs(), fill);
      auto r = fill_holes(e->rhs(), fill);
      if (l == e->lhs() && r == e->rhs()) return e;
      if (e->kind() == ExprKind::Implies) return Expr::implies(std::move(l), std::move(r));
      if (e->kind() == ExprKind::And) return Expr::conj(std::move(l), std::move(r));
      return Expr::disj(std::move(l), std::move(r));
    }
  }
  return e;
}

}  // namespace photoscout::dsl
