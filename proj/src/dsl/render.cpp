#include <string>

#include "photoscout/dsl.hpp"

namespace photoscout::dsl {

namespace {

// Binding strength; quantifiers and negation sit with the unary operators.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Implies:
      return 1;
    case ExprKind::Or:
      return 2;
    case ExprKind::And:
      return 3;
    case ExprKind::Not:
    case ExprKind::Exists:
    case ExprKind::Forall:
      return 4;
    case ExprKind::Pred:
      return 5;
  }
  return 5;
}

bool is_keyword(const std::string& canonical) {
  return canonical == "exists" || canonical == "forall" || canonical == "and" || canonical == "or" ||
         canonical == "not";
}

std::string render_constant(const std::string& value) {
  if (!is_identifier(value) || is_keyword(value)) return "\"" + value + "\"";
  std::string out = value;
  if (out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

void render_argument(const Argument& a, std::string& out) {
  if (const auto* v = std::get_if<Variable>(&a)) {
    out += v->name;
  } else if (const auto* c = std::get_if<Constant>(&a)) {
    out += render_constant(c->value);
  } else {
    out += "?" + std::to_string(std::get<Hole>(a).id);
  }
}

// `rightmost` is true when nothing follows this subexpression in the enclosing
// text. A quantifier body extends as far right as possible, so a quantifier that
// is followed by more text must be parenthesized.
void render_into(const Expr& e, bool rightmost, std::string& out);

void render_operand(const Expr& e, bool needs_parens, bool rightmost, std::string& out) {
  if (e.is_quantifier() && !rightmost) needs_parens = true;
  if (needs_parens) {
    out += '(';
    render_into(e, true, out);
    out += ')';
  } else {
    render_into(e, rightmost, out);
  }
}

void render_into(const Expr& e, bool rightmost, std::string& out) {
  switch (e.kind()) {
    case ExprKind::Pred: {
      const Predicate& p = e.predicate();
      out += relation_name(p.relation);
      out += '(';
      for (std::size_t i = 0; i < p.args.size(); ++i) {
        if (i) out += ", ";
        render_argument(p.args[i], out);
      }
      out += ')';
      return;
    }
    case ExprKind::Not:
      out += '!';
      render_operand(*e.operand(), precedence(*e.operand()) < 4, rightmost, out);
      return;
    case ExprKind::Exists:
    case ExprKind::Forall:
      out += e.kind() == ExprKind::Exists ? "exists " : "forall ";
      out += e.var();
      out += ". ";
      render_into(*e.operand(), rightmost, out);
      return;
    case ExprKind::Implies:
    case ExprKind::And:
    case ExprKind::Or: {
      const int p = precedence(e);
      const bool right_assoc = e.kind() == ExprKind::Implies;
      const int lp = precedence(*e.lhs());
      const int rp = precedence(*e.rhs());
      render_operand(*e.lhs(), right_assoc ? lp <= p : lp < p, false, out);
      out += e.kind() == ExprKind::Implies ? " -> " : e.kind() == ExprKind::And ? " && " : " || ";
      render_operand(*e.rhs(), right_assoc ? rp < p : rp <= p, rightmost, out);
      return;
    }
  }
}

}  // namespace

std::string render(const Expr& e) {
  std::string out;
  render_into(e, true, out);
  return out;
}

std::string render(const ExprPtr& e) { return render(*e); }

std::string render(const Sketch& s) { return render(*s.expr); }

}  // namespace photoscout::dsl
