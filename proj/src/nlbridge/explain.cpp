#include <map>
#include <string>
#include <vector>

#include "photoscout/nlbridge.hpp"

namespace photoscout::nlbridge {

namespace {

using dsl::Expr;
using dsl::ExprKind;
using dsl::Relation;

std::string title_case(const std::string& s) {
  std::string out = s;
  bool upper = true;
  for (char& c : out) {
    if (upper && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    upper = c == ' ';
  }
  return out;
}

std::string with_article(const std::string& noun) {
  const char c = noun.empty() ? 'x' : noun[0];
  const bool vowel = c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
  return (vowel ? "an " : "a ") + noun;
}

struct Binding {
  std::string noun;  // empty: untyped object
  bool proper = false;
};

class Explainer {
 public:
  explicit Explainer(const ExplainContext& ctx) : ctx_(ctx) {}

  std::string sentence(const Expr& e) {
    std::string body = phrase(e);
    return "Matches images in which " + body + ".";
  }

 private:
  // --------------------------------------------------------------------------
  // Terms
  // --------------------------------------------------------------------------

  std::string constant(const dsl::Argument& a) const {
    if (const auto* c = std::get_if<dsl::Constant>(&a)) return c->value;
    if (const auto* h = std::get_if<dsl::Hole>(&a)) return "?" + std::to_string(h->id);
    return std::get<dsl::Variable>(a).name;
  }

  std::string ref(const dsl::Argument& a) const {
    const auto* v = std::get_if<dsl::Variable>(&a);
    if (!v) return constant(a);
    const auto it = env_.find(v->name);
    if (it == env_.end() || it->second.noun.empty()) return "object " + v->name;
    if (it->second.proper) return title_case(it->second.noun);
    int same = 0;
    for (const auto& [name, b] : env_) same += b.noun == it->second.noun && !b.proper;
    return same > 1 ? "the " + it->second.noun + " " + v->name : "the " + it->second.noun;
  }

  bool is_proper(const std::string& c) const { return ctx_.proper_names.count(c) > 0; }

  std::string noun_phrase(const std::string& c) const {
    return is_proper(c) ? title_case(c) : with_article(c);
  }

  // --------------------------------------------------------------------------
  // Atoms
  // --------------------------------------------------------------------------

  std::string atom(const dsl::Predicate& p, bool negated) const {
    const std::string subject = ref(p.args[0]);
    const std::string c = constant(p.args.back());
    switch (p.relation) {
      case Relation::HasType:
        if (is_proper(c)) return subject + (negated ? " is not " : " is ") + title_case(c);
        return subject + (negated ? " is not " : " is ") + with_article(c);
      case Relation::HasEmotion:
        return subject + (negated ? " does not look " : " looks ") + (c == "fear" ? std::string("afraid") : c);
      case Relation::HasProperty: {
        static const std::map<std::string, std::pair<std::string, std::string>> kPhrases = {
            {"smiling", {"is smiling", "is not smiling"}},
            {"eyesopen", {"has their eyes open", "does not have their eyes open"}},
            {"mouthopen", {"has their mouth open", "does not have their mouth open"}},
            {"sunglasses", {"wears sunglasses", "does not wear sunglasses"}},
            {"eyeglasses", {"wears glasses", "does not wear glasses"}},
            {"beard", {"has a beard", "does not have a beard"}},
            {"mustache", {"has a mustache", "does not have a mustache"}},
        };
        if (auto it = kPhrases.find(c); it != kPhrases.end()) {
          return subject + " " + (negated ? it->second.second : it->second.first);
        }
        return subject + (negated ? " does not have property " : " has property ") + c;
      }
      case Relation::HasRelation: {
        static const std::map<std::string, std::string> kRelations = {
            {"above", "above"},      {"below", "below"},       {"left", "to the left of"},
            {"right", "to the right of"}, {"nextto", "next to"}, {"inside", "inside"},
        };
        const std::string object = ref(p.args[1]);
        if (c == "contains") return subject + (negated ? " does not contain " : " contains ") + object;
        if (auto it = kRelations.find(c); it != kRelations.end()) {
          return subject + (negated ? " is not " : " is ") + it->second + " " + object;
        }
        return subject + (negated ? " is not in relation " : " is in relation ") + c + " to " + object;
      }
    }
    return {};
  }

  // --------------------------------------------------------------------------
  // Formulas
  // --------------------------------------------------------------------------

  static void conjuncts(const Expr& e, std::vector<const Expr*>& out) {
    if (e.kind() == ExprKind::And) {
      conjuncts(*e.lhs(), out);
      conjuncts(*e.rhs(), out);
    } else {
      out.push_back(&e);
    }
  }

  static bool is_type_of(const Expr& e, const std::string& var) {
    if (e.kind() != ExprKind::Pred || e.predicate().relation != Relation::HasType) return false;
    const auto* v = std::get_if<dsl::Variable>(&e.predicate().args[0]);
    return v && v->name == var;
  }

  std::string join_and(const std::vector<std::string>& parts) const {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) out += i + 1 == parts.size() ? " and " : ", ";
      out += parts[i];
    }
    return out;
  }

  // exists chain: "there is A and B such that ..."
  std::string existential(const Expr& e, bool negated) {
    std::vector<std::string> vars;
    const Expr* body = &e;
    while (body->kind() == ExprKind::Exists) {
      vars.push_back(body->var());
      body = body->operand().get();
    }
    std::vector<const Expr*> parts;
    conjuncts(*body, parts);

    std::vector<std::string> introduced;
    std::vector<const Expr*> rest;
    std::vector<bool> used(parts.size(), false);
    for (const auto& v : vars) {
      Binding b;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!used[i] && is_type_of(*parts[i], v)) {
          const std::string c = constant(parts[i]->predicate().args[1]);
          b.noun = c;
          b.proper = is_proper(c);
          used[i] = true;
          break;
        }
      }
      env_[v] = b;
      introduced.push_back(b.noun.empty() ? "an object " + v : noun_phrase(b.noun));
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (!used[i]) rest.push_back(parts[i]);
    }
    std::vector<std::string> conditions;
    for (const Expr* r : rest) conditions.push_back(phrase(*r));
    for (const auto& v : vars) env_.erase(v);

    std::string out = (negated ? "there is no " : "there is ");
    if (negated) {
      // "there is no a tree" reads badly; drop the article of the first entity.
      std::string first = introduced.front();
      if (first.rfind("a ", 0) == 0) first = first.substr(2);
      else if (first.rfind("an ", 0) == 0) first = first.substr(3);
      introduced.front() = first;
    }
    out += join_and(introduced);
    if (!conditions.empty()) out += " such that " + join_and(conditions);
    return out;
  }

  std::string universal(const Expr& e) {
    const std::string& v = e.var();
    const Expr& body = *e.operand();
    if (body.kind() == ExprKind::Implies && is_type_of(*body.lhs(), v)) {
      const std::string c = constant(body.lhs()->predicate().args[1]);
      env_[v] = Binding{c, is_proper(c)};
      const std::string consequent = phrase(*body.rhs());
      env_.erase(v);
      const std::string who = is_proper(c) ? "every " + title_case(c) + " face" : "every " + c;
      return "for " + who + ", " + consequent;
    }
    env_[v] = Binding{};
    const std::string inner = phrase(body);
    env_.erase(v);
    return "every object " + v + " satisfies that " + inner;
  }

  std::string phrase(const Expr& e) {
    switch (e.kind()) {
      case ExprKind::Pred:
        return atom(e.predicate(), false);
      case ExprKind::Not: {
        const Expr& inner = *e.operand();
        if (inner.kind() == ExprKind::Pred) return atom(inner.predicate(), true);
        if (inner.kind() == ExprKind::Exists) return existential(inner, true);
        return "it is not the case that " + phrase(inner);
      }
      case ExprKind::And:
        return phrase(*e.lhs()) + " and " + phrase(*e.rhs());
      case ExprKind::Or:
        return "either " + phrase(*e.lhs()) + " or " + phrase(*e.rhs());
      case ExprKind::Implies:
        return "if " + phrase(*e.lhs()) + " then " + phrase(*e.rhs());
      case ExprKind::Exists:
        return existential(e, false);
      case ExprKind::Forall:
        return universal(e);
    }
    return {};
  }

  const ExplainContext& ctx_;
  std::map<std::string, Binding> env_;
};

}  // namespace

std::string explain(const dsl::Expr& program, const ExplainContext& ctx) {
  return Explainer(ctx).sentence(program);
}

}  // namespace photoscout::nlbridge
