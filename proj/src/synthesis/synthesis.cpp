#include "photoscout/synthesis.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "photoscout/errors.hpp"
#include "photoscout/evaluator.hpp"

namespace photoscout::synthesis {

using annotations::Album;

void validate_examples(const ExampleSet& examples, const Album& album) {
  for (const auto& id : examples.positive) {
    if (examples.negative.count(id)) throw InvalidExamples("image '" + id + "' is both a positive and a negative example");
  }
  for (const auto* set : {&examples.positive, &examples.negative}) {
    for (const auto& id : *set) {
      if (!album.find(id)) throw InvalidExamples("example image '" + id + "' is not in album '" + album.id() + "'");
    }
  }
}

std::vector<std::string> slot_domain(dsl::Slot slot, const Album& album) {
  const auto& known = album.vocabulary().for_slot(slot);
  return {known.begin(), known.end()};
}

HoleDomain default_domains(const dsl::Sketch& sketch, const Album& album) {
  HoleDomain out;
  for (const auto& h : sketch.holes) out[h.id] = slot_domain(h.slot, album);
  return out;
}

dsl::Sketch ground_tags(const dsl::Sketch& sketch, const Album& album) {
  std::map<int, std::string> fill;
  std::vector<dsl::Hole> remaining;
  for (const auto& h : sketch.holes) {
    const std::string name = dsl::canonicalize(h.origin_token);
    if (h.slot == dsl::Slot::TypeConst && album.tags().count(name)) {
      fill[h.id] = name;
    } else {
      remaining.push_back(h);
    }
  }
  if (fill.empty()) return sketch;
  return dsl::Sketch{dsl::fill_holes(sketch.expr, fill), std::move(remaining)};
}

// ============================================================================
// Enumeration
// ============================================================================

CompletionEnumerator::CompletionEnumerator(dsl::Sketch sketch, HoleDomain domains) : sketch_(std::move(sketch)) {
  for (const auto& h : sketch_.holes) {
    auto it = domains.find(h.id);
    if (it == domains.end() || it->second.empty()) throw EmptyDomain(h.id);
    const std::uint64_t n = it->second.size();
    total_ = total_ > std::numeric_limits<std::uint64_t>::max() / n ? std::numeric_limits<std::uint64_t>::max()
                                                                     : total_ * n;
    axes_.emplace_back(h.id, std::move(it->second));
  }
  cursor_.assign(axes_.size(), 0);
}

std::optional<dsl::ExprPtr> CompletionEnumerator::next() {
  if (exhausted_) return std::nullopt;
  if (axes_.empty()) {
    exhausted_ = true;
    return sketch_.expr;
  }
  std::map<int, std::string> fill;
  for (std::size_t i = 0; i < axes_.size(); ++i) fill[axes_[i].first] = axes_[i].second[cursor_[i]];
  dsl::ExprPtr out = dsl::fill_holes(sketch_.expr, fill);

  std::size_t k = axes_.size();
  while (k > 0) {
    --k;
    if (++cursor_[k] < axes_[k].second.size()) break;
    cursor_[k] = 0;
    if (k == 0) exhausted_ = true;
  }
  return out;
}

// ============================================================================
// Consistency
// ============================================================================

namespace {

std::optional<std::string> violation_validated(const dsl::Expr& program, const ExampleSet& examples,
                                               const Album& album) {
  for (const auto& id : examples.positive) {
    if (!evaluator::eval_validated(program, *album.find(id), album)) return "positive " + id;
  }
  for (const auto& id : examples.negative) {
    if (evaluator::eval_validated(program, *album.find(id), album)) return "negative " + id;
  }
  return std::nullopt;
}

bool constants_known(const dsl::Expr& e, const Album& album) {
  bool ok = true;
  dsl::for_each_constant(e, [&](dsl::Slot slot, const std::string& c) {
    ok = ok && album.vocabulary().knows(slot, c);
  });
  return ok;
}

}  // namespace

std::optional<std::string> first_violation(const dsl::Expr& program, const ExampleSet& examples, const Album& album) {
  evaluator::validate_program(program, album);
  validate_examples(examples, album);
  return violation_validated(program, examples, album);
}

bool consistent(const dsl::Expr& program, const ExampleSet& examples, const Album& album) {
  return !first_violation(program, examples, album).has_value();
}

// ============================================================================
// Pipeline
// ============================================================================

Outcome complete_sketches(const std::vector<dsl::Sketch>& sketches, const ExampleSet& examples, const Album& album,
                          const SynthesisOptions& options) {
  std::vector<dsl::Sketch> grounded;
  for (const auto& s : sketches) {
    dsl::Sketch g = ground_tags(s, album);
    if (constants_known(*g.expr, album)) grounded.push_back(std::move(g));
  }
  if (grounded.empty()) return NoProgram{"no candidate program refers only to known objects"};

  if (examples.empty()) {
    std::set<std::string> terms;
    for (const auto& s : grounded) {
      for (const auto& h : s.holes) terms.insert(dsl::canonicalize(h.origin_token));
    }
    if (!terms.empty()) return NeedsClarification{{terms.begin(), terms.end()}};
  }

  std::map<std::string, dsl::ExprPtr> found;  // rendered text -> program
  std::string last_elimination;
  bool over_budget = false;
  for (const auto& sketch : grounded) {
    std::optional<CompletionEnumerator> completions;
    try {
      completions.emplace(sketch, default_domains(sketch, album));
    } catch (const EmptyDomain& e) {
      last_elimination = e.what();
      continue;
    }
    if (completions->total() > options.budget) {
      over_budget = true;
      continue;
    }
    while (auto program = completions->next()) {
      if (auto v = violation_validated(**program, examples, album)) {
        last_elimination = "example " + *v + " eliminated the last candidate, " + dsl::render(*program);
      } else {
        found.emplace(dsl::render(*program), *program);
      }
    }
  }

  if (found.empty()) {
    if (over_budget && last_elimination.empty()) {
      return NoProgram{"budget: every sketch has more than " + std::to_string(options.budget) + " completions"};
    }
    if (last_elimination.empty()) last_elimination = "no completion was produced";
    return NoProgram{"no program is consistent with the examples: " + last_elimination};
  }

  std::vector<std::pair<std::size_t, std::pair<std::string, dsl::ExprPtr>>> ranked;
  for (auto& [text, program] : found) ranked.push_back({dsl::ast_size(*program), {text, program}});
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second.first < b.second.first;
  });
  Complete out;
  for (auto& r : ranked) out.ranked.push_back(r.second.second);
  out.program = out.ranked.front();

  if (!consistent(*out.program, examples, album)) {
    throw std::logic_error("synthesized program is inconsistent with its examples: " + dsl::render(out.program));
  }
  return out;
}

Outcome synthesize_from_candidates(const std::vector<std::string>& candidates, const ExampleSet& examples,
                                   const Album& album, const SynthesisOptions& options) {
  if (candidates.empty()) return NoProgram{"the sketch source returned no candidates"};
  std::vector<dsl::Sketch> sketches;
  std::set<std::string> seen;
  std::string first_failure;
  const std::size_t n = std::min(candidates.size(), options.max_candidates);
  for (std::size_t i = 0; i < n; ++i) {
    auto parsed = dsl::parse_with_holes(candidates[i], album.vocabulary());
    if (auto* failure = std::get_if<dsl::ParseFailure>(&parsed)) {
      if (first_failure.empty()) first_failure = failure->reason;
      continue;
    }
    auto& sketch = std::get<dsl::Sketch>(parsed);
    if (seen.insert(dsl::render(sketch)).second) sketches.push_back(std::move(sketch));
  }
  if (sketches.empty()) {
    return NoProgram{"none of the " + std::to_string(n) + " candidate programs parsed (" + first_failure + ")"};
  }
  return complete_sketches(sketches, examples, album, options);
}

Outcome synthesize(std::string_view nl_query, const ExampleSet& examples, const Album& album,
                   nlbridge::SketchSource& source, const SynthesisOptions& options) {
  validate_examples(examples, album);
  return synthesize_from_candidates(nlbridge::generate_candidates(nl_query, source), examples, album, options);
}

}  // namespace photoscout::synthesis
