#pragma once

// Completing sketches into programs: tag grounding, enumeration of hole
// fillings, and filtering by labelled example images.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "photoscout/annotations.hpp"
#include "photoscout/dsl.hpp"
#include "photoscout/nlbridge.hpp"

namespace photoscout::synthesis {

struct ExampleSet {
  std::set<std::string> positive;
  std::set<std::string> negative;

  bool empty() const noexcept { return positive.empty() && negative.empty(); }
  std::size_t size() const noexcept { return positive.size() + negative.size(); }
};

// Throws InvalidExamples on overlap or ids missing from the album.
void validate_examples(const ExampleSet& examples, const annotations::Album& album);

// Hole id -> candidate constants, lexicographic.
using HoleDomain = std::map<int, std::vector<std::string>>;

std::vector<std::string> slot_domain(dsl::Slot slot, const annotations::Album& album);
HoleDomain default_domains(const dsl::Sketch& sketch, const annotations::Album& album);

// Fills every TypeConst hole whose origin token names a registered tag.
dsl::Sketch ground_tags(const dsl::Sketch& sketch, const annotations::Album& album);

// Lazy Cartesian product over the hole domains, first hole varying slowest.
class CompletionEnumerator {
 public:
  // Throws EmptyDomain for a hole with no candidates or no domain entry.
  CompletionEnumerator(dsl::Sketch sketch, HoleDomain domains);

  std::optional<dsl::ExprPtr> next();
  // Saturates at UINT64_MAX.
  std::uint64_t total() const noexcept { return total_; }

 private:
  dsl::Sketch sketch_;
  std::vector<std::pair<int, std::vector<std::string>>> axes_;
  std::vector<std::size_t> cursor_;
  std::uint64_t total_ = 1;
  bool exhausted_ = false;
};

bool consistent(const dsl::Expr& program, const ExampleSet& examples, const annotations::Album& album);

// The first example the program gets wrong, as "positive <id>" or
// "negative <id>"; nullopt when consistent.
std::optional<std::string> first_violation(const dsl::Expr& program, const ExampleSet& examples,
                                           const annotations::Album& album);

struct Complete {
  dsl::ExprPtr program;
  // Every consistent program, by (ast_size, rendered text).
  std::vector<dsl::ExprPtr> ranked;
};

struct NeedsClarification {
  std::vector<std::string> unknown_terms;  // canonical, sorted, unique
};

struct NoProgram {
  std::string reason;
};

using Outcome = std::variant<Complete, NeedsClarification, NoProgram>;

struct SynthesisOptions {
  std::uint64_t budget = 100000;  // completions per sketch
  std::size_t max_candidates = 20;
};

// Steps after parsing: grounding, clarification check, enumeration, ranking.
Outcome complete_sketches(const std::vector<dsl::Sketch>& sketches, const ExampleSet& examples,
                          const annotations::Album& album, const SynthesisOptions& options = {});

// Parses raw candidate strings against the album vocabulary, then completes.
Outcome synthesize_from_candidates(const std::vector<std::string>& candidates, const ExampleSet& examples,
                                   const annotations::Album& album, const SynthesisOptions& options = {});

// Full pipeline. Throws InvalidExamples and SketchSourceUnavailable.
Outcome synthesize(std::string_view nl_query, const ExampleSet& examples, const annotations::Album& album,
                   nlbridge::SketchSource& source, const SynthesisOptions& options = {});

}  // namespace photoscout::synthesis
