#pragma once

// Truth semantics of query programs over one annotated image.
//
// Quantifiers range over the image's objects whose confidence reaches the
// album threshold. Evaluation is plain nested enumeration with short-circuiting,
// O(n^k * |expr|) for n objects and k nested quantifiers; per-image domains are
// tens of objects, so no indexing is done.

#include <string>
#include <vector>

#include "photoscout/annotations.hpp"
#include "photoscout/dsl.hpp"

namespace photoscout::evaluator {

// Indices into image.objects forming the quantifier domain.
std::vector<std::size_t> quantifier_domain(const annotations::ImageAnnotation& image,
                                           const annotations::Album& album);

// Throws IncompleteProgram if the program has holes and UnknownConstant if it
// mentions a constant outside the album vocabulary.
void validate_program(const dsl::Expr& program, const annotations::Album& album);

bool eval(const dsl::Expr& program, const annotations::ImageAnnotation& image,
          const annotations::Album& album);

// eval without the vocabulary check, for callers that validated once up front.
bool eval_validated(const dsl::Expr& program, const annotations::ImageAnnotation& image,
                    const annotations::Album& album);

// Ids of every image satisfying the program, in lexicographic order. Images are
// evaluated in parallel.
std::vector<std::string> search(const dsl::Expr& program, const annotations::Album& album);

}  // namespace photoscout::evaluator
