#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "photoscout/errors.hpp"
#include "photoscout/evaluator.hpp"
#include "photoscout/synthesis.hpp"
#include "synthesis_oracle.hpp"

namespace ann = photoscout::annotations;
namespace dsl = photoscout::dsl;
namespace syn = photoscout::synthesis;

namespace {

const char* kHoldingSketch = "exists x. exists y. HasType(x, Alice) && HasType(y, Flower) && HasRelation(x, y, Holding)";

ann::Album fig1_tagged() {
  return photoscout::fixtures::fig1().album().with_tag("alice", ann::FaceClusterTarget{"c01"});
}

syn::ExampleSet fig1_examples() { return {{"img1", "img2", "img3"}, {"img4"}}; }

dsl::Sketch sketch(const std::string& text, const ann::Album& album) {
  auto r = dsl::parse_with_holes(text, album.vocabulary());
  if (auto* f = std::get_if<dsl::ParseFailure>(&r)) throw std::runtime_error(f->reason);
  return std::get<dsl::Sketch>(r);
}

std::string program_of(const syn::Outcome& o) {
  if (const auto* c = std::get_if<syn::Complete>(&o)) return dsl::render(c->program);
  if (const auto* n = std::get_if<syn::NoProgram>(&o)) return "no program: " + n->reason;
  return "needs clarification";
}

}  // namespace

// ============================================================================
// Enumeration
// ============================================================================

TEST(Enumerator, CountsAndOrder) {
  const auto album = photoscout::fixtures::fig1().album();
  const auto s = sketch("exists x. exists y. HasType(x, Zed) && HasRelation(x, y, Holding)", album);
  ASSERT_EQ(s.holes.size(), 2u);
  syn::CompletionEnumerator e(s, {{1, {"a", "b", "c"}}, {2, {"above", "left"}}});
  EXPECT_EQ(e.total(), 6u);
  std::vector<std::string> seen;
  while (auto p = e.next()) seen.push_back(dsl::render(*p));
  ASSERT_EQ(seen.size(), 6u);
  EXPECT_EQ(seen[0], "exists x. exists y. HasType(x, A) && HasRelation(x, y, Above)");
  EXPECT_EQ(seen[1], "exists x. exists y. HasType(x, A) && HasRelation(x, y, Left)");
  EXPECT_EQ(seen[2], "exists x. exists y. HasType(x, B) && HasRelation(x, y, Above)");
  EXPECT_EQ(seen[5], "exists x. exists y. HasType(x, C) && HasRelation(x, y, Left)");
  EXPECT_FALSE(e.next());
}

TEST(Enumerator, NoHolesYieldsSketchOnce) {
  const auto album = photoscout::fixtures::fig1().album();
  syn::CompletionEnumerator e(sketch("exists x. HasType(x, Flower)", album), {});
  EXPECT_EQ(e.total(), 1u);
  ASSERT_TRUE(e.next());
  EXPECT_FALSE(e.next());
}

TEST(Enumerator, EmptyDomain) {
  const auto album = photoscout::fixtures::fig1().album();
  const auto s = sketch("exists x. HasType(x, Zed)", album);
  EXPECT_THROW(syn::CompletionEnumerator(s, {{1, {}}}), photoscout::EmptyDomain);
  EXPECT_THROW(syn::CompletionEnumerator(s, {}), photoscout::EmptyDomain);
}

TEST(Enumerator, DefaultDomainsFollowSlots) {
  const auto album = fig1_tagged();
  const auto s = sketch("exists x. exists y. HasType(x, Zed) && HasProperty(x, Grin) && HasRelation(x, y, Holding)", album);
  const auto d = syn::default_domains(s, album);
  EXPECT_EQ(d.at(1), (std::vector<std::string>{"alice", "cake", "face", "flower"}));
  EXPECT_EQ(d.at(2), dsl::builtin_properties());
  EXPECT_EQ(d.at(3), dsl::builtin_relations());
}

TEST(GroundTags, FillsTagHolesKeepingIds) {
  const auto untagged = photoscout::fixtures::fig1().album();
  const auto s = sketch(kHoldingSketch, untagged);
  ASSERT_EQ(s.holes.size(), 2u);
  const auto g = syn::ground_tags(s, fig1_tagged());
  ASSERT_EQ(g.holes.size(), 1u);
  EXPECT_EQ(g.holes[0].id, 2);
  EXPECT_EQ(dsl::render(g), "exists x. exists y. HasType(x, Alice) && HasType(y, Flower) && HasRelation(x, y, ?2)");
}

// ============================================================================
// Consistency and the bride holding flowers
// ============================================================================

TEST(Consistency, NextToRejectedAboveAccepted) {
  const auto album = fig1_tagged();
  const auto s = sketch(kHoldingSketch, album);
  ASSERT_EQ(s.holes.size(), 1u);
  const int hole = s.holes[0].id;
  const auto next_to = dsl::fill_holes(s.expr, {{hole, "nextto"}});
  const auto above = dsl::fill_holes(s.expr, {{hole, "above"}});
  EXPECT_FALSE(syn::consistent(*next_to, fig1_examples(), album));
  EXPECT_EQ(syn::first_violation(*next_to, fig1_examples(), album), "negative img4");
  EXPECT_TRUE(syn::consistent(*above, fig1_examples(), album));
  EXPECT_FALSE(syn::first_violation(*above, fig1_examples(), album));
}

TEST(Synthesize, HoldingBecomesAbove) {
  const auto album = fig1_tagged();
  const auto out = syn::complete_sketches({sketch(kHoldingSketch, album)}, fig1_examples(), album);
  EXPECT_EQ(program_of(out),
            "exists x. exists y. HasType(x, Alice) && HasType(y, Flower) && HasRelation(x, y, Above)");
  ASSERT_TRUE(std::holds_alternative<syn::Complete>(out));
  EXPECT_EQ(std::get<syn::Complete>(out).ranked.size(), 1u);
}

TEST(Synthesize, PluralFlowersStillResolves) {
  const auto album = fig1_tagged();
  const auto out = syn::synthesize_from_candidates(
      {"exists x. exists y. HasType(x, Alice) && HasType(y, Flowers) && HasRelation(x, y, Holding)"}, fig1_examples(),
      album);
  EXPECT_EQ(program_of(out),
            "exists x. exists y. HasType(x, Alice) && HasType(y, Flower) && HasRelation(x, y, Above)");
}

TEST(Synthesize, ClarificationListsUnknownTerms) {
  const auto untagged = photoscout::fixtures::fig1().album();
  auto out = syn::synthesize_from_candidates({kHoldingSketch}, {}, untagged);
  ASSERT_TRUE(std::holds_alternative<syn::NeedsClarification>(out));
  EXPECT_EQ(std::get<syn::NeedsClarification>(out).unknown_terms, (std::vector<std::string>{"alice", "holding"}));
  out = syn::synthesize_from_candidates({kHoldingSketch}, {}, fig1_tagged());
  ASSERT_TRUE(std::holds_alternative<syn::NeedsClarification>(out));
  EXPECT_EQ(std::get<syn::NeedsClarification>(out).unknown_terms, (std::vector<std::string>{"holding"}));
}

TEST(Synthesize, CompleteSketchWithoutExamples) {
  const auto album = photoscout::fixtures::transportation().album();
  const auto out = syn::synthesize_from_candidates({"exists x. exists y. HasType(x, Car) && HasType(y, Bicycle)"}, {}, album);
  EXPECT_EQ(program_of(out), "exists x. exists y. HasType(x, Car) && HasType(y, Bicycle)");
}

TEST(Synthesize, NoProgramNamesTheExample) {
  const auto album = fig1_tagged();
  // img1 cannot be both a positive and matched by nothing: ask for the bride
  // below the flowers.
  const auto out = syn::synthesize_from_candidates(
      {"exists x. exists y. HasType(x, Alice) && HasType(y, Flower) && HasRelation(x, y, Below)"}, fig1_examples(), album);
  ASSERT_TRUE(std::holds_alternative<syn::NoProgram>(out));
  EXPECT_NE(std::get<syn::NoProgram>(out).reason.find("example positive img1"), std::string::npos)
      << std::get<syn::NoProgram>(out).reason;
}

TEST(Synthesize, BudgetSkipsLargeSketches) {
  const auto album = fig1_tagged();
  syn::SynthesisOptions tiny;
  tiny.budget = 3;
  auto out = syn::synthesize_from_candidates({kHoldingSketch}, fig1_examples(), album, tiny);
  ASSERT_TRUE(std::holds_alternative<syn::NoProgram>(out));
  EXPECT_EQ(std::get<syn::NoProgram>(out).reason.rfind("budget", 0), 0u);
  // A small sketch within budget still runs.
  out = syn::synthesize_from_candidates(
      {kHoldingSketch, "exists x. exists y. HasType(x, Alice) && HasType(y, Flower) && HasRelation(x, y, Above)"},
      fig1_examples(), album, tiny);
  EXPECT_TRUE(std::holds_alternative<syn::Complete>(out));
}

TEST(Synthesize, PrefersSmallerPrograms) {
  const auto album = fig1_tagged();
  const auto out = syn::synthesize_from_candidates(
      {"exists x. exists y. exists z. HasType(x, Alice) && HasType(y, Flower) && HasType(z, Face) && "
       "HasRelation(x, y, Holding)",
       kHoldingSketch},
      fig1_examples(), album);
  ASSERT_TRUE(std::holds_alternative<syn::Complete>(out));
  const auto& c = std::get<syn::Complete>(out);
  EXPECT_EQ(dsl::render(c.program),
            "exists x. exists y. HasType(x, Alice) && HasType(y, Flower) && HasRelation(x, y, Above)");
  for (std::size_t i = 1; i < c.ranked.size(); ++i) {
    EXPECT_LE(dsl::ast_size(*c.ranked[i - 1]), dsl::ast_size(*c.ranked[i]));
  }
}

TEST(Synthesize, UnparseableCandidatesAreDropped) {
  const auto album = fig1_tagged();
  auto out = syn::synthesize_from_candidates({"Sure! Here is the program:", kHoldingSketch}, fig1_examples(), album);
  EXPECT_TRUE(std::holds_alternative<syn::Complete>(out));
  out = syn::synthesize_from_candidates({"no", "exists x. Broken(x"}, fig1_examples(), album);
  ASSERT_TRUE(std::holds_alternative<syn::NoProgram>(out));
  out = syn::synthesize_from_candidates({}, fig1_examples(), album);
  ASSERT_TRUE(std::holds_alternative<syn::NoProgram>(out));
}

TEST(Synthesize, ExampleValidation) {
  const auto album = fig1_tagged();
  EXPECT_THROW(syn::validate_examples({{"img1"}, {"img1"}}, album), photoscout::InvalidExamples);
  EXPECT_THROW(syn::validate_examples({{"img9"}, {}}, album), photoscout::InvalidExamples);
  EXPECT_NO_THROW(syn::validate_examples(fig1_examples(), album));
}

TEST(Synthesize, ThroughReplaySource) {
  photoscout::nlbridge::SketchSourceConfig config;
  config.mode = photoscout::nlbridge::SketchSourceMode::Replay;
  config.replay_file = std::string(PHOTOSCOUT_SOURCE_DIR) + "/fixtures/llm/fig1_alice_holding.txt";
  auto source = photoscout::nlbridge::make_sketch_source(config);
  const auto album = fig1_tagged();
  const auto out = syn::synthesize("Alice is holding flowers", fig1_examples(), album, *source);
  EXPECT_EQ(program_of(out),
            "exists x. exists y. HasType(x, Alice) && HasType(y, Flower) && HasRelation(x, y, Above)");
  EXPECT_THROW(syn::synthesize("Alice", {{"nope"}, {}}, album, *source), photoscout::InvalidExamples);
}

TEST(Synthesize, ResultsMatchSearch) {
  const auto fixture = photoscout::fixtures::fig1();
  const auto album = fig1_tagged();
  const auto out = syn::synthesize_from_candidates({kHoldingSketch}, fig1_examples(), album);
  const auto& program = std::get<syn::Complete>(out).program;
  EXPECT_EQ(photoscout::evaluator::search(*program, album), fixture.ground_truth);
}

// ============================================================================
// Soundness and minimality on random instances
// ============================================================================

TEST(SynthesisProperties, SoundAndMinimal) {
  oracle::Rng rng(31337);
  int complete = 0;
  for (int i = 0; i < 60; ++i) {
    const auto inst = oracle::random_synthesis_instance(rng);
    std::vector<std::string> texts;
    for (const auto& s : inst.sketches) texts.push_back(oracle::to_text(s));
    const auto out = syn::synthesize_from_candidates(texts, inst.examples, inst.album);
    const auto verdict = oracle::check_outcome(inst, out);
    ASSERT_TRUE(verdict.ok) << verdict.detail << "\n  first sketch: " << texts[0];
    complete += verdict.expected_complete;
  }
  EXPECT_GT(complete, 20);
}

namespace {

std::set<std::string> consistent_set(const syn::Outcome& o) {
  std::set<std::string> out;
  if (const auto* c = std::get_if<syn::Complete>(&o)) {
    for (const auto& p : c->ranked) out.insert(dsl::render(p));
  }
  return out;
}

}  // namespace

// Confirming a returned image as a positive leaves the answer alone, and any
// extra example can only shrink the consistent set.
TEST(SynthesisProperties, ConfirmationAndMonotonePruning) {
  oracle::Rng rng(4242);
  int confirmed = 0;
  for (int i = 0; i < 60; ++i) {
    const auto inst = oracle::random_synthesis_instance(rng);
    std::vector<std::string> texts;
    for (const auto& s : inst.sketches) texts.push_back(oracle::to_text(s));
    const auto before = syn::synthesize_from_candidates(texts, inst.examples, inst.album);
    const auto* c = std::get_if<syn::Complete>(&before);
    if (!c) continue;

    std::vector<std::string> fresh;
    for (const auto& [id, image] : inst.album.images()) {
      if (!inst.examples.positive.count(id) && !inst.examples.negative.count(id)) fresh.push_back(id);
    }
    for (const auto& id : photoscout::evaluator::search(*c->program, inst.album)) {
      if (inst.examples.positive.count(id)) continue;
      auto more = inst.examples;
      more.positive.insert(id);
      const auto after = syn::synthesize_from_candidates(texts, more, inst.album);
      ASSERT_TRUE(std::holds_alternative<syn::Complete>(after));
      EXPECT_EQ(dsl::render(std::get<syn::Complete>(after).program), dsl::render(c->program));
      ++confirmed;
      break;
    }
    const auto all = consistent_set(before);
    for (const auto& id : fresh) {
      for (bool positive : {true, false}) {
        auto more = inst.examples;
        (positive ? more.positive : more.negative).insert(id);
        const auto narrowed = consistent_set(syn::synthesize_from_candidates(texts, more, inst.album));
        ASSERT_TRUE(std::includes(all.begin(), all.end(), narrowed.begin(), narrowed.end()));
      }
    }
  }
  EXPECT_GT(confirmed, 10);
}

TEST(SynthesisProperties, DeterministicAcrossRuns) {
  const auto fixture = photoscout::fixtures::festival();
  const auto album = fixture.album();
  const syn::ExampleSet examples{{fixture.positives.begin(), fixture.positives.end()},
                                 {fixture.negatives.begin(), fixture.negatives.end()}};
  auto source = photoscout::nlbridge::make_sketch_source({});
  const auto first = syn::synthesize("A singer holding a microphone", examples, album, *source);
  ASSERT_TRUE(std::holds_alternative<syn::Complete>(first));
  for (int i = 0; i < 3; ++i) {
    const auto again = syn::synthesize("A singer holding a microphone", examples, album, *source);
    EXPECT_EQ(consistent_set(again), consistent_set(first));
    EXPECT_EQ(program_of(again), program_of(first));
  }
}
