#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "photoscout/errors.hpp"
#include "photoscout/evaluator.hpp"

namespace ann = photoscout::annotations;
namespace dsl = photoscout::dsl;
namespace ev = photoscout::evaluator;

namespace {

bool holds(const std::string& program, const ann::Album& album, const std::string& image_id) {
  return ev::eval(*dsl::parse(program), *album.find(image_id), album);
}

ann::Album tagged_fig1() {
  return photoscout::fixtures::fig1().album().with_tag("alice", ann::FaceClusterTarget{"c01"});
}

const char* kSmilingAboveFlower =
    "forall x. HasType(x, Face) -> HasProperty(x, Smiling) && exists y. HasType(y, Flower) && HasRelation(x, y, Above)";

}  // namespace

TEST(Eval, SmilingFacesEachAboveAFlower) {
  const auto album = photoscout::fixtures::fig6().album();
  EXPECT_TRUE(holds(kSmilingAboveFlower, album, "fig6_1"));
  EXPECT_FALSE(holds(kSmilingAboveFlower, album, "fig6_2"));
  EXPECT_FALSE(holds(kSmilingAboveFlower, album, "fig6_3"));
  EXPECT_TRUE(holds(kSmilingAboveFlower, album, "fig6_4"));
  EXPECT_FALSE(holds(kSmilingAboveFlower, album, "fig6_5"));
  EXPECT_TRUE(holds(kSmilingAboveFlower, album, "fig6_6"));
  EXPECT_EQ(ev::search(*dsl::parse(kSmilingAboveFlower), album), photoscout::fixtures::fig6().ground_truth);
}

TEST(Eval, BrideNotAboveBoutonniere) {
  const auto album = tagged_fig1();
  const std::string p = "exists x. exists y. HasType(x, Alice) && HasType(y, Flower) && HasRelation(x, y, Above)";
  EXPECT_FALSE(holds(p, album, "img4"));
  for (const char* id : {"img1", "img2", "img3"}) EXPECT_TRUE(holds(p, album, id)) << id;
}

TEST(Eval, VacuousQuantifiers) {
  ann::ImageAnnotation empty;
  empty.image_id = "empty";
  empty.width = empty.height = 10;
  ann::ImageAnnotation cat = photoscout::fixtures::transportation().images[0];
  const ann::Album album("a", {empty, cat});
  EXPECT_TRUE(holds("forall x. HasType(x, Car)", album, "empty"));
  EXPECT_TRUE(holds("forall x. HasProperty(x, Smiling)", album, "empty"));
  EXPECT_FALSE(holds("exists x. HasType(x, Car) || !HasType(x, Car)", album, "empty"));
}

TEST(Search, CarAndBicycle) {
  const auto album = photoscout::fixtures::transportation().album();
  const auto results = ev::search(*dsl::parse("exists x. exists y. HasType(x, Car) && HasType(y, Bicycle)"), album);
  EXPECT_EQ(results, (std::vector<std::string>{"t1", "t4"}));
}

TEST(Search, TautologyAndContradiction) {
  const auto album = photoscout::fixtures::wedding().album();
  const auto all = ev::search(*dsl::parse("forall x. HasType(x, Face) || !HasType(x, Face)"), album);
  ASSERT_EQ(all.size(), album.images().size());
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  EXPECT_TRUE(ev::search(*dsl::parse("exists x. HasType(x, Face) && !HasType(x, Face)"), album).empty());
}

TEST(Search, InvariantUnderImageOrder) {
  auto fixture = photoscout::fixtures::wedding();
  const auto program = dsl::parse("exists x. exists y. HasType(x, Face) && HasType(y, Flower) && HasRelation(x, y, Above)");
  const auto forward = ev::search(*program, fixture.album());
  std::reverse(fixture.images.begin(), fixture.images.end());
  EXPECT_EQ(ev::search(*program, fixture.album()), forward);
}

TEST(Eval, HasRelationNeedsDistinctObjects) {
  const auto album = photoscout::fixtures::transportation().album();
  // Every box intersects itself; the relation must still be false.
  EXPECT_FALSE(holds("exists x. HasType(x, Car) && HasRelation(x, x, NextTo)", album, "t2"));
}

TEST(Eval, EmotionMissingIsFalse) {
  const auto album = photoscout::fixtures::transportation().album();
  EXPECT_FALSE(holds("exists x. HasType(x, Face) && HasEmotion(x, Happy)", album, "t3"));
  EXPECT_TRUE(holds("exists x. HasType(x, Face) && !HasEmotion(x, Happy)", album, "t3"));
}

TEST(Eval, PropertiesAreFalseForThings) {
  const auto album = photoscout::fixtures::transportation().album();
  EXPECT_FALSE(holds("exists x. HasType(x, Car) && !HasType(x, Face) && HasProperty(x, Smiling)", album, "t1"));
}

TEST(Eval, Errors) {
  const auto album = photoscout::fixtures::fig1().album();
  EXPECT_THROW(holds("exists x. HasType(x, Unicorn)", album, "img1"), photoscout::UnknownConstant);
  EXPECT_THROW(holds("exists x. HasType(x, Alice)", album, "img1"), photoscout::UnknownConstant);
  EXPECT_THROW(holds("exists x. exists y. HasRelation(x, y, Holding)", album, "img1"), photoscout::UnknownConstant);
  auto sketch = std::get<dsl::Sketch>(dsl::parse_with_holes("exists x. HasType(x, Alice)", album.vocabulary()));
  EXPECT_THROW(ev::eval(*sketch.expr, *album.find("img1"), album), photoscout::IncompleteProgram);
}

TEST(Eval, ConfidenceThreshold) {
  const auto fixture = photoscout::fixtures::fig6();
  auto album = fixture.album();
  // fig6_6 holds a frowning face at confidence 0.3.
  EXPECT_TRUE(holds(kSmilingAboveFlower, album, "fig6_6"));
  ann::AlbumConfig low;
  low.confidence_threshold = 0.2;
  EXPECT_FALSE(holds(kSmilingAboveFlower, album.with_config(low), "fig6_6"));
  EXPECT_EQ(ev::quantifier_domain(*album.find("fig6_6"), album).size(), 4u);
}

// Raising the threshold leaves programs alone when every object involved
// clears both thresholds.
TEST(EvalProperties, ThresholdMonotonicity) {
  oracle::Rng rng(17);
  const auto pools = oracle::default_pools();
  const auto base = oracle::random_album(rng, 60);
  std::vector<ann::ImageAnnotation> confident;
  for (const auto& [id, image] : base.images()) {
    auto copy = image;
    copy.objects.erase(std::remove_if(copy.objects.begin(), copy.objects.end(),
                                      [](const auto& o) { return o.confidence < 0.7; }),
                       copy.objects.end());
    confident.push_back(copy);
  }
  const ann::Album album("c", confident, base.tags());
  ann::AlbumConfig raised;
  raised.confidence_threshold = 0.7;
  const auto strict = album.with_config(raised);
  for (int i = 0; i < 300; ++i) {
    const auto program = dsl::parse(oracle::to_text(oracle::random_formula(rng, pools)));
    for (const auto& [id, image] : album.images()) {
      ASSERT_EQ(ev::eval(*program, image, album), ev::eval(*program, image, strict));
    }
  }
}

TEST(EvalProperties, QuantifierDuality) {
  oracle::Rng rng(23);
  const auto pools = oracle::default_pools();
  const auto album = oracle::random_album(rng, 40);
  for (int i = 0; i < 300; ++i) {
    auto f = oracle::random_formula(rng, pools, 2, 3);
    if (f.kind != oracle::Formula::Forall) continue;
    const auto body = oracle::to_text(f.kids[0]);
    const auto lhs = dsl::parse("!(forall " + f.var + ". " + body + ")");
    const auto rhs = dsl::parse("exists " + f.var + ". !(" + body + ")");
    for (const auto& [id, image] : album.images()) ASSERT_EQ(ev::eval(*lhs, image, album), ev::eval(*rhs, image, album));
  }
}

TEST(EvalProperties, MatchesReferenceEvaluator) {
  oracle::Rng rng(2024);
  const auto pools = oracle::default_pools();
  int mismatches = 0;
  int trues = 0;
  int checks = 0;
  for (int batch = 0; batch < 10; ++batch) {
    const auto album = oracle::random_album(rng, 20);
    const oracle::World world{album.config().confidence_threshold, album.tags()};
    for (int i = 0; i < 50; ++i) {
      const auto f = oracle::random_formula(rng, pools);
      const auto program = dsl::parse(oracle::to_text(f));
      for (const auto& [id, image] : album.images()) {
        const bool got = ev::eval(*program, image, album);
        const bool want = oracle::eval(f, image, world);
        ++checks;
        trues += want;
        if (got != want) {
          ++mismatches;
          ADD_FAILURE() << oracle::to_text(f) << " on " << id << ": got " << got;
        }
      }
    }
  }
  EXPECT_EQ(mismatches, 0);
  // Both outcomes are well represented.
  EXPECT_GT(trues, checks / 10);
  EXPECT_LT(trues, checks * 9 / 10);
}
