#include "photoscout/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <utility>

#include "photoscout/errors.hpp"

namespace photoscout::evaluator {

using annotations::Album;
using annotations::DetectedObject;
using annotations::ImageAnnotation;
using annotations::ObjectKind;

std::vector<std::size_t> quantifier_domain(const ImageAnnotation& image, const Album& album) {
  std::vector<std::size_t> domain;
  for (std::size_t i = 0; i < image.objects.size(); ++i) {
    if (image.objects[i].confidence >= album.config().confidence_threshold) domain.push_back(i);
  }
  return domain;
}

void validate_program(const dsl::Expr& program, const Album& album) {
  if (dsl::has_holes(program)) throw IncompleteProgram("program has unfilled holes");
  dsl::for_each_constant(program, [&](dsl::Slot slot, const std::string& c) {
    if (!album.vocabulary().knows(slot, c)) throw UnknownConstant(c);
  });
}

namespace {

class ImageEvaluator {
 public:
  ImageEvaluator(const ImageAnnotation& image, const Album& album)
      : image_(image), album_(album), domain_(quantifier_domain(image, album)) {}

  bool eval(const dsl::Expr& e) {
    switch (e.kind()) {
      case dsl::ExprKind::Pred:
        return atom(e.predicate());
      case dsl::ExprKind::Not:
        return !eval(*e.operand());
      case dsl::ExprKind::And:
        return eval(*e.lhs()) && eval(*e.rhs());
      case dsl::ExprKind::Or:
        return eval(*e.lhs()) || eval(*e.rhs());
      case dsl::ExprKind::Implies:
        return !eval(*e.lhs()) || eval(*e.rhs());
      case dsl::ExprKind::Exists:
      case dsl::ExprKind::Forall: {
        const bool existential = e.kind() == dsl::ExprKind::Exists;
        env_.emplace_back(&e.var(), 0);
        bool result = !existential;
        for (std::size_t idx : domain_) {
          env_.back().second = idx;
          if (eval(*e.operand()) == existential) {
            result = existential;
            break;
          }
        }
        env_.pop_back();
        return result;
      }
    }
    return false;
  }

 private:
  const DetectedObject& lookup(const dsl::Argument& arg) const {
    const auto& name = std::get<dsl::Variable>(arg).name;
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (*it->first == name) return image_.objects[it->second];
    }
    throw UnboundVariable(name);
  }

  std::size_t index_of(const dsl::Argument& arg) const {
    return static_cast<std::size_t>(&lookup(arg) - image_.objects.data());
  }

  bool has_type(const DetectedObject& o, const std::string& c) const {
    if (c == "face") return o.kind == ObjectKind::Face;
    if (auto it = album_.tags().find(c); it != album_.tags().end()) {
      if (const auto* face = std::get_if<annotations::FaceClusterTarget>(&it->second)) {
        return o.kind == ObjectKind::Face && o.face_cluster == face->cluster;
      }
      const auto& set = std::get<annotations::ObjectSetTarget>(it->second).objects;
      return o.kind == ObjectKind::Thing && set.count({image_.image_id, o.object_id}) > 0;
    }
    return o.kind == ObjectKind::Thing && o.label == c;
  }

  bool atom(const dsl::Predicate& p) const {
    const auto constant = [&]() -> const std::string& {
      const auto* c = std::get_if<dsl::Constant>(&p.args.back());
      if (!c) throw IncompleteProgram("hole reached the evaluator");
      return c->value;
    };
    const DetectedObject& x = lookup(p.args[0]);
    switch (p.relation) {
      case dsl::Relation::HasType:
        return has_type(x, constant());
      case dsl::Relation::HasProperty:
        return x.kind == ObjectKind::Face && x.properties.count(constant()) > 0;
      case dsl::Relation::HasEmotion:
        return x.kind == ObjectKind::Face && x.emotion && *x.emotion == constant();
      case dsl::Relation::HasRelation: {
        if (index_of(p.args[0]) == index_of(p.args[1])) return false;
        const DetectedObject& y = lookup(p.args[1]);
        return annotations::spatial_relation(x, y, constant(), album_.config().geometry);
      }
    }
    return false;
  }

  const ImageAnnotation& image_;
  const Album& album_;
  std::vector<std::size_t> domain_;
  std::vector<std::pair<const std::string*, std::size_t>> env_;
};

}  // namespace

bool eval_validated(const dsl::Expr& program, const ImageAnnotation& image, const Album& album) {
  ImageEvaluator evaluator(image, album);
  return evaluator.eval(program);
}

bool eval(const dsl::Expr& program, const ImageAnnotation& image, const Album& album) {
  validate_program(program, album);
  return eval_validated(program, image, album);
}

std::vector<std::string> search(const dsl::Expr& program, const Album& album) {
  validate_program(program, album);

  std::vector<const ImageAnnotation*> images;
  images.reserve(album.images().size());
  for (const auto& [id, image] : album.images()) images.push_back(&image);

  std::vector<char> hit(images.size(), 0);
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, images.size() / 32));
  if (workers <= 1) {
    for (std::size_t i = 0; i < images.size(); ++i) hit[i] = eval_validated(program, *images[i], album);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < images.size(); i = next++) hit[i] = eval_validated(program, *images[i], album);
      });
    }
  }

  std::vector<std::string> out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (hit[i]) out.push_back(images[i]->image_id);
  }
  return out;
}

}  // namespace photoscout::evaluator
