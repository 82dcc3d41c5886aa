#include "oracle.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

namespace oracle {

using photoscout::annotations::BBox;
using photoscout::annotations::DetectedObject;
using photoscout::annotations::ImageAnnotation;
using photoscout::annotations::ObjectKind;

std::string to_text(const Formula& f) {
  switch (f.kind) {
    case Formula::Atom: {
      std::string s = f.predicate + "(";
      for (std::size_t i = 0; i < f.args.size(); ++i) s += (i ? ", " : "") + f.args[i].text;
      return s + ")";
    }
    case Formula::Not:
      return "!(" + to_text(f.kids[0]) + ")";
    case Formula::And:
      return "(" + to_text(f.kids[0]) + " && " + to_text(f.kids[1]) + ")";
    case Formula::Or:
      return "(" + to_text(f.kids[0]) + " || " + to_text(f.kids[1]) + ")";
    case Formula::Implies:
      return "(" + to_text(f.kids[0]) + " -> " + to_text(f.kids[1]) + ")";
    case Formula::Exists:
      return "(exists " + f.var + ". (" + to_text(f.kids[0]) + "))";
    case Formula::Forall:
      return "(forall " + f.var + ". (" + to_text(f.kids[0]) + "))";
  }
  return {};
}

std::size_t size(const Formula& f) {
  std::size_t n = 1;
  if (f.kind == Formula::Atom) return n + f.args.size();
  for (const auto& k : f.kids) n += size(k);
  return n;
}

Formula substitute(const Formula& f, const std::map<std::string, std::string>& fill) {
  Formula out = f;
  for (auto& t : out.args) {
    if (t.is_var) continue;
    if (auto it = fill.find(t.text); it != fill.end()) t.text = it->second;
  }
  for (auto& k : out.kids) k = substitute(k, fill);
  return out;
}

// ===========================================================================
// Geometry
// ===========================================================================

namespace {

struct Interval {
  double lo;
  double hi;
};

double overlap(Interval a, Interval b) {
  const double lo = a.lo > b.lo ? a.lo : b.lo;
  const double hi = a.hi < b.hi ? a.hi : b.hi;
  return hi > lo ? hi - lo : 0.0;
}

double gap(Interval a, Interval b) {
  if (a.hi < b.lo) return b.lo - a.hi;
  if (b.hi < a.lo) return a.lo - b.hi;
  return 0.0;
}

Interval xs(const BBox& b) { return {b.x, b.x + b.w}; }
Interval ys(const BBox& b) { return {b.y, b.y + b.h}; }
double center_x(const BBox& b) { return b.x + b.w / 2; }
double center_y(const BBox& b) { return b.y + b.h / 2; }

bool above(const BBox& a, const BBox& b) {
  return center_y(a) < center_y(b) && overlap(xs(a), xs(b)) >= 0.25 * std::min(a.w, b.w);
}

bool inside(const BBox& a, const BBox& b) {
  return overlap(xs(a), xs(b)) * overlap(ys(a), ys(b)) >= 0.9 * (a.w * a.h);
}

}  // namespace

bool relation_holds(const std::string& rel, const BBox& a, const BBox& b) {
  if (rel == "left") return center_x(a) < center_x(b);
  if (rel == "right") return center_x(b) < center_x(a);
  if (rel == "above") return above(a, b);
  if (rel == "below") return above(b, a);
  if (rel == "inside") return inside(a, b);
  if (rel == "contains") return inside(b, a);
  if (rel == "nextto") {
    const bool meet = overlap(xs(a), xs(b)) > 0 && overlap(ys(a), ys(b)) > 0;
    return meet || (gap(xs(a), xs(b)) <= 0.10 && overlap(ys(a), ys(b)) > 0);
  }
  throw std::invalid_argument("oracle: unknown relation " + rel);
}

// ===========================================================================
// Evaluation
// ===========================================================================

namespace {

using Key = std::vector<int>;
// Truth of a subformula for every assignment of its free variables, which are
// kept sorted by name.
struct Table {
  std::vector<std::string> free;
  std::map<Key, bool> truth;
};

std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> out;
  if (f.kind == Formula::Atom) {
    for (const auto& t : f.args) {
      if (t.is_var) out.insert(t.text);
    }
    return out;
  }
  for (const auto& k : f.kids) {
    auto sub = free_vars(k);
    out.insert(sub.begin(), sub.end());
  }
  if (f.kind == Formula::Exists || f.kind == Formula::Forall) out.erase(f.var);
  return out;
}

// Every assignment of `vars` to 0..n-1.
std::vector<std::map<std::string, int>> assignments(const std::vector<std::string>& vars, int n) {
  std::vector<std::map<std::string, int>> out{{}};
  for (const auto& v : vars) {
    std::vector<std::map<std::string, int>> next;
    for (const auto& a : out) {
      for (int o = 0; o < n; ++o) {
        auto b = a;
        b[v] = o;
        next.push_back(std::move(b));
      }
    }
    out = std::move(next);
  }
  return out;
}

Key project(const Table& t, const std::map<std::string, int>& env) {
  Key k;
  for (const auto& v : t.free) k.push_back(env.at(v));
  return k;
}

class Evaluator {
 public:
  Evaluator(const ImageAnnotation& image, const World& world) : image_(image), world_(world) {
    for (const auto& o : image.objects) {
      if (o.confidence >= world.threshold) domain_.push_back(&o);
    }
  }

  bool run(const Formula& f) {
    const Table t = build(f);
    return t.truth.at({});
  }

 private:
  bool has_type(const DetectedObject& o, const std::string& c) const {
    if (c == "face") return o.kind == ObjectKind::Face;
    if (auto it = world_.tags.find(c); it != world_.tags.end()) {
      if (const auto* cluster = std::get_if<photoscout::annotations::FaceClusterTarget>(&it->second)) {
        return o.kind == ObjectKind::Face && o.face_cluster == cluster->cluster;
      }
      const auto& set = std::get<photoscout::annotations::ObjectSetTarget>(it->second).objects;
      return set.count({image_.image_id, o.object_id}) == 1;
    }
    return o.kind == ObjectKind::Thing && o.label == c;
  }

  bool atom(const Formula& f, const std::map<std::string, int>& env) const {
    const DetectedObject& x = *domain_[static_cast<std::size_t>(env.at(f.args[0].text))];
    if (f.predicate == "HasType") return has_type(x, f.args[1].text);
    if (f.predicate == "HasProperty") return x.kind == ObjectKind::Face && x.properties.count(f.args[1].text) == 1;
    if (f.predicate == "HasEmotion") return x.kind == ObjectKind::Face && x.emotion && *x.emotion == f.args[1].text;
    if (f.predicate == "HasRelation") {
      const int xi = env.at(f.args[0].text);
      const int yi = env.at(f.args[1].text);
      if (xi == yi) return false;
      return relation_holds(f.args[2].text, x.bbox, domain_[static_cast<std::size_t>(yi)]->bbox);
    }
    throw std::invalid_argument("oracle: unknown predicate " + f.predicate);
  }

  Table build(const Formula& f) {
    Table t;
    const auto fv = free_vars(f);
    t.free.assign(fv.begin(), fv.end());
    const int n = static_cast<int>(domain_.size());
    std::vector<Table> kids;
    for (const auto& k : f.kids) kids.push_back(build(k));
    for (const auto& env : assignments(t.free, n)) {
      bool value = false;
      switch (f.kind) {
        case Formula::Atom:
          value = atom(f, env);
          break;
        case Formula::Not:
          value = !kids[0].truth.at(project(kids[0], env));
          break;
        case Formula::And:
          value = kids[0].truth.at(project(kids[0], env)) && kids[1].truth.at(project(kids[1], env));
          break;
        case Formula::Or:
          value = kids[0].truth.at(project(kids[0], env)) || kids[1].truth.at(project(kids[1], env));
          break;
        case Formula::Implies:
          value = !kids[0].truth.at(project(kids[0], env)) || kids[1].truth.at(project(kids[1], env));
          break;
        case Formula::Exists:
        case Formula::Forall: {
          int count = 0;
          for (int o = 0; o < n; ++o) {
            auto extended = env;
            extended[f.var] = o;
            if (kids[0].truth.at(project(kids[0], extended))) ++count;
          }
          value = f.kind == Formula::Exists ? count > 0 : count == n;
          break;
        }
      }
      t.truth[project(t, env)] = value;
    }
    return t;
  }

  const ImageAnnotation& image_;
  const World& world_;
  std::vector<const DetectedObject*> domain_;
};

}  // namespace

bool eval(const Formula& f, const ImageAnnotation& image, const World& world) {
  return Evaluator(image, world).run(f);
}

// ===========================================================================
// Random instances
// ===========================================================================

namespace {

const std::vector<std::string> kLabels = {"cat", "dog", "tree"};
const std::vector<std::string> kClusters = {"c1", "c2", "c3"};
const std::vector<std::string> kProperties = {"smiling", "eyesopen", "beard", "sunglasses"};
const std::vector<std::string> kEmotions = {"happy", "sad", "calm"};

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))];
}

class FormulaGen {
 public:
  FormulaGen(Rng& rng, const Pools& pools, int quantifiers) : rng_(rng), pools_(pools), quantifiers_(quantifiers) {}

  Formula top(int atoms) {
    if (quantifiers_ >= 2 && atoms >= 2 && coin(rng_, 0.3)) {
      const int left = uniform(rng_, 1, atoms - 1);
      Formula f;
      f.kind = pick(rng_, std::vector<Formula::Kind>{Formula::And, Formula::Or, Formula::Implies});
      f.kids.push_back(quantified({}, left));
      f.kids.push_back(quantified({}, atoms - left));
      return f;
    }
    return quantified({}, atoms);
  }

 private:
  Formula quantified(std::vector<std::string> vars, int atoms) {
    --quantifiers_;
    Formula f;
    f.kind = coin(rng_, 0.5) ? Formula::Exists : Formula::Forall;
    f.var = "x" + std::to_string(next_var_++);
    vars.push_back(f.var);
    f.kids.push_back(body(vars, atoms));
    return f;
  }

  Formula body(const std::vector<std::string>& vars, int atoms) {
    if (quantifiers_ > 0 && coin(rng_, 0.3)) return quantified(vars, atoms);
    if (coin(rng_, 0.15)) {
      Formula f;
      f.kind = Formula::Not;
      f.kids.push_back(body(vars, atoms));
      return f;
    }
    if (atoms == 1) return atom(vars);
    const int left = uniform(rng_, 1, atoms - 1);
    Formula f;
    f.kind = pick(rng_, std::vector<Formula::Kind>{Formula::And, Formula::And, Formula::Or, Formula::Implies});
    f.kids.push_back(body(vars, left));
    f.kids.push_back(body(vars, atoms - left));
    return f;
  }

  Formula atom(const std::vector<std::string>& vars) {
    Formula f;
    const int which = uniform(rng_, 0, 9);
    const std::string& x = pick(rng_, vars);
    if (which < 4) {
      f.predicate = "HasType";
      f.args = {{true, x}, {false, pick(rng_, pools_.types)}};
    } else if (which < 6) {
      f.predicate = "HasProperty";
      f.args = {{true, x}, {false, pick(rng_, pools_.properties)}};
    } else if (which < 7) {
      f.predicate = "HasEmotion";
      f.args = {{true, x}, {false, pick(rng_, pools_.emotions)}};
    } else {
      f.predicate = "HasRelation";
      f.args = {{true, x}, {true, pick(rng_, vars)}, {false, pick(rng_, pools_.relations)}};
    }
    return f;
  }

  Rng& rng_;
  const Pools& pools_;
  int quantifiers_;
  int next_var_ = 0;
};

BBox grid_box(Rng& rng) {
  const int x = uniform(rng, 0, 15);
  const int y = uniform(rng, 0, 15);
  const int w = uniform(rng, 1, std::min(6, 16 - x));
  const int h = uniform(rng, 1, std::min(6, 16 - y));
  return BBox{x / 16.0, y / 16.0, w / 16.0, h / 16.0};
}

}  // namespace

Pools default_pools() {
  Pools p;
  p.types = {"face", "cat", "dog", "tree", "alice", "bag"};
  p.properties = kProperties;
  p.emotions = kEmotions;
  p.relations = {"above", "below", "contains", "inside", "left", "nextto", "right"};
  return p;
}

Formula random_formula(Rng& rng, const Pools& pools, int max_quantifiers, int max_atoms) {
  const int quantifiers = uniform(rng, 1, max_quantifiers);
  return FormulaGen(rng, pools, quantifiers).top(uniform(rng, 1, max_atoms));
}

ImageAnnotation random_image(Rng& rng, const std::string& id, int max_objects) {
  static const std::vector<double> kConfidence = {0.3, 0.5, 0.7, 0.95};
  ImageAnnotation image;
  image.image_id = id;
  image.width = 640;
  image.height = 480;
  const int n = uniform(rng, 0, max_objects);
  for (int i = 0; i < n; ++i) {
    DetectedObject o;
    o.object_id = "o" + std::to_string(i + 1);
    o.confidence = pick(rng, kConfidence);
    o.bbox = grid_box(rng);
    if (coin(rng, 0.4)) {
      o.kind = ObjectKind::Face;
      o.face_cluster = pick(rng, kClusters);
      for (const auto& p : kProperties) {
        if (coin(rng, 0.4)) o.properties.insert(p);
      }
      if (coin(rng, 0.7)) o.emotion = pick(rng, kEmotions);
    } else {
      o.kind = ObjectKind::Thing;
      o.label = pick(rng, kLabels);
    }
    image.objects.push_back(std::move(o));
  }
  return image;
}

photoscout::annotations::Album random_album(Rng& rng, int n, int max_objects) {
  std::vector<ImageAnnotation> images;
  ImageAnnotation anchor;
  anchor.image_id = "anchor";
  anchor.width = 640;
  anchor.height = 480;
  int k = 0;
  for (const auto& label : kLabels) {
    DetectedObject o;
    o.object_id = "o" + std::to_string(++k);
    o.label = label;
    o.bbox = BBox{0.1 * k, 0.1, 0.05, 0.05};
    anchor.objects.push_back(o);
  }
  for (const auto& cluster : kClusters) {
    DetectedObject o;
    o.object_id = "o" + std::to_string(++k);
    o.kind = ObjectKind::Face;
    o.face_cluster = cluster;
    o.bbox = BBox{0.1 * k, 0.5, 0.05, 0.05};
    anchor.objects.push_back(o);
  }
  images.push_back(anchor);
  photoscout::annotations::ObjectSetTarget bag;
  for (int i = 0; i < n; ++i) {
    images.push_back(random_image(rng, "r" + std::to_string(1000 + i), max_objects));
    for (const auto& o : images.back().objects) {
      if (o.kind == ObjectKind::Thing && coin(rng, 0.3)) bag.objects.insert({images.back().image_id, o.object_id});
    }
  }
  photoscout::annotations::TagRegistry tags;
  tags["alice"] = photoscout::annotations::FaceClusterTarget{"c1"};
  tags["bag"] = bag;
  return photoscout::annotations::Album("random", std::move(images), std::move(tags));
}

}  // namespace oracle
