#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>

namespace photoscout::fixtures {

using annotations::BBox;
using annotations::DetectedObject;
using annotations::ImageAnnotation;
using annotations::ObjectKind;

namespace {

// mt19937's output sequence is fixed by the standard; the std distributions
// are not, so draws are mapped by hand.
class Rng {
 public:
  explicit Rng(std::uint32_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(gen_()) / 4294967296.0); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  bool chance(double p) { return uniform(0, 1) < p; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937 gen_;
};

double r3(double v) { return std::round(v * 1000.0) / 1000.0; }

BBox box(double x, double y, double w, double h) { return BBox{r3(x), r3(y), r3(w), r3(h)}; }

class ImageBuilder {
 public:
  ImageBuilder(std::string id, int width = 1200, int height = 800) {
    image_.image_id = std::move(id);
    image_.width = width;
    image_.height = height;
  }

  DetectedObject& face(const std::string& cluster, BBox b, double confidence = 0.99) {
    DetectedObject o;
    o.object_id = next_id();
    o.kind = ObjectKind::Face;
    o.face_cluster = cluster;
    o.confidence = confidence;
    o.bbox = b;
    image_.objects.push_back(std::move(o));
    return image_.objects.back();
  }

  DetectedObject& thing(const std::string& label, BBox b, double confidence = 0.95) {
    DetectedObject o;
    o.object_id = next_id();
    o.kind = ObjectKind::Thing;
    o.label = label;
    o.confidence = confidence;
    o.bbox = b;
    image_.objects.push_back(std::move(o));
    return image_.objects.back();
  }

  ImageAnnotation build() { return std::move(image_); }

 private:
  std::string next_id() { return "o" + std::to_string(image_.objects.size() + 1); }

  ImageAnnotation image_;
};

void decorate_face(DetectedObject& f, Rng& rng) {
  if (rng.chance(0.7)) f.properties.insert("smiling");
  if (rng.chance(0.85)) f.properties.insert("eyesopen");
  if (rng.chance(0.1)) f.properties.insert("eyeglasses");
  static const std::vector<std::string> kEmotions = {"happy", "calm", "surprised"};
  f.emotion = rng.pick(kEmotions);
  const int lo = 20 + static_cast<int>(rng.below(40));
  f.age_range = std::pair{lo, lo + 10};
}

std::string padded(const std::string& prefix, std::size_t n, int width = 4) {
  std::string digits = std::to_string(n);
  return prefix + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(digits.size()))), '0') +
         digits;
}

}  // namespace

annotations::Album FixtureAlbum::album(annotations::AlbumConfig config) const {
  return annotations::Album(id, images, {}, config);
}

// ============================================================================
// Small albums
// ============================================================================

FixtureAlbum fig1() {
  FixtureAlbum out;
  out.id = "fig1";
  // Images 1-3: bouquet just below the bride's face, overlapping it.
  const double xs[] = {0.30, 0.25, 0.40};
  for (int i = 0; i < 3; ++i) {
    const double ox = xs[i];
    ImageBuilder b("img" + std::to_string(i + 1));
    b.face("c01", box(ox, 0.22, 0.09, 0.12)).properties = {"smiling", "eyesopen"};
    b.face("c02", box(ox + 0.12, 0.20, 0.10, 0.13)).properties = {"smiling"};
    b.thing("flower", box(ox - 0.005, 0.31, 0.13, 0.14));
    if (i == 1) b.thing("cake", box(0.70, 0.60, 0.15, 0.15));
    out.images.push_back(b.build());
    out.positives.push_back("img" + std::to_string(i + 1));
  }
  // Image 4: the bride's face sits low, level with the groom's boutonniere.
  ImageBuilder b("img4");
  b.face("c01", box(0.40, 0.24, 0.09, 0.12)).properties = {"smiling", "eyesopen"};
  b.face("c02", box(0.52, 0.15, 0.10, 0.13)).properties = {"eyesopen"};
  b.thing("flower", box(0.545, 0.30, 0.04, 0.05));
  out.images.push_back(b.build());
  out.negatives.push_back("img4");
  out.ground_truth = {"img1", "img2", "img3"};
  return out;
}

FixtureAlbum fig6() {
  FixtureAlbum out;
  out.id = "fig6";
  auto row = [](ImageBuilder& b, int faces, double y) {
    for (int i = 0; i < faces; ++i) {
      const double x = 0.08 + 0.22 * i;
      auto& f = b.face("c1" + std::to_string(i), box(x, y, 0.08, 0.10));
      f.properties = {"smiling", "eyesopen"};
      f.emotion = "happy";
    }
  };
  auto flowers_under = [](ImageBuilder& b, int n, double y) {
    for (int i = 0; i < n; ++i) b.thing("flower", box(0.07 + 0.22 * i, y + 0.14, 0.10, 0.10));
  };
  {
    ImageBuilder b("fig6_1");  // four smiling faces, a flower under each
    row(b, 4, 0.20);
    flowers_under(b, 4, 0.20);
    out.images.push_back(b.build());
  }
  {
    ImageBuilder b("fig6_2");  // one face not smiling
    row(b, 3, 0.20);
    flowers_under(b, 3, 0.20);
    out.images.push_back(b.build());
    out.images.back().objects[1].properties = {"eyesopen"};
  }
  {
    ImageBuilder b("fig6_3");  // second face has no flower below it
    row(b, 2, 0.20);
    flowers_under(b, 1, 0.20);
    out.images.push_back(b.build());
  }
  {
    ImageBuilder b("fig6_4");  // no faces at all
    b.thing("flower", box(0.30, 0.50, 0.10, 0.10));
    b.thing("chair", box(0.60, 0.55, 0.15, 0.25));
    out.images.push_back(b.build());
  }
  {
    ImageBuilder b("fig6_5");  // flowers beside the faces, not below
    row(b, 2, 0.20);
    b.thing("flower", box(0.08 + 0.09, 0.34, 0.04, 0.10));
    b.thing("flower", box(0.30 + 0.09, 0.34, 0.04, 0.10));
    out.images.push_back(b.build());
  }
  {
    ImageBuilder b("fig6_6");  // a frowning face below the confidence threshold
    row(b, 2, 0.20);
    flowers_under(b, 2, 0.20);
    auto& ghost = b.face("c19", box(0.75, 0.60, 0.06, 0.08), 0.30);
    ghost.properties = {};
    out.images.push_back(b.build());
  }
  out.ground_truth = {"fig6_1", "fig6_4", "fig6_6"};
  return out;
}

FixtureAlbum transportation() {
  FixtureAlbum out;
  out.id = "transportation";
  {
    ImageBuilder b("t1");
    b.thing("car", box(0.10, 0.50, 0.35, 0.25));
    b.thing("bicycle", box(0.60, 0.55, 0.20, 0.20));
    out.images.push_back(b.build());
  }
  {
    ImageBuilder b("t2");
    b.thing("car", box(0.20, 0.45, 0.40, 0.30));
    b.thing("person", box(0.70, 0.30, 0.10, 0.40));
    out.images.push_back(b.build());
  }
  {
    ImageBuilder b("t3");
    b.thing("bicycle", box(0.30, 0.50, 0.25, 0.25));
    b.thing("person", box(0.32, 0.20, 0.12, 0.45));
    b.face("c01", box(0.35, 0.22, 0.05, 0.07));
    out.images.push_back(b.build());
  }
  {
    ImageBuilder b("t4");
    b.thing("bus", box(0.05, 0.20, 0.50, 0.45));
    b.thing("car", box(0.55, 0.55, 0.25, 0.20));
    b.thing("bicycle", box(0.82, 0.60, 0.15, 0.15));
    out.images.push_back(b.build());
  }
  out.ground_truth = {"t1", "t4"};
  return out;
}

// ============================================================================
// Wedding
// ============================================================================

namespace {

// Categories of the wedding album. Only "T" satisfies the target query.
//   T   bride next to groom, bouquet just below the bride's face
//   N1  bride next to groom, the only flower is the groom's boutonniere
//   N2  a guest stands between bride and groom
//   N3  bride alone with a bouquet
//   N4  groom alone
//   N5  guests only
//   N6  bride next to groom, no flowers (a low-confidence flower detection)
//   N7  bride next to groom, table flowers away from the bride
const std::vector<std::pair<std::string, int>> kWeddingMix = {
    {"T", 40}, {"N1", 40}, {"N2", 40}, {"N3", 50}, {"N4", 50}, {"N5", 60}, {"N6", 40}, {"N7", 32},
};

void add_guests(ImageBuilder& b, Rng& rng, int n) {
  for (int i = 0; i < n; ++i) {
    const std::string cluster = padded("c", 3 + rng.below(10), 2);
    auto& f = b.face(cluster, box(rng.uniform(0.72, 0.86), rng.uniform(0.10, 0.45), 0.08, 0.11));
    decorate_face(f, rng);
  }
}

void add_props(ImageBuilder& b, Rng& rng) {
  static const std::vector<std::string> kLabels = {"cake", "chair", "table", "wine glass", "candle"};
  const int n = static_cast<int>(rng.below(3));
  for (int i = 0; i < n; ++i) {
    b.thing(rng.pick(kLabels), box(rng.uniform(0.05, 0.80), rng.uniform(0.62, 0.80), 0.12, 0.12),
            r3(rng.uniform(0.6, 0.99)));
  }
}

// Bride at (ox, y), groom immediately to her right.
void couple(ImageBuilder& b, Rng& rng, double ox, double y) {
  auto& bride = b.face("c01", box(ox, y, 0.09, 0.12));
  decorate_face(bride, rng);
  const double gap = rng.uniform(0.01, 0.06);
  auto& groom = b.face("c02", box(ox + 0.09 + gap, y + rng.uniform(-0.04, 0.02), 0.10, 0.13));
  decorate_face(groom, rng);
}

void bouquet(ImageBuilder& b, Rng& rng, double ox, double y) {
  b.thing("flower", box(ox - 0.01 + rng.uniform(0.0, 0.03), y + 0.09, 0.13, 0.14), r3(rng.uniform(0.8, 0.99)));
}

ImageAnnotation wedding_image(const std::string& id, const std::string& category, Rng& rng) {
  ImageBuilder b(id, 1200 + 40 * static_cast<int>(rng.below(3)), 800);
  const double ox = rng.uniform(0.05, 0.35);
  const double y = rng.uniform(0.18, 0.28);
  if (category == "T") {
    couple(b, rng, ox, y);
    bouquet(b, rng, ox, y);
    if (rng.chance(0.5)) add_guests(b, rng, 1 + static_cast<int>(rng.below(2)));
  } else if (category == "N1") {
    const double bx = ox + 0.15;
    auto& groom = b.face("c02", box(bx, y - 0.05, 0.10, 0.13));
    decorate_face(groom, rng);
    b.thing("flower", box(bx + 0.025, y + 0.10, 0.04, 0.05), r3(rng.uniform(0.8, 0.99)));
    auto& bride = b.face("c01", box(bx - 0.09 - rng.uniform(0.01, 0.04), y + 0.04, 0.09, 0.12));
    decorate_face(bride, rng);
  } else if (category == "N2") {
    auto& bride = b.face("c01", box(ox, y, 0.09, 0.12));
    decorate_face(bride, rng);
    auto& guest = b.face(padded("c", 3 + rng.below(10), 2), box(ox + 0.11, y, 0.09, 0.12));
    decorate_face(guest, rng);
    auto& groom = b.face("c02", box(ox + 0.22, y, 0.10, 0.13));
    decorate_face(groom, rng);
    bouquet(b, rng, ox, y);
  } else if (category == "N3") {
    auto& bride = b.face("c01", box(ox, y, 0.09, 0.12));
    decorate_face(bride, rng);
    bouquet(b, rng, ox, y);
    if (rng.chance(0.5)) add_guests(b, rng, 1);
  } else if (category == "N4") {
    auto& groom = b.face("c02", box(ox, y, 0.10, 0.13));
    decorate_face(groom, rng);
    if (rng.chance(0.5)) b.thing("flower", box(ox + 0.03, y + 0.15, 0.04, 0.05));
    if (rng.chance(0.5)) add_guests(b, rng, 1);
  } else if (category == "N5") {
    add_guests(b, rng, 1 + static_cast<int>(rng.below(3)));
    if (rng.chance(0.5)) b.thing("flower", box(rng.uniform(0.05, 0.6), rng.uniform(0.5, 0.7), 0.12, 0.12));
  } else if (category == "N6") {
    couple(b, rng, ox, y);
    b.thing("flower", box(ox, y + 0.09, 0.13, 0.14), 0.30);
  } else if (category == "N7") {
    // Bride at least 0.30 from the left edge; table flowers end before 0.15.
    const double shifted = 0.30 + (ox - 0.05) / 2;
    couple(b, rng, shifted, y);
    b.thing("flower", box(rng.uniform(0.01, 0.04), rng.uniform(0.60, 0.75), 0.10, 0.10));
    b.thing("table", box(0.0, 0.70, 0.25, 0.25));
  } else {
    throw std::logic_error("unknown wedding category " + category);
  }
  add_props(b, rng);
  return b.build();
}

}  // namespace

FixtureAlbum wedding() {
  FixtureAlbum out;
  out.id = "wedding";
  Rng rng(20240611);
  std::vector<std::string> categories;
  for (const auto& [name, count] : kWeddingMix) categories.insert(categories.end(), static_cast<std::size_t>(count), name);
  rng.shuffle(categories);
  // The scenario labels w_0001 positive and w_0004 negative.
  auto place = [&](std::size_t slot, const std::string& want) {
    if (categories[slot] == want) return;
    for (std::size_t j = 0; j < categories.size(); ++j) {
      if (j != 0 && j != 3 && categories[j] == want) {
        std::swap(categories[slot], categories[j]);
        return;
      }
    }
  };
  place(0, "T");
  place(3, "N1");
  for (std::size_t i = 0; i < categories.size(); ++i) {
    const std::string id = padded("w_", i + 1);
    out.images.push_back(wedding_image(id, categories[i], rng));
    out.categories[id] = categories[i];
    if (categories[i] == "T") out.ground_truth.push_back(id);
  }
  out.positives = {"w_0001"};
  out.negatives = {"w_0004"};
  return out;
}

// ============================================================================
// Festival
// ============================================================================

FixtureAlbum festival() {
  FixtureAlbum out;
  out.id = "festival";
  Rng rng(5309);
  static const std::vector<std::string> kLabels = {"guitar", "drum", "speaker", "stage light", "hat",
                                                   "bottle", "flag",  "tent",    "backpack"};
  std::vector<std::string> plain_with_both;
  for (std::size_t i = 1; i <= 400; ++i) {
    const std::string id = padded("f_", i);
    ImageBuilder b(id, 1600, 900);
    const bool singer = rng.chance(0.3);
    const int people = 1 + static_cast<int>(rng.below(4));
    bool has_person = false;
    for (int p = 0; p < people; ++p) {
      const double x = rng.uniform(0.02, 0.80);
      const double y = rng.uniform(0.05, 0.30);
      b.thing("person", box(x, y, 0.15, 0.45), r3(rng.uniform(0.7, 0.99)));
      auto& f = b.face(padded("c", 1 + rng.below(40), 2), box(x + 0.04, y + 0.02, 0.06, 0.08));
      decorate_face(f, rng);
      has_person = true;
      if (singer && p == 0) b.thing("microphone", box(x + 0.05, y + 0.12, 0.03, 0.05), 0.9);
    }
    bool stray_mic = false;
    if (!singer && rng.chance(0.5)) {
      // Mic stands at the bottom edge, below every person box.
      b.thing("microphone", box(rng.uniform(0.05, 0.90), rng.uniform(0.86, 0.92), 0.03, 0.06), 0.9);
      stray_mic = true;
    }
    const int extras = 3 + static_cast<int>(rng.below(7));
    for (int e = 0; e < extras; ++e) {
      b.thing(rng.pick(kLabels), box(rng.uniform(0.0, 0.84), rng.uniform(0.0, 0.80), rng.uniform(0.04, 0.15), rng.uniform(0.04, 0.15)),
              r3(rng.uniform(0.4, 0.99)));
    }
    out.images.push_back(b.build());
    out.categories[id] = singer ? "singer" : "other";
    if (singer) out.ground_truth.push_back(id);
    if (!singer && stray_mic && has_person) plain_with_both.push_back(id);
  }
  for (std::size_t i = 0; i < 3 && i < out.ground_truth.size(); ++i) out.positives.push_back(out.ground_truth[i]);
  for (std::size_t i = 0; i < 3 && i < plain_with_both.size(); ++i) out.negatives.push_back(plain_with_both[i]);
  return out;
}

std::vector<FixtureAlbum> all() { return {fig1(), fig6(), transportation(), wedding(), festival()}; }

void write_album(const FixtureAlbum& album, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& image : album.images) {
    std::ofstream out(dir / (image.image_id + ".json"));
    if (!out) throw std::runtime_error("cannot write " + (dir / image.image_id).string());
    out << annotations::annotation_to_json(image) << '\n';
  }
  {
    std::ofstream out(dir / "ground_truth.txt");
    for (const auto& id : album.ground_truth) out << id << '\n';
  }
  {
    std::ofstream out(dir / "examples.txt");
    for (const auto& id : album.positives) out << "pos " << id << '\n';
    for (const auto& id : album.negatives) out << "neg " << id << '\n';
  }
}

}  // namespace photoscout::fixtures
