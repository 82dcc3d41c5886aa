#include <algorithm>
#include <sstream>

#include "photoscout/annotations.hpp"
#include "photoscout/errors.hpp"

namespace photoscout::annotations {

namespace {

constexpr double kEps = 1e-9;

}  // namespace

std::string BBox::validate() const {
  if (x < 0 || y < 0) return "bbox origin must be non-negative";
  if (w <= 0 || h <= 0) return "bbox width and height must be positive";
  if (x + w > 1 + kEps) return "bbox x+w exceeds 1";
  if (y + h > 1 + kEps) return "bbox y+h exceeds 1";
  return {};
}

namespace {

std::string property_phrase(const std::string& p) {
  static const std::map<std::string, std::string> kPhrases = {
      {"eyesopen", "eyes open"}, {"mouthopen", "mouth open"}, {"eyeglasses", "glasses"}};
  auto it = kPhrases.find(p);
  return it == kPhrases.end() ? p : it->second;
}

}  // namespace

std::string DetectedObject::describe() const {
  std::ostringstream out;
  if (kind == ObjectKind::Face) {
    out << "face (cluster " << face_cluster << ")";
    if (!properties.empty()) {
      out << ":";
      bool first = true;
      for (const auto& p : properties) {
        out << (first ? " " : ", ") << property_phrase(p);
        first = false;
      }
    }
    if (emotion) out << "; looks " << *emotion;
    if (age_range) out << "; between " << age_range->first << " and " << age_range->second << " years old";
  } else {
    out << label;
  }
  out.precision(2);
  out << std::fixed << " (confidence " << confidence << ")";
  return out.str();
}

const DetectedObject* ImageAnnotation::find(std::string_view object_id) const {
  for (const auto& o : objects) {
    if (o.object_id == object_id) return &o;
  }
  return nullptr;
}

// ============================================================================
// Album
// ============================================================================

dsl::Vocabulary derive_vocabulary(const std::map<std::string, ImageAnnotation>& images,
                                  const TagRegistry& tags) {
  dsl::Vocabulary v = dsl::Vocabulary::builtin();
  for (const auto& [id, image] : images) {
    for (const auto& o : image.objects) {
      if (o.kind == ObjectKind::Thing) v.types.insert(o.label);
    }
  }
  for (const auto& [name, target] : tags) v.types.insert(name);
  return v;
}

Album::Album(std::string album_id, std::vector<ImageAnnotation> images, TagRegistry tags,
             AlbumConfig config)
    : id_(std::move(album_id)), tags_(std::move(tags)), config_(config) {
  for (auto& image : images) {
    std::string key = image.image_id;
    if (!images_.emplace(key, std::move(image)).second) throw DuplicateImageId(key);
  }
  derive();
}

void Album::derive() {
  labels_.clear();
  clusters_.clear();
  for (const auto& [id, image] : images_) {
    for (const auto& o : image.objects) {
      if (o.kind == ObjectKind::Thing) {
        labels_.insert(o.label);
      } else {
        clusters_.insert(o.face_cluster);
      }
    }
  }
  vocabulary_ = derive_vocabulary(images_, tags_);
}

const ImageAnnotation* Album::find(std::string_view image_id) const {
  auto it = images_.find(std::string(image_id));
  return it == images_.end() ? nullptr : &it->second;
}

Album Album::with_tag(std::string_view raw_name, TagTarget target) const {
  const std::string name = dsl::canonicalize(raw_name);
  if (name.empty() || name.find('"') != std::string::npos) {
    throw TagConflict("invalid tag name '" + std::string(raw_name) + "'");
  }
  if (name == "face" || labels_.count(name)) {
    throw TagConflict("tag name '" + name + "' collides with a detector label");
  }
  if (const auto* face = std::get_if<FaceClusterTarget>(&target)) {
    if (!clusters_.count(face->cluster)) throw UnknownCluster(face->cluster);
  } else {
    const auto& refs = std::get<ObjectSetTarget>(target).objects;
    if (refs.empty()) throw UnknownCluster("<empty object set>");
    for (const auto& ref : refs) {
      const auto* image = find(ref.image_id);
      const auto* object = image ? image->find(ref.object_id) : nullptr;
      if (!object || object->kind != ObjectKind::Thing) {
        throw UnknownCluster(ref.image_id + "/" + ref.object_id);
      }
    }
  }
  Album next = *this;
  next.tags_.insert_or_assign(name, std::move(target));
  next.vocabulary_ = derive_vocabulary(next.images_, next.tags_);
  return next;
}

Album Album::with_config(AlbumConfig config) const {
  Album next = *this;
  next.config_ = config;
  return next;
}

std::size_t Album::object_count() const {
  std::size_t n = 0;
  for (const auto& [id, image] : images_) n += image.objects.size();
  return n;
}

std::size_t Album::face_count() const {
  std::size_t n = 0;
  for (const auto& [id, image] : images_) {
    n += static_cast<std::size_t>(std::count_if(image.objects.begin(), image.objects.end(),
                                                [](const auto& o) { return o.kind == ObjectKind::Face; }));
  }
  return n;
}

Album register_tag(const Album& album, std::string_view name, TagTarget target) {
  return album.with_tag(name, std::move(target));
}

}  // namespace photoscout::annotations
