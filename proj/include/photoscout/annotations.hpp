#pragma once

// Per-image perception facts, the tag registry that grounds user names, and
// the geometry behind the spatial relation constants.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "photoscout/dsl.hpp"

namespace photoscout::annotations {

// Normalized coordinates, origin top-left.
struct BBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double cx() const { return x + w / 2; }
  double cy() const { return y + h / 2; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }

  // Empty string when the box satisfies the invariants, otherwise the reason.
  std::string validate() const;
  friend bool operator==(const BBox&, const BBox&) = default;
};

enum class ObjectKind { Face, Thing };

struct DetectedObject {
  std::string object_id;
  ObjectKind kind = ObjectKind::Thing;
  std::string label;         // Things only
  std::string face_cluster;  // Faces only
  double confidence = 1.0;
  BBox bbox;
  std::set<std::string> properties;
  std::optional<std::string> emotion;
  std::optional<std::pair<int, int>> age_range;

  // Hover text for the labeling view, e.g. "face (cluster c17): eyes open,
  // smiling; looks happy; between 31 and 41 years old (confidence 0.98)".
  std::string describe() const;
};

struct ImageAnnotation {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<DetectedObject> objects;

  const DetectedObject* find(std::string_view object_id) const;
};

struct ObjectRef {
  std::string image_id;
  std::string object_id;
  friend auto operator<=>(const ObjectRef&, const ObjectRef&) = default;
};

struct FaceClusterTarget {
  std::string cluster;
};
struct ObjectSetTarget {
  std::set<ObjectRef> objects;
};
using TagTarget = std::variant<FaceClusterTarget, ObjectSetTarget>;

// Canonical tag name -> what it denotes.
using TagRegistry = std::map<std::string, TagTarget>;

// ============================================================================
// Spatial relations
// ============================================================================

struct GeometryConfig {
  double above_min_overlap = 0.25;    // fraction of the narrower box width
  double nextto_max_gap = 0.10;       // horizontal gap, normalized units
  double inside_min_fraction = 0.9;   // share of the inner box area
  friend bool operator==(const GeometryConfig&, const GeometryConfig&) = default;
};

enum class SpatialRelation { Above, Below, Left, Right, NextTo, Inside, Contains };

// Accepts canonical relation constants ("above", "nextto", ...). Throws
// UnknownRelation otherwise.
SpatialRelation spatial_relation_from_name(std::string_view rel);

bool spatial_relation(const BBox& a, const BBox& b, SpatialRelation rel,
                      const GeometryConfig& geometry = {});
bool spatial_relation(const DetectedObject& a, const DetectedObject& b, std::string_view rel,
                      const GeometryConfig& geometry = {});

double horizontal_overlap(const BBox& a, const BBox& b);
double vertical_overlap(const BBox& a, const BBox& b);
double horizontal_gap(const BBox& a, const BBox& b);
double intersection_area(const BBox& a, const BBox& b);

// ============================================================================
// Album
// ============================================================================

struct AlbumConfig {
  double confidence_threshold = 0.5;
  GeometryConfig geometry;
  friend bool operator==(const AlbumConfig&, const AlbumConfig&) = default;
};

// Immutable snapshot. Every mutation returns a new Album with its vocabulary
// rederived, so readers never observe a half-applied change.
class Album {
 public:
  Album() = default;
  Album(std::string album_id, std::vector<ImageAnnotation> images, TagRegistry tags = {},
        AlbumConfig config = {});

  const std::string& id() const noexcept { return id_; }
  const std::map<std::string, ImageAnnotation>& images() const noexcept { return images_; }
  const ImageAnnotation* find(std::string_view image_id) const;
  const TagRegistry& tags() const noexcept { return tags_; }
  const AlbumConfig& config() const noexcept { return config_; }
  const dsl::Vocabulary& vocabulary() const noexcept { return vocabulary_; }

  // Distinct Thing labels, sorted.
  const std::set<std::string>& labels() const noexcept { return labels_; }
  const std::set<std::string>& face_clusters() const noexcept { return clusters_; }

  // Throws UnknownCluster when the target is not in the album and TagConflict
  // when the name is reserved ("face") or already a detector label.
  Album with_tag(std::string_view name, TagTarget target) const;
  Album with_config(AlbumConfig config) const;

  std::size_t object_count() const;
  std::size_t face_count() const;

 private:
  void derive();

  std::string id_;
  std::map<std::string, ImageAnnotation> images_;
  TagRegistry tags_;
  AlbumConfig config_;
  std::set<std::string> labels_;
  std::set<std::string> clusters_;
  dsl::Vocabulary vocabulary_;
};

// Vocabulary as a pure function of annotations and tags.
dsl::Vocabulary derive_vocabulary(const std::map<std::string, ImageAnnotation>& images,
                                  const TagRegistry& tags);

Album register_tag(const Album& album, std::string_view name, TagTarget target);

// ============================================================================
// Files
// ============================================================================

// Parse one annotation document (strict schema). `file` is used in errors.
ImageAnnotation parse_annotation(std::string_view json_text, const std::string& file);
std::string annotation_to_json(const ImageAnnotation& image);

// Loads every *.json file in `dir` except tags.json, then applies tags.json if
// present. Throws SchemaError or DuplicateImageId.
Album load_album(const std::filesystem::path& dir, std::string album_id = {},
                 AlbumConfig config = {});

TagRegistry parse_tags(std::string_view json_text, const std::string& file);

// ============================================================================
// Snapshot publication
// ============================================================================

// Holds the current snapshot of one album. Readers take a shared_ptr and keep
// evaluating against it while a writer publishes a replacement.
class AlbumHandle {
 public:
  explicit AlbumHandle(Album album) : current_(std::make_shared<const Album>(std::move(album))) {}

  std::shared_ptr<const Album> snapshot() const {
    std::shared_lock lock(mutex_);
    return current_;
  }

  template <typename F>
  std::shared_ptr<const Album> update(F&& mutate) {
    std::unique_lock lock(mutex_);
    auto next = std::make_shared<const Album>(mutate(*current_));
    current_ = next;
    return next;
  }

 private:
  mutable std::shared_mutex mutex_;
  std::shared_ptr<const Album> current_;
};

}  // namespace photoscout::annotations
