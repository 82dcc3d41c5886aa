#include <algorithm>

#include "photoscout/annotations.hpp"
#include "photoscout/errors.hpp"

namespace photoscout::annotations {

double horizontal_overlap(const BBox& a, const BBox& b) {
  return std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
}

double vertical_overlap(const BBox& a, const BBox& b) {
  return std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
}

double horizontal_gap(const BBox& a, const BBox& b) {
  return std::max(0.0, std::max(a.x, b.x) - std::min(a.right(), b.right()));
}

double intersection_area(const BBox& a, const BBox& b) {
  return horizontal_overlap(a, b) * vertical_overlap(a, b);
}

SpatialRelation spatial_relation_from_name(std::string_view rel) {
  const std::string name = dsl::canonicalize(rel);
  if (name == "above") return SpatialRelation::Above;
  if (name == "below") return SpatialRelation::Below;
  if (name == "left") return SpatialRelation::Left;
  if (name == "right") return SpatialRelation::Right;
  if (name == "nextto") return SpatialRelation::NextTo;
  if (name == "inside") return SpatialRelation::Inside;
  if (name == "contains") return SpatialRelation::Contains;
  throw UnknownRelation(std::string(rel));
}

bool spatial_relation(const BBox& a, const BBox& b, SpatialRelation rel, const GeometryConfig& g) {
  switch (rel) {
    case SpatialRelation::Left:
      return a.cx() < b.cx();
    case SpatialRelation::Right:
      return a.cx() > b.cx();
    case SpatialRelation::Above:
      return a.cy() < b.cy() && horizontal_overlap(a, b) >= g.above_min_overlap * std::min(a.w, b.w);
    case SpatialRelation::Below:
      return a.cy() > b.cy() && horizontal_overlap(a, b) >= g.above_min_overlap * std::min(a.w, b.w);
    case SpatialRelation::NextTo: {
      const bool intersect = horizontal_overlap(a, b) > 0 && vertical_overlap(a, b) > 0;
      return intersect || (horizontal_gap(a, b) <= g.nextto_max_gap && vertical_overlap(a, b) > 0);
    }
    case SpatialRelation::Inside:
      return intersection_area(a, b) >= g.inside_min_fraction * a.area();
    case SpatialRelation::Contains:
      return intersection_area(b, a) >= g.inside_min_fraction * b.area();
  }
  return false;
}

bool spatial_relation(const DetectedObject& a, const DetectedObject& b, std::string_view rel,
                      const GeometryConfig& geometry) {
  return spatial_relation(a.bbox, b.bbox, spatial_relation_from_name(rel), geometry);
}

}  // namespace photoscout::annotations
