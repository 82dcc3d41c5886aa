#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "photoscout/annotations.hpp"
#include "photoscout/errors.hpp"

namespace photoscout::annotations {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Reader {
 public:
  explicit Reader(const std::string& file) : file_(file) {}

  [[noreturn]] void fail(const std::string& where, const std::string& detail) const {
    throw SchemaError(file_, where.empty() ? detail : where + ": " + detail);
  }

  void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) const {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [key, value] : obj.items()) {
      if (!allowed.count(key)) fail(where, "unknown field '" + key + "'");
    }
  }

  const json& field(const json& obj, const std::string& key, const std::string& where) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, "missing field '" + key + "'");
    return *it;
  }

  std::string string_field(const json& obj, const std::string& key, const std::string& where) const {
    const json& v = field(obj, key, where);
    if (!v.is_string() || v.get<std::string>().empty()) fail(where, "'" + key + "' must be a non-empty string");
    return v.get<std::string>();
  }

  double number_field(const json& obj, const std::string& key, const std::string& where) const {
    const json& v = field(obj, key, where);
    if (!v.is_number()) fail(where, "'" + key + "' must be a number");
    return v.get<double>();
  }

  int positive_int(const json& obj, const std::string& key, const std::string& where) const {
    const json& v = field(obj, key, where);
    if (!v.is_number_integer() || v.get<long long>() <= 0) fail(where, "'" + key + "' must be a positive integer");
    return v.get<int>();
  }

  std::string token(const json& v, const std::string& where) const {
    if (!v.is_string()) fail(where, "expected a string");
    std::string t = dsl::canonicalize(v.get<std::string>());
    if (t.empty() || t.find('"') != std::string::npos) fail(where, "invalid token");
    return t;
  }

 private:
  std::string file_;
};

DetectedObject parse_object(const Reader& r, const json& j, const std::string& where) {
  if (!j.is_object()) r.fail(where, "expected an object");
  DetectedObject o;
  const std::string kind = r.string_field(j, "kind", where);
  if (kind == "thing") {
    r.only_keys(j, {"object_id", "kind", "label", "confidence", "bbox"}, where);
    o.kind = ObjectKind::Thing;
    o.label = r.token(r.field(j, "label", where), where + ".label");
  } else if (kind == "face") {
    r.only_keys(j, {"object_id", "kind", "face_cluster", "confidence", "bbox", "properties", "emotion", "age_range"},
                where);
    o.kind = ObjectKind::Face;
    o.face_cluster = r.string_field(j, "face_cluster", where);
    if (auto it = j.find("properties"); it != j.end()) {
      if (!it->is_array()) r.fail(where, "'properties' must be an array");
      for (const auto& p : *it) o.properties.insert(r.token(p, where + ".properties"));
    }
    if (auto it = j.find("emotion"); it != j.end()) o.emotion = r.token(*it, where + ".emotion");
    if (auto it = j.find("age_range"); it != j.end()) {
      if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() || !(*it)[1].is_number_integer()) {
        r.fail(where, "'age_range' must be [lo, hi] integers");
      }
      const int lo = (*it)[0].get<int>();
      const int hi = (*it)[1].get<int>();
      if (lo > hi) r.fail(where, "'age_range' lower bound exceeds upper bound");
      o.age_range = std::make_pair(lo, hi);
    }
  } else {
    r.fail(where, "'kind' must be \"thing\" or \"face\"");
  }
  o.object_id = r.string_field(j, "object_id", where);
  o.confidence = r.number_field(j, "confidence", where);
  if (o.confidence < 0 || o.confidence > 1) r.fail(where, "'confidence' must lie in [0,1]");

  const json& box = r.field(j, "bbox", where);
  r.only_keys(box, {"x", "y", "w", "h"}, where + ".bbox");
  o.bbox = BBox{r.number_field(box, "x", where + ".bbox"), r.number_field(box, "y", where + ".bbox"),
                r.number_field(box, "w", where + ".bbox"), r.number_field(box, "h", where + ".bbox")};
  if (std::string why = o.bbox.validate(); !why.empty()) r.fail(where + ".bbox", why);
  return o;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path.string(), "cannot read file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

ImageAnnotation parse_annotation(std::string_view json_text, const std::string& file) {
  const Reader r(file);
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(file, std::string("malformed JSON: ") + e.what());
  }
  r.only_keys(doc, {"image_id", "width", "height", "objects"}, "");

  ImageAnnotation image;
  image.image_id = r.string_field(doc, "image_id", "");
  image.width = r.positive_int(doc, "width", "");
  image.height = r.positive_int(doc, "height", "");
  const json& objects = r.field(doc, "objects", "");
  if (!objects.is_array()) r.fail("", "'objects' must be an array");

  std::set<std::string> seen;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    DetectedObject o = parse_object(r, objects[i], "objects[" + std::to_string(i) + "]");
    if (!seen.insert(o.object_id).second) r.fail("objects[" + std::to_string(i) + "]", "duplicate object_id '" + o.object_id + "'");
    image.objects.push_back(std::move(o));
  }
  return image;
}

std::string annotation_to_json(const ImageAnnotation& image) {
  nlohmann::ordered_json doc;
  doc["image_id"] = image.image_id;
  doc["width"] = image.width;
  doc["height"] = image.height;
  doc["objects"] = nlohmann::ordered_json::array();
  for (const auto& o : image.objects) {
    nlohmann::ordered_json j;
    j["object_id"] = o.object_id;
    j["kind"] = o.kind == ObjectKind::Face ? "face" : "thing";
    if (o.kind == ObjectKind::Thing) {
      j["label"] = o.label;
    } else {
      j["face_cluster"] = o.face_cluster;
    }
    j["confidence"] = o.confidence;
    j["bbox"] = {{"x", o.bbox.x}, {"y", o.bbox.y}, {"w", o.bbox.w}, {"h", o.bbox.h}};
    if (o.kind == ObjectKind::Face) {
      if (!o.properties.empty()) j["properties"] = o.properties;
      if (o.emotion) j["emotion"] = *o.emotion;
      if (o.age_range) j["age_range"] = {o.age_range->first, o.age_range->second};
    }
    doc["objects"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

TagRegistry parse_tags(std::string_view json_text, const std::string& file) {
  const Reader r(file);
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(file, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) r.fail("", "expected an object of name -> target");
  TagRegistry tags;
  for (const auto& [name, target] : doc.items()) {
    const std::string key = dsl::canonicalize(name);
    if (key.empty()) r.fail(name, "empty tag name");
    if (target.is_string()) {
      tags.insert_or_assign(key, FaceClusterTarget{target.get<std::string>()});
    } else if (target.is_array()) {
      ObjectSetTarget set;
      for (const auto& ref : target) {
        r.only_keys(ref, {"image_id", "object_id"}, name);
        set.objects.insert({r.string_field(ref, "image_id", name), r.string_field(ref, "object_id", name)});
      }
      tags.insert_or_assign(key, std::move(set));
    } else {
      r.fail(name, "tag target must be a face cluster id or a list of object references");
    }
  }
  return tags;
}

Album load_album(const fs::path& dir, std::string album_id, AlbumConfig config) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw SchemaError(dir.string(), "not a directory");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.extension() != ".json" || p.filename() == "tags.json") continue;
    files.push_back(p);
  }
  std::sort(files.begin(), files.end());

  std::vector<ImageAnnotation> images;
  std::set<std::string> ids;
  for (const auto& p : files) {
    ImageAnnotation image = parse_annotation(read_file(p), p.filename().string());
    if (!ids.insert(image.image_id).second) throw DuplicateImageId(image.image_id);
    images.push_back(std::move(image));
  }

  if (album_id.empty()) album_id = fs::absolute(dir).lexically_normal().filename().string();
  Album album(std::move(album_id), std::move(images), {}, config);

  const fs::path tags_file = dir / "tags.json";
  if (fs::exists(tags_file)) {
    for (auto& [name, target] : parse_tags(read_file(tags_file), "tags.json")) {
      try {
        album = album.with_tag(name, std::move(target));
      } catch (const Error& e) {
        throw SchemaError("tags.json", e.what());
      }
    }
  }
  return album;
}

}  // namespace photoscout::annotations
