#include <ctime>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "photoscout/errors.hpp"
#include "photoscout/evaluator.hpp"
#include "photoscout/service.hpp"

namespace photoscout::service {

using annotations::Album;

namespace {

// Malformed request: wrong types, missing fields, bad envelope.
class BadRequest : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class Conflict : public Error {
 public:
  using Error::Error;
};

class Forbidden : public Error {
 public:
  using Error::Error;
};

Response error_response(int status, std::string_view code, const std::string& message) {
  Json body;
  body["v"] = kApiVersion;
  body["error"] = {{"code", code}, {"message", message}};
  return Response{status, std::move(body), {}, "application/json"};
}

template <typename F>
Response guarded(F&& route) {
  try {
    return route();
  } catch (const BadRequest& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const Json::exception& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const std::invalid_argument& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const Forbidden& e) {
    return error_response(403, "forbidden", e.what());
  } catch (const NotFound& e) {
    return error_response(404, "not_found", e.what());
  } catch (const UnknownCluster& e) {
    return error_response(404, "unknown_cluster", e.what());
  } catch (const Conflict& e) {
    return error_response(409, "conflict", e.what());
  } catch (const TagConflict& e) {
    return error_response(409, "tag_conflict", e.what());
  } catch (const InvalidExamples& e) {
    return error_response(422, "invalid_examples", e.what());
  } catch (const SchemaError& e) {
    return error_response(422, "schema_error", e.what());
  } catch (const DuplicateImageId& e) {
    return error_response(422, "schema_error", e.what());
  } catch (const SketchSourceUnavailable& e) {
    return error_response(502, "sketch_source_unavailable", e.what());
  } catch (const EndpointError& e) {
    return error_response(502, "sketch_source_unavailable", e.what());
  } catch (const EndpointTimeout& e) {
    return error_response(502, "sketch_source_unavailable", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

Json parse_body(std::string_view body) {
  if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) return Json::object();
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw BadRequest(std::string("malformed JSON body: ") + e.what());
  }
  if (!j.is_object()) throw BadRequest("request body must be a JSON object");
  return j;
}

void check_envelope(const Json& request) {
  if (request.contains("v") && request["v"] != kApiVersion) {
    throw BadRequest("unsupported payload version " + request["v"].dump());
  }
}

std::string required_string(const Json& request, const char* key) {
  if (!request.contains(key) || !request[key].is_string()) {
    throw BadRequest(std::string("field '") + key + "' must be a string");
  }
  return request[key].get<std::string>();
}

std::set<std::string> string_set(const Json& request, const char* key) {
  std::set<std::string> out;
  if (!request.contains(key)) return out;
  if (!request[key].is_array()) throw BadRequest(std::string("field '") + key + "' must be an array of strings");
  for (const auto& v : request[key]) {
    if (!v.is_string()) throw BadRequest(std::string("field '") + key + "' must be an array of strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

Json tag_target_json(const annotations::TagTarget& target) {
  if (const auto* face = std::get_if<annotations::FaceClusterTarget>(&target)) {
    return {{"face_cluster", face->cluster}};
  }
  Json objects = Json::array();
  for (const auto& ref : std::get<annotations::ObjectSetTarget>(target).objects) {
    objects.push_back({{"image_id", ref.image_id}, {"object_id", ref.object_id}});
  }
  return {{"objects", objects}};
}

annotations::TagTarget tag_target_from_json(const Json& request) {
  if (request.contains("face_cluster")) return annotations::FaceClusterTarget{required_string(request, "face_cluster")};
  if (request.contains("objects") && request["objects"].is_array()) {
    annotations::ObjectSetTarget target;
    for (const auto& o : request["objects"]) {
      if (!o.is_object()) throw BadRequest("objects must be {image_id, object_id} pairs");
      target.objects.insert({required_string(o, "image_id"), required_string(o, "object_id")});
    }
    return target;
  }
  throw BadRequest("tag needs 'face_cluster' or 'objects'");
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool safe_id(std::string_view id) {
  return !id.empty() && id != "." && id != ".." && id.find('/') == std::string_view::npos &&
         id.find('\\') == std::string_view::npos;
}

std::vector<std::string> split_path(std::string_view path) {
  path = path.substr(0, path.find('?'));
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t end = path.find('/', start);
    if (end == std::string_view::npos) end = path.size();
    if (end > start) out.emplace_back(path.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

void append_line(const std::filesystem::path& file, const Json& event) {
  if (file.empty()) return;
  std::ofstream out(file, std::ios::app);
  if (!out) {
    spdlog::warn("cannot append to event log {}", file.string());
    return;
  }
  out << event.dump() << '\n';
}

std::vector<Json> read_lines(const std::filesystem::path& file) {
  std::vector<Json> out;
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::exception&) {
      spdlog::warn("skipping malformed event in {}", file.string());
    }
  }
  return out;
}

}  // namespace

// ============================================================================
// JSON shapes
// ============================================================================

Json search_response_json(const synthesis::Outcome& outcome, const std::vector<std::string>& results,
                          const std::string& explanation) {
  Json body;
  body["v"] = kApiVersion;
  if (const auto* c = std::get_if<synthesis::Complete>(&outcome)) {
    body["status"] = "complete";
    body["program"] = dsl::render(c->program);
    body["explanation"] = explanation;
    body["results"] = results;
  } else if (const auto* n = std::get_if<synthesis::NeedsClarification>(&outcome)) {
    std::string terms;
    for (const auto& t : n->unknown_terms) terms += (terms.empty() ? "" : ", ") + t;
    body["status"] = "needs_clarification";
    body["unknown_terms"] = n->unknown_terms;
    body["message"] = "I don't recognize: " + terms +
                      ". Tag the people you mean, or mark a few images as positive and negative examples.";
  } else {
    body["status"] = "no_program";
    body["diagnostic"] = std::get<synthesis::NoProgram>(outcome).reason;
  }
  return body;
}

Json Manifest::to_json() const {
  Json j;
  j["v"] = kApiVersion;
  j["album_id"] = album_id;
  j["query"] = query;
  j["program"] = program;
  j["image_ids"] = image_ids;
  j["exported_at"] = exported_at;
  return j;
}

Manifest Manifest::from_json(const Json& j) {
  Manifest m;
  m.album_id = j.at("album_id").get<std::string>();
  m.query = j.at("query").get<std::string>();
  m.program = j.at("program").get<std::string>();
  m.image_ids = j.at("image_ids").get<std::vector<std::string>>();
  m.exported_at = j.at("exported_at").get<std::string>();
  return m;
}

// ============================================================================
// Sessions
// ============================================================================

struct App::Session {
  std::mutex mutex;
  std::string id;
  std::string album_id;
  std::string query;
  synthesis::ExampleSet examples;
  std::optional<Json> last_response;
  std::set<std::string> saved;
  std::vector<Json> events;
  std::filesystem::path log_file;

  std::vector<std::string> last_results() const {
    if (!last_response || !last_response->contains("results")) return {};
    return (*last_response)["results"].get<std::vector<std::string>>();
  }

  // Replays one logged event onto the in-memory state.
  void apply(const Json& e) {
    const std::string kind = e.value("event", "");
    if (kind == "query") {
      query = e.value("query", "");
    } else if (kind == "example_added" || kind == "example_removed") {
      auto& set = e.value("polarity", "") == "positive" ? examples.positive : examples.negative;
      if (kind == "example_added") set.insert(e.value("image_id", ""));
      else set.erase(e.value("image_id", ""));
    } else if (kind == "search_completed") {
      last_response = e.at("response");
    } else if (kind == "saved") {
      saved.insert(e.value("image_id", ""));
    } else if (kind == "unsaved") {
      saved.erase(e.value("image_id", ""));
    }
  }

  Json to_json() const {
    Json j;
    j["v"] = kApiVersion;
    j["session_id"] = id;
    j["album_id"] = album_id;
    j["query"] = query;
    j["positive"] = examples.positive;
    j["negative"] = examples.negative;
    j["saved"] = saved;
    j["last_response"] = last_response ? *last_response : Json();
    return j;
  }
};

App::App(Config config) : App(config, nlbridge::make_sketch_source(config.sketch_source)) {}

App::App(Config config, std::unique_ptr<nlbridge::SketchSource> source)
    : config_(std::move(config)), source_(std::move(source)) {
  if (!config_.state_dir.empty()) {
    std::filesystem::create_directories(config_.state_dir / "sessions");
    restore_sessions();
  }
}

App::~App() = default;

void App::log_event(Session& session, Json event) {
  append_line(session.log_file, event);
  session.events.push_back(std::move(event));
}

void App::restore_sessions() {
  // Albums first: creation and tags, in the order they happened.
  for (const auto& e : read_lines(config_.state_dir / "albums.jsonl")) {
    try {
      const std::string kind = e.value("event", "");
      const std::string id = e.value("album_id", "");
      if (kind == "album_created") {
        add_album(annotations::load_album(e.at("path").get<std::string>(), id, config_.album),
                  e.at("path").get<std::string>());
      } else if (kind == "tag_added") {
        if (const auto* entry = find_album(id)) {
          entry->handle->update(
              [&](const Album& a) { return a.with_tag(e.at("name").get<std::string>(), tag_target_from_json(e.at("target"))); });
        }
      }
    } catch (const std::exception& ex) {
      spdlog::warn("could not restore album event: {}", ex.what());
    }
  }
  std::vector<std::filesystem::path> logs;
  for (const auto& f : std::filesystem::directory_iterator(config_.state_dir / "sessions")) {
    if (f.path().extension() == ".jsonl") logs.push_back(f.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& file : logs) {
    auto session = std::make_shared<Session>();
    session->id = file.stem().string();
    session->log_file = file;
    for (const auto& e : read_lines(file)) {
      if (e.value("event", "") == "session_created") session->album_id = e.value("album_id", "");
      session->apply(e);
      session->events.push_back(e);
    }
    if (session->id.size() > 1 && session->id[0] == 's') {
      try {
        next_session_ = std::max<std::uint64_t>(next_session_, std::stoull(session->id.substr(1)) + 1);
      } catch (const std::exception&) {
      }
    }
    sessions_.emplace(session->id, std::move(session));
  }
}

std::shared_ptr<App::Session> App::find_session(const std::string& session_id) const {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw NotFound("unknown session '" + session_id + "'");
  return it->second;
}

const App::AlbumEntry* App::find_album(const std::string& album_id) const {
  std::shared_lock lock(albums_mutex_);
  auto it = albums_.find(album_id);
  return it == albums_.end() ? nullptr : &it->second;
}

std::shared_ptr<const Album> App::album(const std::string& album_id) const {
  const auto* entry = find_album(album_id);
  if (!entry) throw NotFound("unknown album '" + album_id + "'");
  return entry->handle->snapshot();
}

void App::add_album(Album album, std::filesystem::path dir) {
  std::unique_lock lock(albums_mutex_);
  const std::string id = album.id();
  if (albums_.count(id)) throw Conflict("album '" + id + "' already exists");
  albums_.emplace(id, AlbumEntry{std::make_unique<annotations::AlbumHandle>(std::move(album)), std::move(dir)});
}

// ============================================================================
// Albums
// ============================================================================

Response App::create_album(const Json& request) {
  return guarded([&] {
    check_envelope(request);
    std::filesystem::path dir = required_string(request, "path");
    if (!config_.album_root.empty()) {
      if (dir.is_relative()) dir = config_.album_root / dir;
      const auto root = std::filesystem::weakly_canonical(config_.album_root);
      const auto resolved = std::filesystem::weakly_canonical(dir);
      const auto rel = resolved.lexically_relative(root);
      if (rel.empty() || *rel.begin() == "..") throw Forbidden("album path is outside the album root");
      dir = resolved;
    }
    if (!std::filesystem::is_directory(dir)) throw NotFound("no album directory at " + dir.string());
    std::string id = request.contains("album_id") ? required_string(request, "album_id") : dir.filename().string();
    if (!safe_id(id)) throw BadRequest("invalid album id '" + id + "'");
    if (find_album(id)) throw Conflict("album '" + id + "' already exists");

    Album album = annotations::load_album(dir, id, config_.album);
    Json body;
    body["v"] = kApiVersion;
    body["album_id"] = id;
    body["images"] = album.images().size();
    body["objects"] = album.object_count();
    body["faces"] = album.face_count();
    add_album(std::move(album), dir);
    if (!config_.state_dir.empty()) {
      append_line(config_.state_dir / "albums.jsonl",
                  Json{{"event", "album_created"}, {"album_id", id}, {"path", std::filesystem::absolute(dir).string()}});
    }
    return Response{201, std::move(body)};
  });
}

Response App::list_albums() const {
  return guarded([&] {
    Json albums = Json::array();
    std::shared_lock lock(albums_mutex_);
    for (const auto& [id, entry] : albums_) {
      const auto a = entry.handle->snapshot();
      albums.push_back({{"album_id", id}, {"images", a->images().size()}});
    }
    return Response{200, Json{{"v", kApiVersion}, {"albums", albums}}};
  });
}

Response App::list_images(const std::string& album_id) const {
  return guarded([&] {
    const auto a = album(album_id);
    Json images = Json::array();
    for (const auto& [id, image] : a->images()) {
      const auto faces = std::count_if(image.objects.begin(), image.objects.end(),
                                       [](const auto& o) { return o.kind == annotations::ObjectKind::Face; });
      images.push_back({{"image_id", id},
                        {"width", image.width},
                        {"height", image.height},
                        {"objects", image.objects.size()},
                        {"faces", faces}});
    }
    Json tags = Json::object();
    for (const auto& [name, target] : a->tags()) tags[name] = tag_target_json(target);
    return Response{200, Json{{"v", kApiVersion}, {"album_id", album_id}, {"images", images}, {"tags", tags}}};
  });
}

Response App::get_annotation(const std::string& album_id, const std::string& image_id) const {
  return guarded([&] {
    const auto a = album(album_id);
    const auto* image = a->find(image_id);
    if (!image) throw NotFound("unknown image '" + image_id + "' in album '" + album_id + "'");
    Json objects = Json::array();
    for (const auto& o : image->objects) {
      Json j;
      j["object_id"] = o.object_id;
      j["kind"] = o.kind == annotations::ObjectKind::Face ? "face" : "thing";
      if (o.kind == annotations::ObjectKind::Face) j["face_cluster"] = o.face_cluster;
      else j["label"] = o.label;
      j["confidence"] = o.confidence;
      j["bbox"] = {{"x", o.bbox.x}, {"y", o.bbox.y}, {"w", o.bbox.w}, {"h", o.bbox.h}};
      if (o.kind == annotations::ObjectKind::Face) {
        j["properties"] = o.properties;
        j["emotion"] = o.emotion ? Json(*o.emotion) : Json();
        j["age_range"] = o.age_range ? Json::array({o.age_range->first, o.age_range->second}) : Json();
      }
      Json tags = Json::array();
      for (const auto& [name, target] : a->tags()) {
        if (const auto* face = std::get_if<annotations::FaceClusterTarget>(&target)) {
          if (o.kind == annotations::ObjectKind::Face && face->cluster == o.face_cluster) tags.push_back(name);
        } else if (std::get<annotations::ObjectSetTarget>(target).objects.count({image_id, o.object_id})) {
          tags.push_back(name);
        }
      }
      j["tags"] = tags;
      j["description"] = o.describe();
      objects.push_back(std::move(j));
    }
    return Response{200, Json{{"v", kApiVersion},
                              {"album_id", album_id},
                              {"image_id", image_id},
                              {"width", image->width},
                              {"height", image->height},
                              {"objects", objects}}};
  });
}

Response App::add_tag(const std::string& album_id, const Json& request) {
  return guarded([&] {
    check_envelope(request);
    const auto* entry = find_album(album_id);
    if (!entry) throw NotFound("unknown album '" + album_id + "'");
    const std::string name = required_string(request, "name");
    const auto target = tag_target_from_json(request);
    const auto next = entry->handle->update([&](const Album& a) { return a.with_tag(name, target); });
    const std::string canonical = dsl::canonicalize(name);
    if (!config_.state_dir.empty()) {
      append_line(config_.state_dir / "albums.jsonl", Json{{"event", "tag_added"},
                                                            {"album_id", album_id},
                                                            {"name", canonical},
                                                            {"target", tag_target_json(target)}});
    }
    // Sessions on this album record the tag so their traces are complete.
    std::vector<std::shared_ptr<Session>> affected;
    {
      std::lock_guard lock(sessions_mutex_);
      for (const auto& [id, s] : sessions_) {
        if (s->album_id == album_id) affected.push_back(s);
      }
    }
    for (const auto& s : affected) {
      std::lock_guard lock(s->mutex);
      log_event(*s, Json{{"event", "tag_added"}, {"name", canonical}, {"target", tag_target_json(target)}});
    }
    Json tags = Json::object();
    for (const auto& [n, t] : next->tags()) tags[n] = tag_target_json(t);
    return Response{200, Json{{"v", kApiVersion}, {"album_id", album_id}, {"tags", tags}}};
  });
}

Response App::thumbnail(const std::string& album_id, const std::string& image_id) const {
  return guarded([&] {
    const auto* entry = find_album(album_id);
    if (!entry) throw NotFound("unknown album '" + album_id + "'");
    if (!safe_id(image_id) || !entry->handle->snapshot()->find(image_id)) {
      throw NotFound("unknown image '" + image_id + "'");
    }
    for (const auto& candidate : {entry->dir / "images" / (image_id + ".jpg"), entry->dir / (image_id + ".jpg")}) {
      std::ifstream in(candidate, std::ios::binary);
      if (!in) continue;
      std::ostringstream bytes;
      bytes << in.rdbuf();
      return Response{200, Json(), bytes.str(), "image/jpeg"};
    }
    throw NotFound("no thumbnail for '" + image_id + "'");
  });
}

// ============================================================================
// Sessions
// ============================================================================

Response App::create_session(const Json& request) {
  return guarded([&] {
    check_envelope(request);
    const std::string album_id = required_string(request, "album_id");
    if (!find_album(album_id)) throw NotFound("unknown album '" + album_id + "'");
    auto session = std::make_shared<Session>();
    session->album_id = album_id;
    {
      std::lock_guard lock(sessions_mutex_);
      session->id = "s" + std::to_string(next_session_++);
      if (!config_.state_dir.empty()) session->log_file = config_.state_dir / "sessions" / (session->id + ".jsonl");
      sessions_.emplace(session->id, session);
    }
    std::lock_guard lock(session->mutex);
    log_event(*session, Json{{"event", "session_created"}, {"album_id", album_id}});
    return Response{201, session->to_json()};
  });
}

Response App::get_session(const std::string& session_id) const {
  return guarded([&] {
    const auto s = find_session(session_id);
    std::lock_guard lock(s->mutex);
    return Response{200, s->to_json()};
  });
}

Response App::session_events(const std::string& session_id) const {
  return guarded([&] {
    const auto s = find_session(session_id);
    std::lock_guard lock(s->mutex);
    return Response{200, Json{{"v", kApiVersion}, {"session_id", session_id}, {"events", s->events}}};
  });
}

Response App::search(const std::string& session_id, const Json& request) {
  return guarded([&] {
    check_envelope(request);
    const auto s = find_session(session_id);
    std::lock_guard lock(s->mutex);
    const auto a = album(s->album_id);

    std::string query = request.contains("query") ? required_string(request, "query") : s->query;
    if (query.find_first_not_of(" \t\r\n") == std::string::npos) throw BadRequest("query is empty");
    synthesis::ExampleSet examples = s->examples;
    if (request.contains("positive")) examples.positive = string_set(request, "positive");
    if (request.contains("negative")) examples.negative = string_set(request, "negative");
    synthesis::validate_examples(examples, *a);

    if (query != s->query) log_event(*s, Json{{"event", "query"}, {"query", query}});
    for (const auto& [polarity, before, after] :
         {std::tuple{"positive", &s->examples.positive, &examples.positive},
          std::tuple{"negative", &s->examples.negative, &examples.negative}}) {
      for (const auto& id : *after) {
        if (!before->count(id)) log_event(*s, Json{{"event", "example_added"}, {"polarity", polarity}, {"image_id", id}});
      }
      for (const auto& id : *before) {
        if (!after->count(id)) log_event(*s, Json{{"event", "example_removed"}, {"polarity", polarity}, {"image_id", id}});
      }
    }
    s->query = query;
    s->examples = examples;

    const auto outcome = synthesis::synthesize(query, examples, *a, *source_, config_.synthesis);
    std::vector<std::string> results;
    std::string explanation;
    if (const auto* c = std::get_if<synthesis::Complete>(&outcome)) {
      results = evaluator::search(*c->program, *a);
      nlbridge::ExplainContext ctx;
      for (const auto& [name, target] : a->tags()) ctx.proper_names.insert(name);
      explanation = source_->explain(*c->program, ctx);
    }
    Json body = search_response_json(outcome, results, explanation);
    s->last_response = body;
    log_event(*s, Json{{"event", "search_completed"}, {"response", body}});
    return Response{200, std::move(body)};
  });
}

Response App::save(const std::string& session_id, const Json& request) {
  return guarded([&] {
    check_envelope(request);
    const auto s = find_session(session_id);
    std::lock_guard lock(s->mutex);
    const auto a = album(s->album_id);
    std::set<std::string> ids = string_set(request, "image_ids");
    if (request.value("all", false)) {
      if (!s->last_response || s->last_response->value("status", "") != "complete") {
        throw Conflict("session has no search results to save");
      }
      for (const auto& id : s->last_results()) ids.insert(id);
    }
    for (const auto& id : ids) {
      if (!a->find(id)) throw NotFound("unknown image '" + id + "'");
    }
    for (const auto& id : ids) {
      if (s->saved.insert(id).second) log_event(*s, Json{{"event", "saved"}, {"image_id", id}});
    }
    return Response{200, Json{{"v", kApiVersion}, {"session_id", session_id}, {"saved", s->saved}}};
  });
}

Response App::unsave(const std::string& session_id, const std::string& image_id) {
  return guarded([&] {
    const auto s = find_session(session_id);
    std::lock_guard lock(s->mutex);
    Json body{{"v", kApiVersion}, {"session_id", session_id}};
    if (s->saved.erase(image_id)) {
      log_event(*s, Json{{"event", "unsaved"}, {"image_id", image_id}});
    } else {
      spdlog::warn("session {}: image {} was not saved", session_id, image_id);
      body["warning"] = "image '" + image_id + "' was not in the saved set";
    }
    body["saved"] = s->saved;
    return Response{200, std::move(body)};
  });
}

Response App::export_results(const std::string& session_id, const Json& request) {
  return guarded([&] {
    check_envelope(request);
    const auto s = find_session(session_id);
    std::lock_guard lock(s->mutex);
    const std::filesystem::path destination = required_string(request, "destination");

    Manifest manifest;
    manifest.album_id = s->album_id;
    manifest.query = s->query;
    if (s->last_response && s->last_response->value("status", "") == "complete") {
      manifest.program = (*s->last_response)["program"].get<std::string>();
    }
    manifest.image_ids.assign(s->saved.begin(), s->saved.end());
    manifest.exported_at = utc_now();

    std::error_code ec;
    std::filesystem::create_directories(destination, ec);
    if (ec) throw Forbidden("cannot create " + destination.string() + ": " + ec.message());
    const auto file = destination / "manifest.json";
    {
      std::ofstream out(file);
      if (!out) throw Forbidden("cannot write " + file.string());
      out << manifest.to_json().dump(2) << '\n';
      if (!out) throw Forbidden("cannot write " + file.string());
    }
    if (const auto* entry = find_album(s->album_id)) {
      for (const auto& id : manifest.image_ids) {
        for (const auto& src : {entry->dir / "images" / (id + ".jpg"), entry->dir / (id + ".jpg")}) {
          if (std::filesystem::exists(src)) {
            std::filesystem::copy_file(src, destination / (id + ".jpg"),
                                       std::filesystem::copy_options::overwrite_existing, ec);
            break;
          }
        }
      }
    }
    log_event(*s, Json{{"event", "exported"}, {"destination", destination.string()}});
    return Response{200, Json{{"v", kApiVersion}, {"path", file.string()}, {"manifest", manifest.to_json()}}};
  });
}

// ============================================================================
// Routing
// ============================================================================

Response App::handle(std::string_view method, std::string_view path, std::string_view body) {
  const auto seg = split_path(path);
  const std::size_t n = seg.size();
  Json request;
  const bool has_body = method == "POST";
  if (has_body) {
    try {
      request = parse_body(body);
    } catch (const BadRequest& e) {
      return error_response(400, "bad_request", e.what());
    }
  }
  auto wrong_method = [&] { return error_response(405, "method_not_allowed", std::string(method) + " " + std::string(path)); };

  if (n >= 1 && seg[0] == "albums") {
    if (n == 1) {
      if (method == "POST") return create_album(request);
      if (method == "GET") return list_albums();
      return wrong_method();
    }
    if (n == 3 && seg[2] == "images") return method == "GET" ? list_images(seg[1]) : wrong_method();
    if (n == 5 && seg[2] == "images" && seg[4] == "annotation") {
      return method == "GET" ? get_annotation(seg[1], seg[3]) : wrong_method();
    }
    if (n == 3 && seg[2] == "tags") return method == "POST" ? add_tag(seg[1], request) : wrong_method();
  } else if (n >= 1 && seg[0] == "sessions") {
    if (n == 1) return method == "POST" ? create_session(request) : wrong_method();
    if (n == 2) return method == "GET" ? get_session(seg[1]) : wrong_method();
    if (n == 3 && seg[2] == "events") return method == "GET" ? session_events(seg[1]) : wrong_method();
    if (n == 3 && seg[2] == "search") return method == "POST" ? search(seg[1], request) : wrong_method();
    if (n == 3 && seg[2] == "saved") return method == "POST" ? save(seg[1], request) : wrong_method();
    if (n == 4 && seg[2] == "saved") return method == "DELETE" ? unsave(seg[1], seg[3]) : wrong_method();
    if (n == 3 && seg[2] == "export") return method == "POST" ? export_results(seg[1], request) : wrong_method();
  } else if (n == 3 && seg[0] == "static") {
    const std::string& file = seg[2];
    if (method != "GET") return wrong_method();
    if (file.size() > 4 && file.compare(file.size() - 4, 4, ".jpg") == 0) {
      return thumbnail(seg[1], file.substr(0, file.size() - 4));
    }
  }
  return error_response(404, "not_found", "no route for " + std::string(method) + " " + std::string(path));
}

}  // namespace photoscout::service
