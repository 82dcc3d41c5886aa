#pragma once

// Album and session state behind the HTTP API. `App` is transport-free: every
// route is a method returning a status and a JSON body, and `handle` routes a
// (method, path, body) triple, so the CLI can drive sessions in process.

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "photoscout/annotations.hpp"
#include "photoscout/nlbridge.hpp"
#include "photoscout/synthesis.hpp"

namespace photoscout::service {

using Json = nlohmann::ordered_json;

inline constexpr int kApiVersion = 1;

// ============================================================================
// Configuration
// ============================================================================

struct Config {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path album_root;  // relative album paths resolve here
  std::filesystem::path state_dir;   // session event logs; empty keeps them in memory
  nlbridge::SketchSourceConfig sketch_source;
  annotations::AlbumConfig album;
  synthesis::SynthesisOptions synthesis;
};

// key = value lines with optional [section] headers, '#' comments, quoted or
// bare values. Keys inside a section are read as "section.key". Throws
// std::invalid_argument naming the line on unknown keys or bad values.
Config parse_config(std::string_view text, Config base = {});
Config load_config(const std::filesystem::path& file, Config base = {});

// ============================================================================
// Responses
// ============================================================================

struct Response {
  Response() = default;
  Response(int s, Json b) : status(s), body(std::move(b)) {}
  Response(int s, Json b, std::string r, std::string type)
      : status(s), body(std::move(b)), raw(std::move(r)), content_type(std::move(type)) {}

  int status = 200;
  Json body;
  // Non-JSON payloads (thumbnails).
  std::string raw;
  std::string content_type = "application/json";
};

// {"v":1, "status": ...} body for a synthesis outcome. `results` and
// `explanation` are used only for Complete.
Json search_response_json(const synthesis::Outcome& outcome, const std::vector<std::string>& results,
                          const std::string& explanation);

// Export manifest written by POST /sessions/{id}/export.
struct Manifest {
  std::string album_id;
  std::string query;
  std::string program;
  std::vector<std::string> image_ids;
  std::string exported_at;  // UTC, ISO 8601

  Json to_json() const;
  static Manifest from_json(const Json& j);
  friend bool operator==(const Manifest&, const Manifest&) = default;
};

// ============================================================================
// Application
// ============================================================================

class App {
 public:
  explicit App(Config config);
  App(Config config, std::unique_ptr<nlbridge::SketchSource> source);
  ~App();

  App(const App&) = delete;
  App& operator=(const App&) = delete;

  // Route `method path` with a JSON request body (may be empty).
  Response handle(std::string_view method, std::string_view path, std::string_view body);

  // Individual routes.
  Response create_album(const Json& request);
  Response list_albums() const;
  Response list_images(const std::string& album_id) const;
  Response get_annotation(const std::string& album_id, const std::string& image_id) const;
  Response add_tag(const std::string& album_id, const Json& request);
  Response create_session(const Json& request);
  Response get_session(const std::string& session_id) const;
  Response session_events(const std::string& session_id) const;
  Response search(const std::string& session_id, const Json& request);
  Response save(const std::string& session_id, const Json& request);
  Response unsave(const std::string& session_id, const std::string& image_id);
  Response export_results(const std::string& session_id, const Json& request);
  Response thumbnail(const std::string& album_id, const std::string& image_id) const;

  // Registers an already-loaded album (CLI path). Throws photoscout::Error on
  // a duplicate id.
  void add_album(annotations::Album album, std::filesystem::path dir = {});
  std::shared_ptr<const annotations::Album> album(const std::string& album_id) const;

  const Config& config() const noexcept { return config_; }

 private:
  struct Session;
  struct AlbumEntry {
    std::unique_ptr<annotations::AlbumHandle> handle;
    std::filesystem::path dir;
  };

  std::shared_ptr<Session> find_session(const std::string& session_id) const;
  const AlbumEntry* find_album(const std::string& album_id) const;
  void log_event(Session& session, Json event);
  void restore_sessions();

  Config config_;
  std::unique_ptr<nlbridge::SketchSource> source_;

  mutable std::shared_mutex albums_mutex_;
  std::map<std::string, AlbumEntry> albums_;

  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_session_ = 1;
};

// ============================================================================
// HTTP
// ============================================================================

// Serves `app` over HTTP on a background thread.
class HttpServer {
 public:
  explicit HttpServer(App& app);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds and starts serving; port 0 picks a free port. Returns the port.
  int start(const std::string& host, int port);
  void stop();
  // Blocks until stop() is called from another thread or a signal handler.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace photoscout::service
