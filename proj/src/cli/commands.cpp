#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "photoscout/cli.hpp"
#include "photoscout/errors.hpp"
#include "photoscout/evaluator.hpp"

namespace photoscout::cli {

namespace {

using service::Json;

// Aborts a command with an exit code and a message for stderr.
struct Exit {
  int code;
  std::string message;
};

struct Globals {
  std::string home;
  std::string config_file;
  std::string sketch_source;
};

service::Config load_config(const Globals& g) {
  service::Config config;
  if (!g.config_file.empty()) {
    try {
      config = service::load_config(g.config_file);
    } catch (const std::invalid_argument& e) {
      throw Exit{kExitInput, e.what()};
    }
  }
  if (!g.sketch_source.empty()) {
    try {
      config.sketch_source = nlbridge::parse_sketch_source(g.sketch_source, config.sketch_source);
    } catch (const std::invalid_argument& e) {
      throw Exit{kExitInput, e.what()};
    }
  }
  return config;
}

Registry open_registry(const Globals& g) {
  try {
    return Registry(g.home.empty() ? Registry::default_home() : std::filesystem::path(g.home));
  } catch (const Error& e) {
    throw Exit{kExitEnvironment, e.what()};
  }
}

// Registered album id, or a directory path given directly.
std::filesystem::path album_dir(const Globals& g, const std::string& album_id) {
  if (auto dir = open_registry(g).find(album_id)) return *dir;
  if (std::filesystem::is_directory(album_id)) return album_id;
  throw Exit{kExitInput, "unknown album '" + album_id + "' (run `photoscout ingest` first)"};
}

annotations::Album load(const std::filesystem::path& dir, const std::string& album_id,
                        const service::Config& config) {
  try {
    return annotations::load_album(dir, album_id, config.album);
  } catch (const Error& e) {
    throw Exit{kExitFailure, e.what()};
  }
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Exit{kExitInput, "cannot read " + file.string()};
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

int exit_for_status(int status) {
  if (status == 502) return kExitEnvironment;
  if (status == 400 || status == 404 || status == 422) return kExitInput;
  return kExitFailure;
}

std::string error_message(const service::Response& r) {
  if (r.body.contains("error")) return r.body["error"].value("message", r.body.dump());
  return r.body.dump();
}

// ============================================================================
// Subcommands
// ============================================================================

int cmd_ingest(const Globals& g, const std::string& dir, std::string album_id, std::ostream& out) {
  if (!std::filesystem::is_directory(dir)) throw Exit{kExitFailure, "not a directory: " + dir};
  if (album_id.empty()) album_id = std::filesystem::path(dir).lexically_normal().filename().string();
  Registry registry = open_registry(g);
  if (registry.find(album_id)) throw Exit{kExitFailure, "album '" + album_id + "' is already registered"};
  const auto album = load(dir, album_id, load_config(g));
  registry.add(album_id, dir);
  out << "ingested album " << album_id << ": " << album.images().size() << " images, " << album.object_count()
      << " objects, " << album.face_count() << " faces, " << album.tags().size() << " tags\n";
  return kExitOk;
}

int cmd_eval(const Globals& g, const std::string& album_id, const std::string& program_file, std::ostream& out) {
  const auto config = load_config(g);
  const auto album = load(album_dir(g, album_id), album_id, config);
  const std::string text = read_file(program_file);
  dsl::ExprPtr program;
  try {
    program = dsl::parse(text);
  } catch (const Error& strict) {
    auto lenient = dsl::parse_with_holes(text, album.vocabulary());
    if (auto* sketch = std::get_if<dsl::Sketch>(&lenient); sketch && !sketch->complete()) {
      std::string holes;
      for (const auto& h : sketch->holes) {
        holes += "\n  ?" + std::to_string(h.id) + " at offset " + std::to_string(h.position) + " (" + h.origin_token + ", " +
                 std::string(dsl::slot_name(h.slot)) + ")";
      }
      throw Exit{kExitInput, program_file + ": program has holes:" + holes};
    }
    throw Exit{kExitInput, program_file + ": " + strict.what()};
  }
  try {
    evaluator::validate_program(*program, album);
  } catch (const Error& e) {
    throw Exit{kExitInput, program_file + ": " + e.what()};
  }
  for (const auto& id : evaluator::search(*program, album)) out << id << '\n';
  return kExitOk;
}

struct SearchArgs {
  std::string album;
  std::string query;
  std::vector<std::string> pos;
  std::vector<std::string> neg;
  std::vector<std::string> tags;
  bool json = false;
};

void print_human(const Json& body, std::ostream& out) {
  const std::string status = body.value("status", "");
  out << "status: " << status << '\n';
  if (status == "complete") {
    out << "program: " << body["program"].get<std::string>() << '\n'
        << "explanation: " << body["explanation"].get<std::string>() << '\n'
        << "results: " << body["results"].size() << '\n';
    for (const auto& id : body["results"]) out << "  " << id.get<std::string>() << '\n';
  } else if (status == "needs_clarification") {
    std::string terms;
    for (const auto& t : body["unknown_terms"]) terms += (terms.empty() ? "" : ", ") + t.get<std::string>();
    out << "unknown terms: " << terms << '\n' << body["message"].get<std::string>() << '\n';
  } else {
    out << body.value("diagnostic", "") << '\n';
  }
}

int cmd_search(const Globals& g, const SearchArgs& a, std::ostream& out) {
  const auto config = load_config(g);
  const auto dir = album_dir(g, a.album);
  service::App app(config);
  app.add_album(load(dir, a.album, config), dir);

  for (const auto& tag : a.tags) {
    const auto eq = tag.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == tag.size()) {
      throw Exit{kExitInput, "--tag expects name=cluster, got '" + tag + "'"};
    }
    const auto r = app.add_tag(a.album, Json{{"v", 1}, {"name", tag.substr(0, eq)}, {"face_cluster", tag.substr(eq + 1)}});
    if (r.status != 200) throw Exit{exit_for_status(r.status), error_message(r)};
  }
  const auto session = app.create_session(Json{{"v", 1}, {"album_id", a.album}});
  const std::string sid = session.body["session_id"].get<std::string>();
  const auto r = app.search(sid, Json{{"v", 1}, {"query", a.query}, {"positive", a.pos}, {"negative", a.neg}});
  if (r.status != 200) throw Exit{exit_for_status(r.status), error_message(r)};
  if (a.json) {
    out << r.body.dump(2) << '\n';
  } else {
    print_human(r.body, out);
  }
  return kExitOk;
}

int cmd_replay(const Globals& g, const std::string& album_id, const std::string& script_file, std::ostream& out) {
  const auto config = load_config(g);
  const auto dir = album_dir(g, album_id);
  std::vector<ScriptStep> steps;
  try {
    steps = parse_script(read_file(script_file));
  } catch (const std::invalid_argument& e) {
    throw Exit{kExitInput, script_file + ": " + e.what()};
  }
  service::App app(config);
  app.add_album(load(dir, album_id, config), dir);
  const auto report =
      run_script(app, album_id, steps, ScriptContext{std::filesystem::path(script_file).parent_path(), dir});
  for (const auto& line : report.log) out << line << '\n';
  if (!report.passed) throw Exit{kExitFailure, "FAIL: " + report.failure};
  out << "PASS: " << report.steps_run << " steps\n";
  return kExitOk;
}

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

struct ServeArgs {
  std::string host;
  int port = -1;
  std::string state_dir;
  std::string album_root;
  std::vector<std::string> albums;
};

int cmd_serve(const Globals& g, const ServeArgs& a, std::ostream& out) {
  auto config = load_config(g);
  if (!a.host.empty()) config.host = a.host;
  if (a.port >= 0) config.port = a.port;
  if (!a.state_dir.empty()) config.state_dir = a.state_dir;
  if (!a.album_root.empty()) config.album_root = a.album_root;
  service::App app(config);
  for (const auto& id : a.albums) {
    const auto dir = album_dir(g, id);
    app.add_album(load(dir, id, config), dir);
  }
  service::HttpServer server(app);
  int port = 0;
  try {
    port = server.start(config.host, config.port);
  } catch (const std::exception& e) {
    throw Exit{kExitEnvironment, e.what()};
  }
  out << "listening on http://" << config.host << ":" << port << std::endl;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return kExitOk;
}

int cmd_albums(const Globals& g, std::ostream& out) {
  const Registry registry = open_registry(g);
  for (const auto& [id, dir] : registry.albums()) out << id << '\t' << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Search photo albums with natural-language queries and example images."};
  app.name("photoscout");
  app.require_subcommand(1);
  Globals g;
  app.add_option("--home", g.home, "Registry directory (default $PHOTOSCOUT_HOME or ~/.photoscout)");
  app.add_option("--config", g.config_file, "Config file")->envname("PHOTOSCOUT_CONFIG");

  auto* ingest = app.add_subcommand("ingest", "Validate an annotation directory and register it as an album");
  std::string ingest_dir;
  std::string ingest_id;
  ingest->add_option("dir", ingest_dir, "Directory of per-image annotation JSON files")->required();
  ingest->add_option("--album", ingest_id, "Album id (default: directory name)");

  auto* eval = app.add_subcommand("eval", "Print the images matching a program");
  std::string eval_album;
  std::string eval_program;
  eval->add_option("--album", eval_album, "Album id")->required();
  eval->add_option("--program", eval_program, "File holding one program")->required();

  auto* search = app.add_subcommand("search", "Synthesize a program from a query and examples, then search");
  SearchArgs sa;
  search->add_option("--album", sa.album, "Album id")->required();
  search->add_option("--query", sa.query, "Natural-language query")->required();
  search->add_option("--pos", sa.pos, "Positive example image id");
  search->add_option("--neg", sa.neg, "Negative example image id");
  search->add_option("--tag", sa.tags, "Tag a face cluster, name=cluster");
  search->add_option("--sketch-source", g.sketch_source, "fallback, llm or replay:<file>");
  search->add_flag("--json", sa.json, "Machine-readable output");

  auto* replay = app.add_subcommand("replay", "Run a session script and check its expectations");
  std::string replay_album;
  std::string replay_script;
  replay->add_option("--album", replay_album, "Album id")->required();
  replay->add_option("--script", replay_script, "Session script")->required();
  replay->add_option("--sketch-source", g.sketch_source, "fallback, llm or replay:<file>");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  ServeArgs sv;
  serve->add_option("--host", sv.host, "Bind address");
  serve->add_option("--port", sv.port, "Port (0 picks a free one)");
  serve->add_option("--state-dir", sv.state_dir, "Directory for session event logs");
  serve->add_option("--album-root", sv.album_root, "Directory POST /albums paths resolve against");
  serve->add_option("--album", sv.albums, "Registered album to load at startup");
  serve->add_option("--sketch-source", g.sketch_source, "fallback, llm or replay:<file>");

  auto* albums = app.add_subcommand("albums", "List registered albums");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(g, ingest_dir, ingest_id, out);
    if (eval->parsed()) return cmd_eval(g, eval_album, eval_program, out);
    if (search->parsed()) return cmd_search(g, sa, out);
    if (replay->parsed()) return cmd_replay(g, replay_album, replay_script, out);
    if (serve->parsed()) return cmd_serve(g, sv, out);
    if (albums->parsed()) return cmd_albums(g, out);
  } catch (const Exit& e) {
    err << e.message << '\n';
    return e.code;
  } catch (const SketchSourceUnavailable& e) {
    err << e.what() << '\n';
    return kExitEnvironment;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitFailure;
  }
  return kExitInput;
}

}  // namespace photoscout::cli
