#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "photoscout/cli.hpp"
#include "photoscout/errors.hpp"

namespace photoscout::cli {

Registry::Registry(std::filesystem::path home) : file_(std::move(home) / "albums.json") {
  std::ifstream in(file_);
  if (!in) return;
  std::ostringstream text;
  text << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.str());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(file_.string(), e.what());
  }
  if (!doc.contains("albums") || !doc["albums"].is_object()) {
    throw SchemaError(file_.string(), "expected an \"albums\" object");
  }
  for (const auto& [id, dir] : doc["albums"].items()) albums_[id] = dir.get<std::string>();
}

std::filesystem::path Registry::default_home() {
  if (const char* home = std::getenv("PHOTOSCOUT_HOME"); home && *home) return home;
  if (const char* home = std::getenv("HOME"); home && *home) return std::filesystem::path(home) / ".photoscout";
  return ".photoscout";
}

std::optional<std::filesystem::path> Registry::find(const std::string& album_id) const {
  auto it = albums_.find(album_id);
  if (it == albums_.end()) return std::nullopt;
  return it->second;
}

void Registry::add(const std::string& album_id, const std::filesystem::path& dir) {
  if (albums_.count(album_id)) throw Error("album '" + album_id + "' is already registered");
  albums_[album_id] = std::filesystem::absolute(dir).lexically_normal();
  save();
}

void Registry::save() const {
  nlohmann::ordered_json doc;
  doc["v"] = 1;
  doc["albums"] = nlohmann::ordered_json::object();
  for (const auto& [id, dir] : albums_) doc["albums"][id] = dir.string();
  std::filesystem::create_directories(file_.parent_path());
  const auto tmp = file_.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write " + tmp);
    out << doc.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, file_);
}

}  // namespace photoscout::cli
