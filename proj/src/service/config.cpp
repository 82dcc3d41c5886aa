#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "photoscout/service.hpp"

namespace photoscout::service {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return v.substr(1, v.size() - 2);
  }
  // Strip a trailing comment on unquoted values.
  return trim(v.substr(0, v.find('#')));
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  const double d = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("not a number");
  return d;
}

long to_long(const std::string& v) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw std::invalid_argument("not an integer");
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw std::invalid_argument("expected true or false");
}

using Setter = std::function<void(Config&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> kSetters = {
      {"server.host", [](Config& c, const std::string& v) { c.host = v; }},
      {"server.port",
       [](Config& c, const std::string& v) {
         const long p = to_long(v);
         if (p < 0 || p > 65535) throw std::invalid_argument("port out of range");
         c.port = static_cast<int>(p);
       }},
      {"server.album_root", [](Config& c, const std::string& v) { c.album_root = v; }},
      {"server.state_dir", [](Config& c, const std::string& v) { c.state_dir = v; }},
      {"search.sketch_source",
       [](Config& c, const std::string& v) { c.sketch_source = nlbridge::parse_sketch_source(v, c.sketch_source); }},
      {"search.sample_count",
       [](Config& c, const std::string& v) {
         const long n = to_long(v);
         if (n < 1) throw std::invalid_argument("sample_count must be at least 1");
         c.sketch_source.sample_count = static_cast<int>(n);
       }},
      {"search.budget",
       [](Config& c, const std::string& v) {
         const long n = to_long(v);
         if (n < 1) throw std::invalid_argument("budget must be positive");
         c.synthesis.budget = static_cast<std::uint64_t>(n);
       }},
      {"llm.url", [](Config& c, const std::string& v) { c.sketch_source.llm.base_url = v; }},
      {"llm.model", [](Config& c, const std::string& v) { c.sketch_source.llm.model = v; }},
      {"llm.key_env", [](Config& c, const std::string& v) { c.sketch_source.llm.key_env = v; }},
      {"llm.timeout_ms",
       [](Config& c, const std::string& v) { c.sketch_source.llm.timeout = std::chrono::milliseconds(to_long(v)); }},
      {"llm.max_in_flight",
       [](Config& c, const std::string& v) {
         const long n = to_long(v);
         if (n < 1) throw std::invalid_argument("max_in_flight must be at least 1");
         c.sketch_source.llm.max_in_flight = static_cast<int>(n);
       }},
      {"llm.temperature", [](Config& c, const std::string& v) { c.sketch_source.llm.temperature = to_double(v); }},
      {"llm.fallback_on_error",
       [](Config& c, const std::string& v) { c.sketch_source.fallback_on_error = to_bool(v); }},
      {"thresholds.confidence", [](Config& c, const std::string& v) { c.album.confidence_threshold = to_double(v); }},
      {"thresholds.above_overlap",
       [](Config& c, const std::string& v) { c.album.geometry.above_min_overlap = to_double(v); }},
      {"thresholds.nextto_gap",
       [](Config& c, const std::string& v) { c.album.geometry.nextto_max_gap = to_double(v); }},
      {"thresholds.inside_fraction",
       [](Config& c, const std::string& v) { c.album.geometry.inside_min_fraction = to_double(v); }},
  };
  return kSetters;
}

}  // namespace

Config parse_config(std::string_view text, Config base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": " + why);
    };
    if (t.front() == '[') {
      if (t.back() != ']') fail("unterminated section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = unquote(trim(std::string_view(t).substr(eq + 1)));
    // Top-level keys are shorthand for the server section.
    if (!section.empty()) key = section + "." + key;
    else if (key.find('.') == std::string::npos) key = "server." + key;
    const auto it = setters().find(key);
    if (it == setters().end()) fail("unknown key '" + key + "'");
    try {
      it->second(base, value);
    } catch (const std::exception& e) {
      fail(key + ": " + e.what());
    }
  }
  return base;
}

Config load_config(const std::filesystem::path& file, Config base) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot read config file " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

}  // namespace photoscout::service
