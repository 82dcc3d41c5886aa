#pragma once

// Command-line driver: album registry, session scripts and the subcommands of
// the `photoscout` binary.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "photoscout/service.hpp"

namespace photoscout::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,     // failed assertion, conflict
  kExitInput = 2,       // bad user input
  kExitEnvironment = 3  // LLM endpoint or other environment problem
};

// ============================================================================
// Album registry
// ============================================================================

// albums.json under the home directory: album id -> absolute directory.
class Registry {
 public:
  explicit Registry(std::filesystem::path home);

  // $PHOTOSCOUT_HOME, else ~/.photoscout.
  static std::filesystem::path default_home();

  std::optional<std::filesystem::path> find(const std::string& album_id) const;
  // Throws photoscout::Error when the id is already registered.
  void add(const std::string& album_id, const std::filesystem::path& dir);
  const std::map<std::string, std::filesystem::path>& albums() const noexcept { return albums_; }

 private:
  void save() const;

  std::filesystem::path file_;
  std::map<std::string, std::filesystem::path> albums_;
};

// ============================================================================
// Session scripts
// ============================================================================

// One line of a script: a verb and the rest of the line.
//
//   query <text>            set the query and search
//   search                  search again with the current state
//   tag <name>=<cluster>    tag a face cluster, then search again
//   pos <id> / neg <id>     add an example, then search again
//   unlabel <id>            drop an example, then search again
//   expect_status <status>
//   expect_terms <t> ...    unknown terms, in any order
//   expect_contains <id> / expect_absent <id>
//   expect_results <file>   ids, one per line; "@album/" prefix resolves
//                           against the album directory
//   expect_program <text>
//   save_all / save <id> / unsave <id> / export <dir>
//
// Blank lines and lines starting with '#' are ignored.
struct ScriptStep {
  std::size_t line = 0;
  std::string verb;
  std::string arg;
};

// Throws std::invalid_argument on an unknown verb or missing argument.
std::vector<ScriptStep> parse_script(std::string_view text);

struct ReplayReport {
  bool passed = true;
  std::size_t steps_run = 0;
  std::string failure;  // "step N (line L): ..." when !passed
  std::vector<std::string> log;
};

struct ScriptContext {
  std::filesystem::path script_dir;
  std::filesystem::path album_dir;
};

// Runs the steps against a fresh session on `album_id`; stops at the first
// failing step.
ReplayReport run_script(service::App& app, const std::string& album_id, const std::vector<ScriptStep>& steps,
                        const ScriptContext& context);

// ============================================================================
// Entry point
// ============================================================================

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace photoscout::cli
