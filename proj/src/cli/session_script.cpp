#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "photoscout/cli.hpp"

namespace photoscout::cli {

namespace {

using service::Json;

const std::set<std::string>& verbs_with_arg() {
  static const std::set<std::string> kVerbs = {"query",          "tag",           "pos",          "neg",
                                               "unlabel",        "expect_status", "expect_terms", "expect_contains",
                                               "expect_absent",  "expect_results", "expect_program", "save",
                                               "unsave",         "export"};
  return kVerbs;
}

const std::set<std::string>& verbs_without_arg() {
  static const std::set<std::string> kVerbs = {"search", "save_all"};
  return kVerbs;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : " ") + s;
  return out;
}

class Runner {
 public:
  Runner(service::App& app, std::string album_id, const ScriptContext& context)
      : app_(app), album_id_(std::move(album_id)), context_(context) {}

  ReplayReport run(const std::vector<ScriptStep>& steps) {
    ReplayReport report;
    const auto created = app_.create_session(Json{{"v", 1}, {"album_id", album_id_}});
    if (created.status != 201) {
      report.passed = false;
      report.failure = "cannot open a session: " + created.body.dump();
      return report;
    }
    session_ = created.body["session_id"].get<std::string>();
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto& step = steps[i];
      std::string problem;
      try {
        problem = execute(step);
      } catch (const std::exception& e) {
        problem = e.what();
      }
      ++report.steps_run;
      const std::string label = "step " + std::to_string(i + 1) + " (line " + std::to_string(step.line) + ")";
      if (!problem.empty()) {
        report.passed = false;
        report.failure = label + " " + step.verb + ": " + problem;
        report.log.push_back(label + " FAIL " + step.verb + " " + step.arg);
        return report;
      }
      report.log.push_back(label + " ok   " + step.verb + (step.arg.empty() ? "" : " " + step.arg));
    }
    return report;
  }

 private:
  // Empty string on success, otherwise what went wrong.
  std::string execute(const ScriptStep& step) {
    const std::string& v = step.verb;
    if (v == "query") {
      query_ = step.arg;
      return do_search();
    }
    if (v == "search") return do_search();
    if (v == "tag") {
      const auto eq = step.arg.find('=');
      if (eq == std::string::npos) return "expected name=cluster";
      const auto r = app_.add_tag(album_id_, Json{{"v", 1},
                                                  {"name", trim(step.arg.substr(0, eq))},
                                                  {"face_cluster", trim(step.arg.substr(eq + 1))}});
      if (r.status != 200) return r.body["error"]["message"].get<std::string>();
      return query_.empty() ? "" : do_search();
    }
    if (v == "pos" || v == "neg" || v == "unlabel") {
      if (!app_.album(album_id_)->find(step.arg)) return "image '" + step.arg + "' is not in the album";
      positive_.erase(step.arg);
      negative_.erase(step.arg);
      if (v == "pos") positive_.insert(step.arg);
      if (v == "neg") negative_.insert(step.arg);
      return query_.empty() ? "" : do_search();
    }
    if (v == "expect_status") {
      const std::string got = last_.value("status", "");
      return got == step.arg ? "" : "expected status " + step.arg + ", got " + describe_last();
    }
    if (v == "expect_terms") {
      auto want = words(step.arg);
      std::sort(want.begin(), want.end());
      std::vector<std::string> got;
      if (last_.contains("unknown_terms")) got = last_["unknown_terms"].get<std::vector<std::string>>();
      std::sort(got.begin(), got.end());
      return got == want ? "" : "expected unknown terms [" + join(want) + "], got [" + join(got) + "]";
    }
    if (v == "expect_contains" || v == "expect_absent") {
      const auto results = current_results();
      const bool present = std::find(results.begin(), results.end(), step.arg) != results.end();
      if (v == "expect_contains" && !present) return step.arg + " is not among the " + std::to_string(results.size()) + " results";
      if (v == "expect_absent" && present) return step.arg + " is among the results";
      return "";
    }
    if (v == "expect_results") return expect_results(step.arg);
    if (v == "expect_program") {
      const std::string got = last_.value("program", "");
      return got == step.arg ? "" : "expected program " + step.arg + ", got " + (got.empty() ? describe_last() : got);
    }
    if (v == "save_all" || v == "save") {
      Json body{{"v", 1}};
      if (v == "save_all") body["all"] = true;
      else body["image_ids"] = Json::array({step.arg});
      const auto r = app_.save(session_, body);
      return r.status == 200 ? "" : r.body["error"]["message"].get<std::string>();
    }
    if (v == "unsave") {
      const auto r = app_.unsave(session_, step.arg);
      return r.status == 200 ? "" : r.body["error"]["message"].get<std::string>();
    }
    if (v == "export") {
      std::filesystem::path dest = step.arg;
      if (dest.is_relative()) dest = context_.script_dir / dest;
      const auto r = app_.export_results(session_, Json{{"v", 1}, {"destination", dest.string()}});
      return r.status == 200 ? "" : r.body["error"]["message"].get<std::string>();
    }
    return "unknown step";
  }

  std::string do_search() {
    if (query_.empty()) return "no query has been given";
    const auto r = app_.search(session_, Json{{"v", 1}, {"query", query_}, {"positive", positive_}, {"negative", negative_}});
    if (r.status != 200) return "search failed with " + std::to_string(r.status) + ": " + r.body.dump();
    last_ = r.body;
    return "";
  }

  std::vector<std::string> current_results() const {
    if (!last_.contains("results")) return {};
    return last_["results"].get<std::vector<std::string>>();
  }

  std::string describe_last() const {
    if (last_.is_null()) return "no search yet";
    std::string s = last_.value("status", "?");
    if (last_.contains("diagnostic")) s += " (" + last_["diagnostic"].get<std::string>() + ")";
    if (last_.contains("unknown_terms")) s += " (" + last_["unknown_terms"].dump() + ")";
    return s;
  }

  std::string expect_results(const std::string& arg) {
    std::filesystem::path file;
    if (arg.rfind("@album/", 0) == 0) file = context_.album_dir / arg.substr(7);
    else file = std::filesystem::path(arg).is_relative() ? context_.script_dir / arg : std::filesystem::path(arg);
    std::ifstream in(file);
    if (!in) return "cannot read " + file.string();
    std::vector<std::string> want;
    for (std::string line; std::getline(in, line);) {
      line = trim(line);
      if (!line.empty() && line[0] != '#') want.push_back(line);
    }
    std::sort(want.begin(), want.end());
    auto got = current_results();
    std::sort(got.begin(), got.end());
    if (got == want) return "";
    std::vector<std::string> missing;
    std::vector<std::string> extra;
    std::set_difference(want.begin(), want.end(), got.begin(), got.end(), std::back_inserter(missing));
    std::set_difference(got.begin(), got.end(), want.begin(), want.end(), std::back_inserter(extra));
    auto head = [](const std::vector<std::string>& v) {
      std::vector<std::string> h(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(v.size(), 5)));
      return join(h) + (v.size() > 5 ? " ..." : "");
    };
    return "results differ from " + file.string() + " (" + describe_last() + "): " + std::to_string(missing.size()) +
           " missing [" + head(missing) + "], " + std::to_string(extra.size()) + " unexpected [" + head(extra) + "]";
  }

  service::App& app_;
  std::string album_id_;
  const ScriptContext& context_;
  std::string session_;
  std::string query_;
  std::set<std::string> positive_;
  std::set<std::string> negative_;
  Json last_;
};

}  // namespace

std::vector<ScriptStep> parse_script(std::string_view text) {
  std::vector<ScriptStep> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto space = t.find_first_of(" \t");
    ScriptStep step;
    step.line = number;
    step.verb = t.substr(0, space);
    step.arg = space == std::string::npos ? "" : trim(std::string_view(t).substr(space));
    const auto where = "script line " + std::to_string(number) + ": ";
    if (verbs_with_arg().count(step.verb)) {
      if (step.arg.empty()) throw std::invalid_argument(where + step.verb + " needs an argument");
    } else if (!verbs_without_arg().count(step.verb)) {
      throw std::invalid_argument(where + "unknown step '" + step.verb + "'");
    }
    out.push_back(std::move(step));
  }
  return out;
}

ReplayReport run_script(service::App& app, const std::string& album_id, const std::vector<ScriptStep>& steps,
                        const ScriptContext& context) {
  return Runner(app, album_id, context).run(steps);
}

}  // namespace photoscout::cli
