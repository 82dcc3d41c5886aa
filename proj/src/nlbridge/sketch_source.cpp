#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

#include "photoscout/errors.hpp"
#include "photoscout/nlbridge.hpp"

namespace photoscout::nlbridge {

namespace {

class FallbackSource : public SketchSource {
 public:
  std::vector<std::string> generate(std::string_view query) override { return fallback_candidates(query); }
};

class ReplaySource : public SketchSource {
 public:
  explicit ReplaySource(std::filesystem::path file) : file_(std::move(file)) {}

  std::vector<std::string> generate(std::string_view) override { return read_replay_file(file_); }

 private:
  std::filesystem::path file_;
};

class LlmSource : public SketchSource {
 public:
  explicit LlmSource(const SketchSourceConfig& config)
      : client_(config.llm), samples_(config.sample_count), fallback_on_error_(config.fallback_on_error) {}

  std::vector<std::string> generate(std::string_view query) override {
    try {
      return client_.complete(build_prompt(query), samples_);
    } catch (const Error& e) {
      if (!fallback_on_error_) throw SketchSourceUnavailable(e.what());
      spdlog::warn("LLM endpoint failed ({}); using the offline translator", e.what());
      return fallback_candidates(query);
    }
  }

  std::string explain(const dsl::Expr& program, const ExplainContext& ctx) override {
    return explain_with_llm(program, client_, ctx);
  }

 private:
  LlmClient client_;
  int samples_;
  bool fallback_on_error_;
};

}  // namespace

std::string SketchSource::explain(const dsl::Expr& program, const ExplainContext& ctx) {
  return nlbridge::explain(program, ctx);
}

SketchSourceConfig parse_sketch_source(std::string_view spec, SketchSourceConfig base) {
  if (spec == "fallback") {
    base.mode = SketchSourceMode::Fallback;
  } else if (spec == "llm") {
    base.mode = SketchSourceMode::LlmEndpoint;
  } else if (spec.rfind("replay:", 0) == 0 && spec.size() > 7) {
    base.mode = SketchSourceMode::Replay;
    base.replay_file = std::string(spec.substr(7));
  } else {
    throw std::invalid_argument("sketch source must be fallback, llm or replay:<file>, got '" + std::string(spec) +
                                "'");
  }
  return base;
}

std::unique_ptr<SketchSource> make_sketch_source(const SketchSourceConfig& config) {
  if (config.sample_count < 1) throw std::invalid_argument("sample_count must be at least 1");
  switch (config.mode) {
    case SketchSourceMode::Fallback:
      return std::make_unique<FallbackSource>();
    case SketchSourceMode::Replay:
      return std::make_unique<ReplaySource>(config.replay_file);
    case SketchSourceMode::LlmEndpoint:
      if (config.llm.base_url.empty()) {
        if (!config.fallback_on_error) throw SketchSourceUnavailable("no LLM endpoint configured");
        spdlog::warn("no LLM endpoint configured; using the offline translator");
        return std::make_unique<FallbackSource>();
      }
      return std::make_unique<LlmSource>(config);
  }
  return std::make_unique<FallbackSource>();
}

std::vector<std::string> read_replay_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SketchSourceUnavailable("cannot read replay file " + file.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(line);
  }
  return out;
}

std::vector<std::string> generate_candidates(std::string_view query, SketchSource& source) {
  std::vector<std::string> out;
  for (const auto& raw : source.generate(query)) {
    std::string cleaned = clean_candidate(raw);
    if (cleaned.empty()) continue;
    if (std::find(out.begin(), out.end(), cleaned) == out.end()) out.push_back(std::move(cleaned));
  }
  return out;
}

}  // namespace photoscout::nlbridge
