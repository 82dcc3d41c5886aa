#pragma once

// Natural language in and out of the query language: few-shot prompting of an
// LLM for sketch candidates (with a deterministic offline translator standing
// in when no endpoint is configured), and English explanations of programs.

#include <chrono>
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "photoscout/dsl.hpp"

namespace photoscout::nlbridge {

// ============================================================================
// Prompt corpus
// ============================================================================

struct PromptPair {
  std::string nl;
  std::string dsl;
};

// The eight (query, program) pairs shown to the model, in prompt order.
const std::vector<PromptPair>& prompt_corpus();

// Few-shot prompt: a short instruction, every corpus pair as an Input/Output
// block, then the user query with an empty Output line. Byte-stable.
std::string build_prompt(std::string_view query);

// Prompt asking for an English description of `program_text`.
std::string build_explanation_prompt(std::string_view program_text);

// Strip markup an LLM wraps around a program: code fences, backticks, a
// leading "Output:" label. Keeps the first non-empty line.
std::string clean_candidate(std::string_view raw);

// ============================================================================
// Offline translator
// ============================================================================

// Keyword/template translation of a query into 1-3 DSL candidates. Empty only
// when the query has no content words.
std::vector<std::string> fallback_candidates(std::string_view query);

// The keyword grammar alone, without the exact-match lookup in the corpus.
std::vector<std::string> template_candidates(std::string_view query);

// ============================================================================
// Explanations
// ============================================================================

struct ExplainContext {
  // Constants to treat as proper names (tags): no article, no "the".
  std::set<std::string> proper_names;
};

std::string explain(const dsl::Expr& program, const ExplainContext& ctx = {});

// ============================================================================
// LLM endpoint
// ============================================================================

struct LlmEndpoint {
  std::string base_url;  // e.g. http://127.0.0.1:8081/v1
  std::string model = "gpt-3.5-turbo";
  std::string key_env = "PHOTOSCOUT_LLM_KEY";
  std::chrono::milliseconds timeout{10000};
  int max_in_flight = 4;
  double temperature = 1.0;
};

// Chat-completion client. Requests for many samples are split across at most
// `max_in_flight` concurrent HTTP requests. Throws EndpointTimeout or
// EndpointError.
class LlmClient {
 public:
  explicit LlmClient(LlmEndpoint endpoint);

  std::vector<std::string> complete(const std::string& prompt, int samples) const;
  const LlmEndpoint& endpoint() const noexcept { return endpoint_; }

 private:
  std::vector<std::string> request(const std::string& prompt, int n, double temperature) const;

  LlmEndpoint endpoint_;
};

// Explanation from the model, or the template text when the request fails.
std::string explain_with_llm(const dsl::Expr& program, const LlmClient& client, const ExplainContext& ctx = {});

// ============================================================================
// Sketch sources
// ============================================================================

enum class SketchSourceMode { LlmEndpoint, Fallback, Replay };

struct SketchSourceConfig {
  SketchSourceMode mode = SketchSourceMode::Fallback;
  LlmEndpoint llm;
  std::filesystem::path replay_file;
  int sample_count = 20;
  // In LLM mode, degrade to the offline translator (with a warning) instead of
  // failing the request.
  bool fallback_on_error = true;
};

// "fallback", "llm" or "replay:<file>". Throws std::invalid_argument.
SketchSourceConfig parse_sketch_source(std::string_view spec, SketchSourceConfig base = {});

class SketchSource {
 public:
  virtual ~SketchSource() = default;
  // Raw candidate strings for `query`. May throw SketchSourceUnavailable.
  virtual std::vector<std::string> generate(std::string_view query) = 0;
  // Explanation of a synthesized program; template text unless an endpoint is
  // configured.
  virtual std::string explain(const dsl::Expr& program, const ExplainContext& ctx);
};

std::unique_ptr<SketchSource> make_sketch_source(const SketchSourceConfig& config);

// Lines of a replay fixture, skipping blank lines.
std::vector<std::string> read_replay_file(const std::filesystem::path& file);

// Cleaned, deduplicated candidates in first-seen order.
std::vector<std::string> generate_candidates(std::string_view query, SketchSource& source);

}  // namespace photoscout::nlbridge
