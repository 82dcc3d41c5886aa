#include <algorithm>
#include <cstdlib>
#include <future>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "photoscout/errors.hpp"
#include "photoscout/nlbridge.hpp"

namespace photoscout::nlbridge {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw EndpointError(0, "malformed endpoint url '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

}  // namespace

LlmClient::LlmClient(LlmEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

std::vector<std::string> LlmClient::request(const std::string& prompt, int n, double temperature) const {
  const SplitUrl url = split_url(endpoint_.base_url);
  httplib::Client client(url.origin);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(endpoint_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(endpoint_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers headers;
  if (const char* key = std::getenv(endpoint_.key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  nlohmann::json body = {
      {"model", endpoint_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"n", n},
      {"temperature", temperature},
  };
  auto res = client.Post(url.path + "/chat/completions", headers, body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout || err == httplib::Error::Write) {
      throw EndpointTimeout("LLM endpoint timed out after " + std::to_string(endpoint_.timeout.count()) + " ms");
    }
    throw EndpointError(0, httplib::to_string(err));
  }
  if (res->status != 200) throw EndpointError(res->status, res->body.substr(0, 200));

  std::vector<std::string> out;
  try {
    const auto reply = nlohmann::json::parse(res->body);
    for (const auto& choice : reply.at("choices")) {
      if (choice.contains("message")) {
        out.push_back(choice.at("message").at("content").get<std::string>());
      } else {
        out.push_back(choice.at("text").get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw EndpointError(res->status, std::string("malformed completion: ") + e.what());
  }
  return out;
}

std::vector<std::string> LlmClient::complete(const std::string& prompt, int samples) const {
  if (samples <= 0) return {};
  const int lanes = std::max(1, std::min(endpoint_.max_in_flight, samples));
  std::vector<std::future<std::vector<std::string>>> pending;
  int remaining = samples;
  for (int lane = 0; lane < lanes; ++lane) {
    const int n = remaining / (lanes - lane);
    remaining -= n;
    pending.push_back(std::async(std::launch::async, [this, &prompt, n] {
      return request(prompt, n, endpoint_.temperature);
    }));
  }
  std::vector<std::string> out;
  std::exception_ptr failure;
  for (auto& f : pending) {
    try {
      auto part = f.get();
      out.insert(out.end(), part.begin(), part.end());
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  // Partial results are still useful; fail only when nothing came back.
  if (out.empty() && failure) std::rethrow_exception(failure);
  return out;
}

std::string explain_with_llm(const dsl::Expr& program, const LlmClient& client, const ExplainContext& ctx) {
  try {
    const auto replies = client.complete(build_explanation_prompt(dsl::render(program)), 1);
    for (const auto& r : replies) {
      std::string text = clean_candidate(r);
      if (text.rfind("Description:", 0) == 0) text = text.substr(12);
      const auto b = text.find_first_not_of(' ');
      if (b != std::string::npos) return text.substr(b);
    }
  } catch (const Error&) {
  }
  return explain(program, ctx);
}

}  // namespace photoscout::nlbridge
