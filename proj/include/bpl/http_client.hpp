#pragma once

// Grounding client for an OpenAI-compatible chat-completions endpoint. The
// model's answer (choices[0].message.content) must be the JSON object the
// operation's template asks for. https needs CPPHTTPLIB_OPENSSL_SUPPORT.
//
// Include this after any Eigen header: httplib pulls in <resolv.h>, whose _res
// macro breaks Eigen's product kernels.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "bpl/grounding.hpp"

namespace bpl {

struct HttpConfig {
  std::string endpoint = "http://127.0.0.1:8080/v1/chat/completions";
  std::string model;
  std::string api_key_env = "BPL_API_KEY";  // credentials come only from the environment
  double temperature = 0.0;
  int timeout_seconds = 60;
  int max_retries = 3;
  int backoff_ms = 500;  // doubled after each retry
};

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ParameterError("endpoint must start with http:// or https://: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpClient : public GroundingClient {
 public:
  HttpClient(HttpConfig cfg, PromptTemplates templates, ResponseCache* cache = nullptr)
      : GroundingClient(std::move(templates), cache), cfg_(std::move(cfg)), url_(split_url(cfg_.endpoint)) {
    if (cfg_.model.empty()) throw ParameterError("http client needs a model name");
    if (cfg_.max_retries < 0) throw ParameterError("max_retries must be non-negative");
  }

  std::size_t attempts() const { return attempts_; }

  std::string backend_id() const override { return "http:" + cfg_.model + "@" + cfg_.endpoint; }

 protected:
  std::string complete(const GroundingRequest& req) override {
    const nlohmann::json body = {{"model", cfg_.model},
                                 {"temperature", cfg_.temperature},
                                 {"messages", nlohmann::json::array({{{"role", "user"}, {"content", req.prompt}}})}};
    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);

    int delay = cfg_.backoff_ms;
    for (int attempt = 0;; ++attempt) {
      try {
        return attempt_once(headers, body.dump());
      } catch (const RateLimited&) {
        if (attempt >= cfg_.max_retries) throw;
      } catch (const TransportError&) {
        if (attempt >= cfg_.max_retries) throw;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      delay *= 2;
    }
  }

 private:
  std::string attempt_once(const httplib::Headers& headers, const std::string& body) {
    ++attempts_;
    httplib::Client cli(url_.origin);
    cli.set_connection_timeout(cfg_.timeout_seconds, 0);
    cli.set_read_timeout(cfg_.timeout_seconds, 0);
    auto res = cli.Post(url_.path, headers, body, "application/json");
    if (!res) throw TransportError("request to " + cfg_.endpoint + " failed: " + httplib::to_string(res.error()));
    if (res->status == 429) throw RateLimited("rate limited by " + cfg_.endpoint);
    if (res->status >= 500) throw TransportError("server error " + std::to_string(res->status) + " from " + cfg_.endpoint);
    if (res->status != 200)
      throw GroundingError("request rejected with status " + std::to_string(res->status) + ": " + res->body);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw MalformedResponse("no choices[0].message.content in completion", res->body);
    }
  }

  HttpConfig cfg_;
  ParsedUrl url_;
  std::atomic<std::size_t> attempts_{0};
};

}  // namespace bpl
