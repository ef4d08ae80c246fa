#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <thread>

#ifdef LASP_ENABLE_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "lasp/chat.hpp"

namespace lasp {

struct LiveConfig {
  std::string base_url;  // e.g. "https://api.openai.com" or "http://127.0.0.1:8089"
  std::string path = "/v1/chat/completions";
  std::string api_key;
  std::string model = "gpt-4";
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
  int timeout_seconds = 60;
  int max_transient_retries = 3;
};

/// Chat-completions HTTP client. Transient failures (timeouts, 429, 5xx)
/// are retried a bounded number of times; auth failures are surfaced
/// immediately without retrying.
class LiveBackend final : public ChatBackend {
public:
  explicit LiveBackend(LiveConfig config) : config_(std::move(config)) {}

  std::string complete(const ChatRequest& request) override {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages)
      messages.push_back({{"role", m.role}, {"content", m.content}});
    nlohmann::json payload = {{"model", config_.model.empty() ? request.model : config_.model},
                              {"temperature", request.temperature},
                              {"messages", messages}};
    if (request.seed) payload["seed"] = *request.seed;
    else if (config_.seed) payload["seed"] = *config_.seed;
    const std::string body = payload.dump();

    int attempt = 0;
    std::string last_failure;
    while (attempt <= config_.max_transient_retries) {
      if (attempt > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(250 * (1 << (attempt - 1))));
      ++attempt;
      httplib::Client client(config_.base_url);
      client.set_connection_timeout(config_.timeout_seconds);
      client.set_read_timeout(config_.timeout_seconds);
      httplib::Headers headers;
      if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);
      auto res = client.Post(config_.path, headers, body, "application/json");
      if (!res) {
        last_failure = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 401 || res->status == 403)
        throw BackendError(BackendError::Kind::Auth,
                           "authentication failed (" + std::to_string(res->status) + "): " +
                               res->body);
      if (res->status == 429 || res->status >= 500) {
        last_failure = "status " + std::to_string(res->status) + ": " + res->body;
        continue;
      }
      if (res->status != 200)
        throw BackendError(BackendError::Kind::Transport,
                           "unexpected status " + std::to_string(res->status) + ": " + res->body);
      try {
        nlohmann::json doc = nlohmann::json::parse(res->body);
        last_usage_ = doc.contains("usage") ? doc["usage"].dump() : "";
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const std::exception& e) {
        throw BackendError(BackendError::Kind::BadReply,
                           std::string("malformed completion payload: ") + e.what());
      }
    }
    throw BackendError(BackendError::Kind::Transport,
                       "giving up after " + std::to_string(config_.max_transient_retries + 1) +
                           " attempts; last failure: " + last_failure);
  }

  [[nodiscard]] std::string id() const override { return "live:" + config_.base_url; }
  [[nodiscard]] std::string last_usage() const override { return last_usage_; }

private:
  LiveConfig config_;
  std::string last_usage_;
};

}  // namespace lasp
