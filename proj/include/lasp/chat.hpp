#pragma once

#include <cstdint>
#include <deque>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lasp {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct ChatRequest {
  std::string role_tag;  // which LASP role issued this call
  std::vector<ChatMessage> messages;
  std::string model;
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
};

struct ChatExchange {
  ChatRequest request;
  std::string response;
  std::string prompt_hash;
  std::string usage;  // raw usage object from the endpoint, when reported
};

class BackendError : public std::runtime_error {
public:
  enum class Kind { Transport, Auth, ReplayMismatch, ScriptExhausted, BadReply };

  BackendError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] Kind kind() const { return kind_; }

private:
  Kind kind_;
};

/// Whitespace-insensitive prompt identity: CRLF folded, runs of blanks
/// collapsed, trailing blanks trimmed. Catches semantic drift while
/// tolerating incidental formatting differences.
inline std::string normalize_prompt(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (c == '\r') continue;
    if (c == ' ' || c == '\t') {
      pending_space = true;
      continue;
    }
    if (c == '\n') {
      while (!out.empty() && out.back() == ' ') out.pop_back();
      pending_space = false;
      if (!out.empty() && out.back() != '\n') out.push_back('\n');
      continue;
    }
    if (pending_space && !out.empty() && out.back() != '\n') out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  while (!out.empty() && (out.back() == '\n' || out.back() == ' ')) out.pop_back();
  return out;
}

inline std::string prompt_hash(const ChatRequest& request) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0x1f;
    h *= 1099511628211ULL;
  };
  for (const auto& m : request.messages) {
    mix(m.role);
    mix(normalize_prompt(m.content));
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

/// A chat-completions backend. Implementations must be usable for several
/// episodes in sequence; calls within one episode are strictly serial.
class ChatBackend {
public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
  [[nodiscard]] virtual std::string id() const = 0;
  /// Usage metadata of the most recent completion, when the backend has any.
  [[nodiscard]] virtual std::string last_usage() const { return ""; }
};

/// Ordered canned replies keyed by role; the workhorse for deterministic
/// episode tests.
class ScriptedBackend final : public ChatBackend {
public:
  ScriptedBackend() = default;

  void enqueue(const std::string& role_tag, const std::string& response) {
    entries_.push_back({role_tag, response});
  }

  std::string complete(const ChatRequest& request) override {
    if (entries_.empty())
      throw BackendError(BackendError::Kind::ScriptExhausted,
                         "scripted backend has no reply left for role '" + request.role_tag + "'");
    Entry next = entries_.front();
    if (next.role_tag != request.role_tag)
      throw BackendError(BackendError::Kind::ScriptExhausted,
                         "scripted backend expected role '" + next.role_tag +
                             "' but got a call for '" + request.role_tag + "'");
    entries_.pop_front();
    return next.response;
  }

  [[nodiscard]] std::string id() const override { return "scripted"; }
  [[nodiscard]] std::size_t remaining() const { return entries_.size(); }

  /// Loads a script file: JSON array of {"role": ..., "response": ...}.
  static ScriptedBackend from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BackendError(BackendError::Kind::Transport, "cannot open script " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    ScriptedBackend backend;
    for (const auto& item : doc)
      backend.enqueue(item.at("role").get<std::string>(), item.at("response").get<std::string>());
    return backend;
  }

private:
  struct Entry {
    std::string role_tag;
    std::string response;
  };
  std::deque<Entry> entries_;
};

struct Transcript {
  std::string scenario;
  std::string backend_id;
  std::vector<ChatExchange> exchanges;

  static Transcript load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BackendError(BackendError::Kind::Transport, "cannot open transcript " + path);
    Transcript t;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json doc = nlohmann::json::parse(line);
      if (!header_seen) {
        if (!doc.contains("lasp_transcript_version") ||
            doc["lasp_transcript_version"].get<int>() != 1)
          throw BackendError(BackendError::Kind::Transport,
                             "transcript " + path + ": unsupported version header");
        t.scenario = doc.value("scenario", "");
        t.backend_id = doc.value("backend", "");
        header_seen = true;
        continue;
      }
      ChatExchange e;
      e.request.role_tag = doc.at("role").get<std::string>();
      const auto& req = doc.at("request");
      e.request.model = req.value("model", "");
      e.request.temperature = req.value("temperature", 0.0);
      if (req.contains("seed") && !req["seed"].is_null())
        e.request.seed = req["seed"].get<std::int64_t>();
      for (const auto& m : req.at("messages"))
        e.request.messages.push_back(
            {m.at("role").get<std::string>(), m.at("content").get<std::string>()});
      e.response = doc.at("response").get<std::string>();
      e.prompt_hash = doc.value("prompt_hash", prompt_hash(e.request));
      e.usage = doc.value("usage", "");
      t.exchanges.push_back(std::move(e));
    }
    if (!header_seen)
      throw BackendError(BackendError::Kind::Transport, "transcript " + path + " is empty");
    return t;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw BackendError(BackendError::Kind::Transport, "cannot write transcript " + path);
    nlohmann::json header = {{"lasp_transcript_version", 1},
                             {"scenario", scenario},
                             {"backend", backend_id}};
    out << header.dump() << "\n";
    for (const auto& e : exchanges) out << exchange_json(e).dump() << "\n";
  }

  static nlohmann::json exchange_json(const ChatExchange& e) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : e.request.messages)
      messages.push_back({{"role", m.role}, {"content", m.content}});
    nlohmann::json req = {{"model", e.request.model},
                          {"temperature", e.request.temperature},
                          {"messages", messages}};
    if (e.request.seed) req["seed"] = *e.request.seed;
    nlohmann::json doc = {{"role", e.request.role_tag},
                          {"prompt_hash", e.prompt_hash.empty() ? prompt_hash(e.request) : e.prompt_hash},
                          {"request", req},
                          {"response", e.response}};
    if (!e.usage.empty()) doc["usage"] = e.usage;
    return doc;
  }
};

/// Replays a recorded transcript in order. Requests are matched on
/// (role, normalized prompt hash); any divergence is reported with the
/// role and both hashes so drift is easy to locate.
class ReplayBackend final : public ChatBackend {
public:
  explicit ReplayBackend(Transcript transcript) : transcript_(std::move(transcript)) {}

  static ReplayBackend from_file(const std::string& path) {
    return ReplayBackend(Transcript::load(path));
  }

  std::string complete(const ChatRequest& request) override {
    if (cursor_ >= transcript_.exchanges.size())
      throw BackendError(BackendError::Kind::ReplayMismatch,
                         "transcript exhausted: no exchange left for role '" + request.role_tag +
                             "'");
    const ChatExchange& expected = transcript_.exchanges[cursor_];
    std::string actual_hash = prompt_hash(request);
    if (expected.request.role_tag != request.role_tag || expected.prompt_hash != actual_hash) {
      std::ostringstream os;
      os << "replay mismatch at exchange " << cursor_ << ": expected role '"
         << expected.request.role_tag << "' hash " << expected.prompt_hash << ", got role '"
         << request.role_tag << "' hash " << actual_hash;
      throw BackendError(BackendError::Kind::ReplayMismatch, os.str());
    }
    ++cursor_;
    return expected.response;
  }

  [[nodiscard]] std::string id() const override { return "replay:" + transcript_.scenario; }
  [[nodiscard]] std::size_t position() const { return cursor_; }
  [[nodiscard]] const Transcript& transcript() const { return transcript_; }

private:
  Transcript transcript_;
  std::size_t cursor_ = 0;
};

/// Wraps another backend and records every exchange.
class RecordingBackend final : public ChatBackend {
public:
  RecordingBackend(std::unique_ptr<ChatBackend> inner, std::string scenario)
      : inner_(std::move(inner)) {
    transcript_.scenario = std::move(scenario);
    transcript_.backend_id = inner_->id();
  }

  std::string complete(const ChatRequest& request) override {
    std::string response = inner_->complete(request);
    ChatExchange e;
    e.request = request;
    e.response = response;
    e.prompt_hash = prompt_hash(request);
    e.usage = inner_->last_usage();
    transcript_.exchanges.push_back(std::move(e));
    return response;
  }

  [[nodiscard]] std::string id() const override { return "recording(" + inner_->id() + ")"; }
  [[nodiscard]] const Transcript& transcript() const { return transcript_; }
  Transcript& transcript() { return transcript_; }

private:
  std::unique_ptr<ChatBackend> inner_;
  Transcript transcript_;
};

}  // namespace lasp
