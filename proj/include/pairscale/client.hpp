#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pairscale/cache.hpp"
#include "pairscale/comparison.hpp"
#include "pairscale/schedule.hpp"

namespace pairscale {

struct EndpointConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_id;
  std::string api_key;
  int max_retries = 3;  // parse-failure retries; each restarts both stages
  double request_timeout_s = 120.0;
  int max_concurrency = 8;
  double stage2_temperature = 0.0;  // pinned: extraction must be greedy

  void check() const;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  std::optional<double> temperature;  // absent -> server-default sampling
  std::string user;                   // opaque per-task tag
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Returns the assistant message content. Throws EndpointUnreachableError
  // after transport retries, AuthFailureError on 401/403.
  virtual std::string complete(const ChatRequest& request) = 0;
};

// chat/completions over HTTP(S). A fresh connection per request keeps the
// client safe under concurrent use.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(const EndpointConfig& config);
  std::string complete(const ChatRequest& request) override;

 private:
  EndpointConfig config_;
  bool tls_ = false;
  std::string host_;
  int port_ = 0;
  std::string path_prefix_;
};

// Injectable time source so mock runs can emit reproducible timestamps.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::chrono::system_clock::time_point now() = 0;
};

class SystemClock : public Clock {
 public:
  std::chrono::system_clock::time_point now() override {
    return std::chrono::system_clock::now();
  }
};

class FixedClock : public Clock {
 public:
  explicit FixedClock(std::chrono::system_clock::time_point t) : t_(t) {}
  std::chrono::system_clock::time_point now() override { return t_; }

 private:
  std::chrono::system_clock::time_point t_;
};

// The JSON tag sent in the request's "user" field; carries the task
// coordinates so a deterministic mock can reproduce its decision on retry.
std::string task_user_tag(const PairTask& task);

// Two-stage elicitation of one task: stage1 prompt, stage2 extraction in the
// same conversation, parse; on parse failure the whole exchange restarts, up
// to 1 + max_retries attempts, after which the record is Unusable.
ComparisonRecord run_comparison(const PairTask& task, const PromptTemplate& tpl,
                                const EndpointConfig& endpoint,
                                ChatClient& client, Clock& clock);

struct RunSummary {
  std::int64_t completed = 0;
  std::int64_t usable = 0;
  std::int64_t unusable = 0;
};

// Runs tasks on a pool of max_concurrency workers, appending every record to
// the cache. The first endpoint error stops the pool and rethrows.
RunSummary run_schedule(
    const std::vector<PairTask>& tasks, const PromptTemplate& tpl,
    const EndpointConfig& endpoint, ChatClient& client, CacheWriter& cache,
    Clock& clock,
    const std::function<void(std::int64_t, std::int64_t)>& progress = nullptr);

}  // namespace pairscale
