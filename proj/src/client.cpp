#include "pairscale/client.hpp"

#include <atomic>
#include <httplib.h>
#include <mutex>
#include <nlohmann/json.hpp>
#include <thread>

#include "pairscale/errors.hpp"

namespace pairscale {

void EndpointConfig::check() const {
  if (model_id.empty()) throw ValidationError("model id must be set");
  if (base_url.rfind("https://", 0) != 0 && base_url.rfind("http://", 0) != 0) {
    throw ValidationError("base_url must start with http:// or https://");
  }
  if (max_retries < 0) throw ValidationError("max_retries must be >= 0");
  if (max_concurrency < 1) throw ValidationError("max_concurrency must be >= 1");
  if (stage2_temperature != 0.0) {
    throw ValidationError("stage2 temperature is pinned to 0");
  }
  if (!(request_timeout_s > 0.0)) {
    throw ValidationError("request timeout must be positive");
  }
}

HttpChatClient::HttpChatClient(const EndpointConfig& config) : config_(config) {
  std::string rest;
  if (config.base_url.rfind("https://", 0) == 0) {
    tls_ = true;
    rest = config.base_url.substr(8);
  } else if (config.base_url.rfind("http://", 0) == 0) {
    tls_ = false;
    rest = config.base_url.substr(7);
  } else {
    throw ValidationError("base_url must start with http:// or https://");
  }
  std::size_t slash = rest.find('/');
  std::string hostport = (slash == std::string::npos) ? rest : rest.substr(0, slash);
  path_prefix_ = (slash == std::string::npos) ? "" : rest.substr(slash);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') {
    path_prefix_.pop_back();
  }
  std::size_t colon = hostport.rfind(':');
  if (colon != std::string::npos) {
    host_ = hostport.substr(0, colon);
    try {
      port_ = std::stoi(hostport.substr(colon + 1));
    } catch (const std::exception&) {
      port_ = 0;
    }
  } else {
    host_ = hostport;
    port_ = tls_ ? 443 : 80;
  }
  if (host_.empty() || port_ < 1 || port_ > 65535) {
    throw ValidationError("cannot parse host/port from base_url: " +
                          config.base_url);
  }
}

std::string HttpChatClient::complete(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& message : request.messages) {
    messages.push_back({{"role", message.role}, {"content", message.content}});
  }
  nlohmann::json body{{"model", request.model}, {"messages", messages}};
  if (request.temperature) body["temperature"] = *request.temperature;
  if (!request.user.empty()) body["user"] = request.user;
  const std::string payload = body.dump();
  const std::string path = path_prefix_ + "/chat/completions";

  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  auto post_once = [&]() -> httplib::Result {
    const time_t seconds = static_cast<time_t>(config_.request_timeout_s);
    const time_t micros = static_cast<time_t>(
        (config_.request_timeout_s - static_cast<double>(seconds)) * 1e6);
    if (tls_) {
      httplib::SSLClient cli(host_, port_);
      cli.set_connection_timeout(seconds, micros);
      cli.set_read_timeout(seconds, micros);
      cli.set_write_timeout(seconds, micros);
      return cli.Post(path, headers, payload, "application/json");
    }
    httplib::Client cli(host_, port_);
    cli.set_connection_timeout(seconds, micros);
    cli.set_read_timeout(seconds, micros);
    cli.set_write_timeout(seconds, micros);
    return cli.Post(path, headers, payload, "application/json");
  };

  constexpr int kTransportAttempts = 5;
  std::string last_failure;
  for (int attempt = 0; attempt < kTransportAttempts; ++attempt) {
    if (attempt > 0) {
      auto backoff = std::chrono::milliseconds(250) * (1 << (attempt - 1));
      std::this_thread::sleep_for(std::min(
          backoff, std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::seconds(4))));
    }
    httplib::Result res = post_once();
    if (!res) {
      last_failure = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) {
      try {
        nlohmann::json doc = nlohmann::json::parse(res->body);
        return doc.at("choices").at(0).at("message").at("content")
            .get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw EndpointError(std::string("malformed completion response: ") +
                            e.what());
      }
    }
    if (res->status == 401 || res->status == 403) {
      throw AuthFailureError("endpoint rejected credentials (HTTP " +
                             std::to_string(res->status) + ")");
    }
    if (res->status == 429 || res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    throw EndpointError("endpoint returned HTTP " + std::to_string(res->status) +
                        ": " + res->body.substr(0, 200));
  }
  throw EndpointUnreachableError("cannot reach " + host_ + ":" +
                                 std::to_string(port_) + " after " +
                                 std::to_string(kTransportAttempts) +
                                 " attempts (" + last_failure + ")");
}

std::string task_user_tag(const PairTask& task) {
  nlohmann::json tag{{"attribute", task.attribute},
                     {"left", task.left},
                     {"right", task.right},
                     {"repeat_index", task.repeat_index}};
  return tag.dump();
}

ComparisonRecord run_comparison(const PairTask& task, const PromptTemplate& tpl,
                                const EndpointConfig& endpoint,
                                ChatClient& client, Clock& clock) {
  if (tpl.attribute != task.attribute) {
    throw ValidationError("template attribute '" + tpl.attribute +
                          "' does not match task attribute '" + task.attribute +
                          "'");
  }
  const std::string stage1_prompt =
      render_prompt(tpl.stage1, task.left, task.right);
  const std::string stage2_prompt =
      render_prompt(tpl.stage2, task.left, task.right);
  const std::string tag = task_user_tag(task);

  ComparisonRecord record;
  record.task = task;
  record.model_id = endpoint.model_id;

  const int attempts = 1 + endpoint.max_retries;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    ChatRequest stage1;
    stage1.model = endpoint.model_id;
    stage1.messages = {{"user", stage1_prompt}};
    stage1.user = tag;
    std::string reply1 = client.complete(stage1);

    ChatRequest stage2;
    stage2.model = endpoint.model_id;
    stage2.messages = {{"user", stage1_prompt},
                       {"assistant", reply1},
                       {"user", stage2_prompt}};
    stage2.temperature = endpoint.stage2_temperature;
    stage2.user = tag;
    std::string reply2 = client.complete(stage2);

    record.outcome = parse_extraction(reply2, task.left, task.right);
    record.stage1_transcript = std::move(reply1);
    record.stage2_transcript = std::move(reply2);
    record.timestamp = clock.now();
    if (record.outcome != Outcome::kUnusable) break;
  }
  return record;
}

RunSummary run_schedule(
    const std::vector<PairTask>& tasks, const PromptTemplate& tpl,
    const EndpointConfig& endpoint, ChatClient& client, CacheWriter& cache,
    Clock& clock,
    const std::function<void(std::int64_t, std::int64_t)>& progress) {
  endpoint.check();
  RunSummary summary;
  if (tasks.empty()) return summary;

  std::atomic<std::size_t> next{0};
  std::atomic<std::int64_t> completed{0};
  std::atomic<std::int64_t> usable{0};
  std::atomic<std::int64_t> unusable{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::mutex progress_mutex;

  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      std::size_t index = next.fetch_add(1);
      if (index >= tasks.size()) break;
      try {
        ComparisonRecord record =
            run_comparison(tasks[index], tpl, endpoint, client, clock);
        cache.append(record);
        if (record.outcome == Outcome::kUnusable) {
          unusable.fetch_add(1);
        } else {
          usable.fetch_add(1);
        }
        std::int64_t done = completed.fetch_add(1) + 1;
        if (progress) {
          std::lock_guard<std::mutex> lock(progress_mutex);
          progress(done, static_cast<std::int64_t>(tasks.size()));
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        break;
      }
    }
  };

  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(endpoint.max_concurrency),
                            tasks.size());
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& thread : pool) thread.join();

  if (first_error) std::rethrow_exception(first_error);
  summary.completed = completed.load();
  summary.usable = usable.load();
  summary.unusable = unusable.load();
  return summary;
}

}  // namespace pairscale
