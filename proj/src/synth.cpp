#include "pairscale/synth.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <thread>

#include "pairscale/errors.hpp"
#include "pairscale/rng.hpp"

namespace pairscale {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

constexpr std::uint64_t kGarbageSalt = 0x67617262616765ULL;  // "garbage"

constexpr const char* kStage1Reply =
    "Weighing the two options on the stated dimension, one answer stands out; "
    "the follow-up question will get the extracted name.";

constexpr const char* kGarbageReply =
    "Honestly, both options have merit and a single full name would "
    "misrepresent my reasoning.";

constexpr std::int64_t kEpochSeconds = 1735689600;  // 2025-01-01T00:00:00Z

}  // namespace

std::chrono::system_clock::time_point synth_epoch() {
  return std::chrono::system_clock::from_time_t(
      static_cast<std::time_t>(kEpochSeconds));
}

void SynthSpec::check() const {
  if (true_lambda.size() < 2) {
    throw TooFewEntitiesError("synthetic spec needs at least two abilities");
  }
  if (repeats < 1) throw ValidationError("repeats must be >= 1");
  if (!(tie_rate >= 0.0 && tie_rate <= 1.0)) {
    throw ValidationError("tie_rate must be in [0, 1]");
  }
  if (!true_lambda.allFinite()) {
    throw ValidationError("true abilities must be finite");
  }
}

std::vector<std::string> synth_entity_ids(std::size_t n) {
  int width = 1;
  for (std::size_t value = n; value >= 10; value /= 10) ++width;
  std::vector<std::string> ids;
  ids.reserve(n);
  char buffer[64];
  for (std::size_t i = 1; i <= n; ++i) {
    std::snprintf(buffer, sizeof(buffer), "Synthetic Agency %0*zu", width, i);
    ids.emplace_back(buffer);
  }
  return ids;
}

std::uint64_t synth_stream_seed(std::uint64_t seed, const std::string& attribute,
                                const std::string& first,
                                const std::string& second, int repeat) {
  std::uint64_t h = fnv1a64(attribute);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(first, h);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(second, h);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(std::to_string(repeat), h);
  return fnv1a64_u64(seed, h);
}

Outcome sample_outcome(std::uint64_t stream_seed, double lambda_first,
                       double lambda_second, double tie_rate) {
  SplitMix64 rng(stream_seed);
  if (rng.next_double() < tie_rate) return Outcome::kTie;
  double p_first = sigmoid(lambda_first - lambda_second);
  return rng.next_double() < p_first ? Outcome::kWinLeft : Outcome::kWinRight;
}

std::vector<ComparisonRecord> generate(const SynthSpec& spec,
                                       const std::string& attribute) {
  spec.check();
  const std::size_t n = static_cast<std::size_t>(spec.true_lambda.size());
  const std::vector<std::string> ids = synth_entity_ids(n);
  std::vector<ComparisonRecord> records;
  records.reserve(n * (n - 1) / 2 * static_cast<std::size_t>(spec.repeats));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (int r = 0; r < spec.repeats; ++r) {
        ComparisonRecord record;
        record.task.left = ids[i];
        record.task.right = ids[j];
        record.task.attribute = attribute;
        record.task.repeat_index = r;
        std::uint64_t stream =
            synth_stream_seed(spec.seed, attribute, ids[i], ids[j], r);
        record.outcome =
            sample_outcome(stream, spec.true_lambda(static_cast<Eigen::Index>(i)),
                           spec.true_lambda(static_cast<Eigen::Index>(j)),
                           spec.tie_rate);
        record.stage1_transcript = "[synthetic]";
        record.stage2_transcript = "[synthetic]";
        record.model_id = kSynthModelId;
        record.timestamp = synth_epoch();
        records.push_back(std::move(record));
      }
    }
  }
  return records;
}

SyntheticRoster make_synthetic_roster(std::size_t n, std::uint64_t seed,
                                      double spread) {
  if (n < 2) throw TooFewEntitiesError("synthetic roster needs >= 2 entities");
  if (!(spread >= 0.0)) throw ValidationError("spread must be >= 0");
  SyntheticRoster roster;
  roster.true_lambda.resize(static_cast<Eigen::Index>(n));
  const std::vector<std::string> ids = synth_entity_ids(n);
  SplitMix64 rng(fnv1a64_u64(seed, fnv1a64("synthetic-roster")));
  for (std::size_t i = 0; i < n; ++i) {
    double lambda = spread - 2.0 * spread * static_cast<double>(i) /
                                 static_cast<double>(n - 1);
    roster.true_lambda(static_cast<Eigen::Index>(i)) = lambda;
    Entity entity;
    entity.id = ids[i];
    entity.display_name = ids[i];
    entity.covariates.annual_budget =
        std::exp(std::log(1e9) + 1.0 * rng.next_gaussian());
    entity.covariates.total_staff =
        std::max(1.0, std::round(std::exp(std::log(5e3) + 0.8 * rng.next_gaussian())));
    entity.covariates.layoff = rng.next_double() < sigmoid(2.0 * lambda) ? 1 : 0;
    entity.covariates.external_score = lambda + 0.5 * rng.next_gaussian();
    roster.entities.push_back(std::move(entity));
  }
  return roster;
}

struct MockServer::Impl {
  MockConfig config;
  httplib::Server server;
  std::thread listener;
  int port = 0;
  std::atomic<std::int64_t> requests{0};

  Eigen::Index index_of(const std::string& id) const {
    for (std::size_t i = 0; i < config.ids.size(); ++i) {
      if (config.ids[i] == id) return static_cast<Eigen::Index>(i);
    }
    return -1;
  }

  void handle(const httplib::Request& req, httplib::Response& res) {
    requests.fetch_add(1);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception&) {
      res.status = 400;
      res.set_content(R"({"error":{"message":"bad JSON"}})", "application/json");
      return;
    }
    std::string content;
    try {
      const auto& messages = doc.at("messages");
      if (!messages.is_array() || messages.empty()) {
        throw ValidationError("messages missing");
      }
      if (messages.size() == 1) {
        content = kStage1Reply;
      } else {
        nlohmann::json tag = nlohmann::json::parse(doc.at("user").get<std::string>());
        std::string left = tag.at("left").get<std::string>();
        std::string right = tag.at("right").get<std::string>();
        std::string attribute = tag.at("attribute").get<std::string>();
        int repeat = tag.at("repeat_index").get<int>();
        const std::string& first = std::min(left, right);
        const std::string& second = std::max(left, right);
        Eigen::Index fi = index_of(first);
        Eigen::Index si = index_of(second);
        if (fi < 0 || si < 0) throw ValidationError("unknown entity");
        std::uint64_t garbage_stream = synth_stream_seed(
            config.seed ^ kGarbageSalt, attribute, first, second, repeat);
        if (SplitMix64(garbage_stream).next_double() < config.garbage_rate) {
          content = kGarbageReply;
        } else {
          std::uint64_t stream =
              synth_stream_seed(config.seed, attribute, first, second, repeat);
          Outcome outcome = sample_outcome(stream, config.true_lambda(fi),
                                           config.true_lambda(si),
                                           config.tie_rate);
          if (outcome == Outcome::kTie) {
            content = "Tie";
          } else {
            content = (outcome == Outcome::kWinLeft) ? first : second;
          }
        }
      }
    } catch (const std::exception& e) {
      res.status = 400;
      nlohmann::json error{{"error", {{"message", e.what()}}}};
      res.set_content(error.dump(), "application/json");
      return;
    }
    nlohmann::json reply{
        {"id", "chatcmpl-mock"},
        {"object", "chat.completion"},
        {"created", kEpochSeconds},
        {"model", doc.value("model", "mock")},
        {"choices",
         nlohmann::json::array(
             {{{"index", 0},
               {"message", {{"role", "assistant"}, {"content", content}}},
               {"finish_reason", "stop"}}})},
        {"usage",
         {{"prompt_tokens", 0}, {"completion_tokens", 0}, {"total_tokens", 0}}},
    };
    res.status = 200;
    res.set_content(reply.dump(), "application/json");
  }
};

MockServer::MockServer(MockConfig config) : impl_(std::make_unique<Impl>()) {
  if (static_cast<std::size_t>(config.true_lambda.size()) != config.ids.size()) {
    throw LengthMismatchError("mock endpoint: ids and abilities differ in length");
  }
  impl_->config = std::move(config);
  auto handler = [impl = impl_.get()](const httplib::Request& req,
                                      httplib::Response& res) {
    impl->handle(req, res);
  };
  impl_->server.Post("/v1/chat/completions", handler);
  impl_->server.Post("/chat/completions", handler);
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  if (impl_->port <= 0) {
    throw EndpointUnreachableError("mock endpoint failed to bind a loopback port");
  }
  impl_->listener = std::thread([impl = impl_.get()]() {
    impl->server.listen_after_bind();
  });
  impl_->server.wait_until_ready();
}

MockServer::~MockServer() { stop(); }

int MockServer::port() const { return impl_->port; }

std::string MockServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port) + "/v1";
}

std::int64_t MockServer::request_count() const { return impl_->requests.load(); }

void MockServer::stop() {
  if (impl_ && impl_->listener.joinable()) {
    impl_->server.stop();
    impl_->listener.join();
  }
}

}  // namespace pairscale
