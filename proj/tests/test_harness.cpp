#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "pairscale/bt.hpp"
#include "pairscale/cache.hpp"
#include "pairscale/client.hpp"
#include "pairscale/errors.hpp"
#include "pairscale/schedule.hpp"
#include "pairscale/synth.hpp"

using namespace pairscale;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "pairscale_test_harness";
  fs::create_directories(dir);
  fs::path p = dir / name;
  fs::remove(p);
  return p;
}

EndpointConfig endpoint_for(const MockServer& server, int concurrency = 4) {
  EndpointConfig config;
  config.base_url = server.base_url();
  config.model_id = "mock-llm";
  config.api_key = "test-key";
  config.max_concurrency = concurrency;
  config.request_timeout_s = 30.0;
  return config;
}

MockConfig strong_mock(std::size_t n, double gap, std::uint64_t seed,
                       double tie_rate = 0.0, double garbage_rate = 0.0) {
  MockConfig config;
  config.ids = synth_entity_ids(n);
  config.true_lambda = Eigen::VectorXd(n);
  for (std::size_t i = 0; i < n; ++i) {
    config.true_lambda(static_cast<Eigen::Index>(i)) =
        gap * (static_cast<double>(n - 1) / 2.0 - static_cast<double>(i));
  }
  config.seed = seed;
  config.tie_rate = tie_rate;
  config.garbage_rate = garbage_rate;
  return config;
}

}  // namespace

TEST_CASE("single comparison round-trips through the mock endpoint") {
  MockServer server(strong_mock(2, 10.0, 5));
  auto endpoint = endpoint_for(server);
  HttpChatClient client(endpoint);
  FixedClock clock(synth_epoch());
  auto tpl = builtin_template("ideology-liberal");
  PairTask task{"Synthetic Agency 1", "Synthetic Agency 2", "ideology-liberal", 0};
  auto record = run_comparison(task, tpl, endpoint, client, clock);
  CHECK(record.outcome == Outcome::kWinLeft);  // ability gap 10 is decisive
  CHECK(record.model_id == "mock-llm");
  CHECK(record.timestamp == synth_epoch());
  CHECK(!record.stage1_transcript.empty());
  CHECK(record.stage2_transcript == "Synthetic Agency 1");
  CHECK(server.request_count() == 2);  // one request per stage
}

TEST_CASE("attribute mismatch between task and template is rejected") {
  MockServer server(strong_mock(2, 1.0, 5));
  auto endpoint = endpoint_for(server);
  HttpChatClient client(endpoint);
  FixedClock clock(synth_epoch());
  auto tpl = builtin_template("knowledge-institution");
  PairTask task{"Synthetic Agency 1", "Synthetic Agency 2", "ideology-liberal", 0};
  CHECK_THROWS_AS(run_comparison(task, tpl, endpoint, client, clock),
                  ValidationError);
}

TEST_CASE("full schedule on the mock endpoint conserves tally mass") {
  const std::size_t n = 5;
  const int repeats = 20;
  MockServer server(strong_mock(n, 3.0, 11, 0.1));
  auto endpoint = endpoint_for(server, 6);
  HttpChatClient client(endpoint);
  FixedClock clock(synth_epoch());
  auto tpl = builtin_template("ideology-liberal");
  auto ids = synth_entity_ids(n);
  auto schedule = schedule_pairs_ids(ids, repeats, tpl.attribute, 3001);
  REQUIRE(schedule.size() == 200);

  auto cache_path = temp_path("schedule.jsonl");
  CacheWriter writer(cache_path.string());
  auto summary = run_schedule(schedule, tpl, endpoint, client, writer, clock);
  CHECK(summary.completed == 200);
  CHECK(summary.usable == 200);
  CHECK(summary.unusable == 0);

  auto records = read_cache(cache_path.string());
  REQUIRE(records.size() == 200);
  auto result = tally_ids(records, ids);
  CHECK(result.summary.usable == 200);
  CHECK(result.tally.wins.sum() == doctest::Approx(200.0));

  // Strong separation: the fitted ranking must match the true ranking.
  auto scores = fit_bt(result.tally);
  REQUIRE(scores.converged);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    CHECK(scores.lambda(static_cast<Eigen::Index>(i)) >
          scores.lambda(static_cast<Eigen::Index>(i + 1)));
  }
}

TEST_CASE("two identical runs produce identical records") {
  const std::size_t n = 4;
  auto run_once = [&](const std::string& name) {
    MockServer server(strong_mock(n, 1.0, 42, 0.2, 0.1));
    auto endpoint = endpoint_for(server, 3);
    HttpChatClient client(endpoint);
    FixedClock clock(synth_epoch());
    auto tpl = builtin_template("ideology-liberal");
    auto schedule = schedule_pairs_ids(synth_entity_ids(n), 5, tpl.attribute, 8);
    auto cache_path = temp_path(name);
    CacheWriter writer(cache_path.string());
    run_schedule(schedule, tpl, endpoint, client, writer, clock);
    auto records = read_cache(cache_path.string());
    std::vector<std::string> lines;
    for (const auto& r : records) lines.push_back(record_to_json(r));
    std::sort(lines.begin(), lines.end());
    return lines;
  };
  auto a = run_once("det_a.jsonl");
  auto b = run_once("det_b.jsonl");
  CHECK(a == b);
}

TEST_CASE("sticky garbage exhausts retries deterministically") {
  // garbage_rate 1: every task unusable no matter how many retries.
  MockServer server(strong_mock(2, 5.0, 7, 0.0, 1.0));
  auto endpoint = endpoint_for(server, 1);
  endpoint.max_retries = 2;
  HttpChatClient client(endpoint);
  FixedClock clock(synth_epoch());
  auto tpl = builtin_template("ideology-liberal");
  auto schedule = schedule_pairs_ids(synth_entity_ids(2), 1, tpl.attribute, 0);
  REQUIRE(schedule.size() == 1);
  auto cache_path = temp_path("garbage.jsonl");
  CacheWriter writer(cache_path.string());
  auto summary = run_schedule(schedule, tpl, endpoint, client, writer, clock);
  CHECK(summary.usable == 0);
  CHECK(summary.unusable == 1);
  // 1 + max_retries attempts, two requests each.
  CHECK(server.request_count() == 6);
  auto records = read_cache(cache_path.string());
  REQUIRE(records.size() == 1);
  CHECK(records[0].outcome == Outcome::kUnusable);
}

TEST_CASE("five percent garbage leaves a usable fit") {
  const std::size_t n = 10;
  const int repeats = 20;
  MockServer server(strong_mock(n, 0.5, 31, 0.0, 0.05));
  auto endpoint = endpoint_for(server, 8);
  HttpChatClient client(endpoint);
  FixedClock clock(synth_epoch());
  auto tpl = builtin_template("ideology-liberal");
  auto ids = synth_entity_ids(n);
  auto schedule = schedule_pairs_ids(ids, repeats, tpl.attribute, 555);
  REQUIRE(schedule.size() == 900);
  auto cache_path = temp_path("garbage5.jsonl");
  CacheWriter writer(cache_path.string());
  auto summary = run_schedule(schedule, tpl, endpoint, client, writer, clock);
  CHECK(summary.completed == 900);
  double rate = static_cast<double>(summary.unusable) / 900.0;
  CHECK(rate > 0.02);
  CHECK(rate < 0.09);
  auto records = read_cache(cache_path.string());
  auto result = tally_ids(records, ids);
  CHECK(result.summary.unusable == summary.unusable);
  auto scores = fit_bt(result.tally);
  CHECK(scores.converged);
}

TEST_CASE("resume issues only the missing tasks") {
  const std::size_t n = 4;
  auto ids = synth_entity_ids(n);
  auto tpl = builtin_template("ideology-liberal");
  auto schedule = schedule_pairs_ids(ids, 3, tpl.attribute, 17);
  REQUIRE(schedule.size() == 18);
  auto cache_path = temp_path("resume.jsonl");

  std::int64_t first_unusable = 0;
  {
    // First pass: heavy garbage leaves unusable holes.
    MockServer server(strong_mock(n, 1.0, 23, 0.0, 0.4));
    auto endpoint = endpoint_for(server, 4);
    endpoint.max_retries = 1;
    HttpChatClient client(endpoint);
    FixedClock clock(synth_epoch());
    CacheWriter writer(cache_path.string());
    auto summary = run_schedule(schedule, tpl, endpoint, client, writer, clock);
    first_unusable = summary.unusable;
    REQUIRE(first_unusable > 0);  // seed chosen so holes exist
  }
  {
    // Second pass: clean server; only the holes should be issued.
    auto records = read_cache(cache_path.string());
    auto pending = pending_tasks(schedule, records, "mock-llm");
    CHECK(pending.size() == static_cast<std::size_t>(first_unusable));
    MockServer server(strong_mock(n, 1.0, 23, 0.0, 0.0));
    auto endpoint = endpoint_for(server, 2);
    HttpChatClient client(endpoint);
    FixedClock clock(synth_epoch());
    CacheWriter writer(cache_path.string());
    auto summary = run_schedule(pending, tpl, endpoint, client, writer, clock);
    CHECK(summary.usable == first_unusable);
    CHECK(server.request_count() == 2 * first_unusable);
  }
  auto records = read_cache(cache_path.string());
  CHECK(records.size() == 18 + static_cast<std::size_t>(first_unusable));
  auto deduped = dedupe_by_key(records);
  CHECK(deduped.size() == 18);
  for (const auto& r : deduped) CHECK(r.outcome != Outcome::kUnusable);
  CHECK(pending_tasks(schedule, records, "mock-llm").empty());
}

TEST_CASE("unreachable endpoint raises after transport retries") {
  EndpointConfig config;
  config.base_url = "http://127.0.0.1:9/v1";  // discard port, nothing listens
  config.model_id = "mock-llm";
  config.api_key = "k";
  config.request_timeout_s = 1.0;
  HttpChatClient client(config);
  ChatRequest request;
  request.model = "mock-llm";
  request.messages = {{"user", "hello"}};
  CHECK_THROWS_AS(client.complete(request), EndpointUnreachableError);
}

TEST_CASE("endpoint config validation") {
  EndpointConfig config;
  config.model_id = "";
  config.api_key = "k";
  CHECK_THROWS_AS(config.check(), ValidationError);
  config.model_id = "m";
  config.max_concurrency = 0;
  CHECK_THROWS_AS(config.check(), ValidationError);
  config.max_concurrency = 2;
  config.max_retries = -1;
  CHECK_THROWS_AS(config.check(), ValidationError);
  config.max_retries = 0;
  config.base_url = "ftp://example.com";
  CHECK_THROWS_AS(config.check(), ValidationError);
}

TEST_CASE("mock server decisions match the synth sampler") {
  const std::size_t n = 3;
  auto config = strong_mock(n, 2.0, 910, 0.15, 0.0);
  MockServer server(config);
  auto endpoint = endpoint_for(server, 2);
  HttpChatClient client(endpoint);
  FixedClock clock(synth_epoch());
  auto tpl = builtin_template("ideology-liberal");
  auto schedule = schedule_pairs_ids(config.ids, 4, tpl.attribute, 66);
  auto cache_path = temp_path("sampler.jsonl");
  CacheWriter writer(cache_path.string());
  run_schedule(schedule, tpl, endpoint, client, writer, clock);
  for (const auto& record : read_cache(cache_path.string())) {
    const auto& t = record.task;
    std::string first = std::min(t.left, t.right);
    std::string second = std::max(t.left, t.right);
    auto first_it = std::find(config.ids.begin(), config.ids.end(), first);
    auto second_it = std::find(config.ids.begin(), config.ids.end(), second);
    REQUIRE(first_it != config.ids.end());
    REQUIRE(second_it != config.ids.end());
    auto stream = synth_stream_seed(config.seed, t.attribute, first, second,
                                    t.repeat_index);
    auto expected = sample_outcome(
        stream, config.true_lambda(first_it - config.ids.begin()),
        config.true_lambda(second_it - config.ids.begin()), config.tie_rate);
    // expected is relative to canonical order; translate to presentation.
    Outcome expected_presented = expected;
    if (expected != Outcome::kTie && t.left != first) {
      expected_presented = expected == Outcome::kWinLeft ? Outcome::kWinRight
                                                         : Outcome::kWinLeft;
    }
    CHECK(record.outcome == expected_presented);
  }
}
