#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>

#include "pairscale/cache.hpp"
#include "pairscale/errors.hpp"
#include "pairscale/schedule.hpp"
#include "pairscale/synth.hpp"

using namespace pairscale;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "pairscale_test_cache";
  fs::create_directories(dir);
  fs::path p = dir / name;
  fs::remove(p);
  return p;
}

ComparisonRecord make_record(const std::string& left, const std::string& right,
                             Outcome outcome, int repeat = 0,
                             const std::string& model = "mock-llm") {
  ComparisonRecord r;
  r.task = PairTask{left, right, "ideology-liberal", repeat};
  r.outcome = outcome;
  r.stage1_transcript = "stage one text for " + left;
  r.stage2_transcript = left;
  r.model_id = model;
  r.timestamp = synth_epoch();
  return r;
}

}  // namespace

TEST_CASE("rfc3339 round-trip") {
  auto t = synth_epoch();
  CHECK(format_rfc3339(t) == "2025-01-01T00:00:00Z");
  CHECK(parse_rfc3339("2025-01-01T00:00:00Z") == t);
  auto later = t + std::chrono::hours(26) + std::chrono::seconds(61);
  CHECK(parse_rfc3339(format_rfc3339(later)) == later);
}

TEST_CASE("rfc3339 accepts offsets and fractional seconds") {
  auto base = parse_rfc3339("2025-06-01T12:00:00Z");
  CHECK(parse_rfc3339("2025-06-01T12:00:00.500Z") == base);
  CHECK(parse_rfc3339("2025-06-01T14:30:00+02:30") == base);
  CHECK(parse_rfc3339("2025-06-01T10:00:00-02:00") == base);
  CHECK_THROWS_AS(parse_rfc3339("not a date"), CacheError);
  CHECK_THROWS_AS(parse_rfc3339("2025-06-01T12:00:00Zjunk"), CacheError);
}

TEST_CASE("record json round-trip") {
  auto original = make_record("Peace Corps", "Department of \"State\"",
                              Outcome::kTie, 3);
  original.stage2_transcript = "multi\nline\twith unicode: caf\xc3\xa9";
  auto line = record_to_json(original);
  CHECK(line.find('\n') == std::string::npos);  // one record per line
  auto parsed = record_from_json(line);
  CHECK(parsed.task.left == original.task.left);
  CHECK(parsed.task.right == original.task.right);
  CHECK(parsed.task.attribute == original.task.attribute);
  CHECK(parsed.task.repeat_index == original.task.repeat_index);
  CHECK(parsed.outcome == original.outcome);
  CHECK(parsed.stage1_transcript == original.stage1_transcript);
  CHECK(parsed.stage2_transcript == original.stage2_transcript);
  CHECK(parsed.model_id == original.model_id);
  CHECK(parsed.timestamp == original.timestamp);
}

TEST_CASE("record json rejects malformed input") {
  CHECK_THROWS_AS(record_from_json("{"), CacheError);
  CHECK_THROWS_AS(record_from_json("{}"), CacheError);
  auto ok = record_to_json(make_record("A", "B", Outcome::kWinLeft));
  auto broken = ok;
  auto pos = broken.find("win_left");
  REQUIRE(pos != std::string::npos);
  broken.replace(pos, 8, "mystery!");
  CHECK_THROWS_AS(record_from_json(broken), CacheError);
}

TEST_CASE("outcome names round-trip") {
  for (Outcome o : {Outcome::kWinLeft, Outcome::kWinRight, Outcome::kTie,
                    Outcome::kUnusable}) {
    CHECK(outcome_from_name(outcome_name(o)) == o);
  }
}

TEST_CASE("task_key ignores presentation order") {
  PairTask ab{"Alpha", "Beta", "ideology-liberal", 2};
  PairTask ba{"Beta", "Alpha", "ideology-liberal", 2};
  CHECK(task_key(ab, "m") == task_key(ba, "m"));
  PairTask other_rep{"Alpha", "Beta", "ideology-liberal", 3};
  CHECK(task_key(ab, "m") != task_key(other_rep, "m"));
  PairTask other_attr{"Alpha", "Beta", "knowledge-institution", 2};
  CHECK(task_key(ab, "m") != task_key(other_attr, "m"));
  CHECK(task_key(ab, "m") != task_key(ab, "other-model"));
}

TEST_CASE("cache write and read round-trip") {
  auto path = temp_path("roundtrip.jsonl");
  std::vector<ComparisonRecord> records = {
      make_record("A", "B", Outcome::kWinLeft, 0),
      make_record("B", "C", Outcome::kTie, 0),
      make_record("A", "C", Outcome::kUnusable, 1),
  };
  {
    CacheWriter writer(path.string());
    for (const auto& r : records) writer.append(r);
  }
  auto loaded = read_cache(path.string());
  REQUIRE(loaded.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(loaded[i].task.left == records[i].task.left);
    CHECK(loaded[i].outcome == records[i].outcome);
  }
  CHECK(read_cache(temp_path("missing.jsonl").string()).empty());
}

TEST_CASE("appending to an existing cache preserves old records") {
  auto path = temp_path("append.jsonl");
  {
    CacheWriter writer(path.string());
    writer.append(make_record("A", "B", Outcome::kWinLeft, 0));
  }
  {
    CacheWriter writer(path.string());
    writer.append(make_record("A", "B", Outcome::kWinRight, 1));
  }
  auto loaded = read_cache(path.string());
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].task.repeat_index == 0);
  CHECK(loaded[1].task.repeat_index == 1);
}

TEST_CASE("torn final line is dropped, torn middle line is an error") {
  auto path = temp_path("torn.jsonl");
  auto good = record_to_json(make_record("A", "B", Outcome::kWinLeft));
  {
    std::ofstream out(path);
    out << good << "\n" << good.substr(0, good.size() / 2);
  }
  auto loaded = read_cache(path.string());
  CHECK(loaded.size() == 1);
  {
    std::ofstream out(path);
    out << good.substr(0, good.size() / 2) << "\n" << good << "\n";
  }
  CHECK_THROWS_AS(read_cache(path.string()), CacheError);
}

TEST_CASE("pending_tasks resumes only missing work") {
  std::vector<std::string> ids = {"A", "B", "C"};
  auto schedule = schedule_pairs_ids(ids, 2, "ideology-liberal", 1);
  REQUIRE(schedule.size() == 6);
  std::vector<ComparisonRecord> records;
  // Usable record for one cell, unusable for another.
  records.push_back(make_record(schedule[0].left, schedule[0].right,
                                Outcome::kWinLeft, schedule[0].repeat_index));
  records.push_back(make_record(schedule[1].left, schedule[1].right,
                                Outcome::kUnusable, schedule[1].repeat_index));
  auto pending = pending_tasks(schedule, records, "mock-llm");
  CHECK(pending.size() == 5);  // the unusable cell is retried
  auto keys_of = [&](const std::vector<PairTask>& tasks) {
    std::vector<std::string> keys;
    for (const auto& t : tasks) keys.push_back(task_key(t, "mock-llm"));
    return keys;
  };
  auto pending_keys = keys_of(pending);
  CHECK(std::find(pending_keys.begin(), pending_keys.end(),
                  task_key(schedule[0], "mock-llm")) == pending_keys.end());
  // A record under a different model does not count.
  auto pending_other = pending_tasks(schedule, records, "other-model");
  CHECK(pending_other.size() == 6);
}

TEST_CASE("dedupe_by_key prefers usable and later records") {
  auto a_unusable = make_record("A", "B", Outcome::kUnusable, 0);
  auto a_usable = make_record("B", "A", Outcome::kWinLeft, 0);  // flipped order
  auto a_later = make_record("A", "B", Outcome::kWinRight, 0);
  SUBCASE("usable beats unusable") {
    auto out = dedupe_by_key({a_unusable, a_usable});
    REQUIRE(out.size() == 1);
    CHECK(out[0].outcome == Outcome::kWinLeft);
  }
  SUBCASE("unusable never replaces usable") {
    auto out = dedupe_by_key({a_usable, a_unusable});
    REQUIRE(out.size() == 1);
    CHECK(out[0].outcome == Outcome::kWinLeft);
  }
  SUBCASE("later usable wins") {
    auto out = dedupe_by_key({a_usable, a_later});
    REQUIRE(out.size() == 1);
    CHECK(out[0].outcome == Outcome::kWinRight);
  }
  SUBCASE("distinct repeats kept apart") {
    auto other = make_record("A", "B", Outcome::kTie, 1);
    auto out = dedupe_by_key({a_usable, other});
    CHECK(out.size() == 2);
  }
}

TEST_CASE("tally counts wins and splits ties") {
  std::vector<ComparisonRecord> records = {
      make_record("A", "B", Outcome::kWinLeft, 0),
      make_record("A", "B", Outcome::kWinLeft, 1),
      make_record("B", "A", Outcome::kWinRight, 2),  // A wins again
      make_record("A", "B", Outcome::kTie, 3),
      make_record("A", "B", Outcome::kUnusable, 4),
  };
  auto result = tally_ids(records, {"A", "B"});
  CHECK(result.summary.usable == 4);
  CHECK(result.summary.unusable == 1);
  CHECK(result.tally.wins(0, 1) == doctest::Approx(3.5));
  CHECK(result.tally.wins(1, 0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(tally_ids(records, {"A"}), UnknownEntityError);
}

TEST_CASE("tally through a cache file is bit-identical") {
  auto path = temp_path("bits.jsonl");
  std::vector<ComparisonRecord> records;
  for (int r = 0; r < 7; ++r) {
    records.push_back(make_record("A", "B", r % 3 == 0 ? Outcome::kTie
                                                       : Outcome::kWinLeft, r));
    records.push_back(make_record("B", "C", Outcome::kWinRight, r));
  }
  {
    CacheWriter writer(path.string());
    for (const auto& r : records) writer.append(r);
  }
  auto direct = tally_ids(records, {"A", "B", "C"});
  auto loaded = tally_ids(read_cache(path.string()), {"A", "B", "C"});
  CHECK(direct.tally.wins == loaded.tally.wins);
}
