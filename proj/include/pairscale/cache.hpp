#pragma once

#include <chrono>
#include <mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pairscale/comparison.hpp"

namespace pairscale {

// RFC 3339 UTC instants with second precision ("2025-01-02T03:04:05Z").
std::string format_rfc3339(std::chrono::system_clock::time_point t);
std::chrono::system_clock::time_point parse_rfc3339(const std::string& text);

std::string record_to_json(const ComparisonRecord& record);
ComparisonRecord record_from_json(const std::string& line);

// Cache identity of a task: attribute, model, the unordered pair, and the
// repeat index. Presentation order is deliberately not part of the key.
std::string task_key(const PairTask& task, const std::string& model_id);

// Append-only JSONL store; append is serialized and flushed per record so a
// crash loses at most the line being written.
class CacheWriter {
 public:
  explicit CacheWriter(const std::string& path);
  void append(const ComparisonRecord& record);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::mutex mutex_;
};

// Reads every well-formed line; a torn final line (crash mid-append) is
// dropped, any other malformed line is a CacheError. A missing file reads
// as empty.
std::vector<ComparisonRecord> read_cache(const std::string& path);

// Keys that already have a usable (non-Unusable) outcome stored.
std::unordered_set<std::string> usable_keys(
    const std::vector<ComparisonRecord>& records, const std::string& model_id);

// Tasks from the schedule that still need to run: those without a stored
// usable record.
std::vector<PairTask> pending_tasks(const std::vector<PairTask>& schedule,
                                    const std::vector<ComparisonRecord>& records,
                                    const std::string& model_id);

// One record per key: a usable record wins over an unusable one, later
// records win over earlier ones.
std::vector<ComparisonRecord> dedupe_by_key(
    const std::vector<ComparisonRecord>& records);

}  // namespace pairscale
