#include "pairscale/cache.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "pairscale/errors.hpp"

namespace pairscale {

std::string format_rfc3339(std::chrono::system_clock::time_point t) {
  std::time_t seconds = std::chrono::system_clock::to_time_t(t);
  std::tm utc{};
  gmtime_r(&seconds, &utc);
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                utc.tm_year + 1900, utc.tm_mon + 1, utc.tm_mday, utc.tm_hour,
                utc.tm_min, utc.tm_sec);
  return buffer;
}

std::chrono::system_clock::time_point parse_rfc3339(const std::string& text) {
  int year, month, day, hour, minute, second;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &month,
                  &day, &hour, &minute, &second, &consumed) != 6) {
    throw CacheError("bad RFC 3339 timestamp: " + text);
  }
  std::size_t pos = static_cast<std::size_t>(consumed);
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  }
  long offset_seconds = 0;
  if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    int oh, om;
    int sign = (text[pos] == '-') ? -1 : 1;
    if (std::sscanf(text.c_str() + pos + 1, "%2d:%2d", &oh, &om) != 2) {
      throw CacheError("bad RFC 3339 offset: " + text);
    }
    offset_seconds = sign * (oh * 3600L + om * 60L);
    pos += 6;
  } else {
    throw CacheError("RFC 3339 timestamp missing offset: " + text);
  }
  if (pos != text.size()) {
    throw CacheError("trailing characters in timestamp: " + text);
  }
  std::tm utc{};
  utc.tm_year = year - 1900;
  utc.tm_mon = month - 1;
  utc.tm_mday = day;
  utc.tm_hour = hour;
  utc.tm_min = minute;
  utc.tm_sec = second;
  std::time_t epoch = timegm(&utc);
  if (epoch == static_cast<std::time_t>(-1)) {
    throw CacheError("out-of-range timestamp: " + text);
  }
  return std::chrono::system_clock::from_time_t(epoch - offset_seconds);
}

std::string record_to_json(const ComparisonRecord& record) {
  nlohmann::json doc{
      {"task",
       {{"left", record.task.left},
        {"right", record.task.right},
        {"attribute", record.task.attribute},
        {"repeat_index", record.task.repeat_index}}},
      {"outcome", outcome_name(record.outcome)},
      {"stage1_transcript", record.stage1_transcript},
      {"stage2_transcript", record.stage2_transcript},
      {"model_id", record.model_id},
      {"timestamp", format_rfc3339(record.timestamp)},
  };
  return doc.dump();
}

ComparisonRecord record_from_json(const std::string& line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw CacheError(std::string("bad cache line: ") + e.what());
  }
  try {
    ComparisonRecord record;
    const auto& task = doc.at("task");
    record.task.left = task.at("left").get<std::string>();
    record.task.right = task.at("right").get<std::string>();
    record.task.attribute = task.at("attribute").get<std::string>();
    record.task.repeat_index = task.at("repeat_index").get<int>();
    record.outcome = outcome_from_name(doc.at("outcome").get<std::string>());
    record.stage1_transcript = doc.at("stage1_transcript").get<std::string>();
    record.stage2_transcript = doc.at("stage2_transcript").get<std::string>();
    record.model_id = doc.at("model_id").get<std::string>();
    record.timestamp = parse_rfc3339(doc.at("timestamp").get<std::string>());
    if (record.task.left == record.task.right) {
      throw CacheError("cache record compares an entity with itself");
    }
    if (record.task.repeat_index < 0) {
      throw CacheError("cache record has a negative repeat_index");
    }
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw CacheError(std::string("bad cache record: ") + e.what());
  } catch (const CacheError&) {
    throw;
  } catch (const std::exception& e) {
    // e.g. an unrecognized outcome name; still a malformed cache line
    throw CacheError(std::string("bad cache record: ") + e.what());
  }
}

std::string task_key(const PairTask& task, const std::string& model_id) {
  const std::string& first = std::min(task.left, task.right);
  const std::string& second = std::max(task.left, task.right);
  std::string key;
  key.reserve(task.attribute.size() + model_id.size() + first.size() +
              second.size() + 16);
  key += task.attribute;
  key += '\x1f';
  key += model_id;
  key += '\x1f';
  key += first;
  key += '\x1f';
  key += second;
  key += '\x1f';
  key += std::to_string(task.repeat_index);
  return key;
}

CacheWriter::CacheWriter(const std::string& path) : path_(path) {
  std::ofstream probe(path_, std::ios::app);
  if (!probe) throw CacheError("cannot open cache file for append: " + path_);
}

void CacheWriter::append(const ComparisonRecord& record) {
  std::string line = record_to_json(record);
  std::lock_guard<std::mutex> lock(mutex_);
  std::ofstream out(path_, std::ios::app);
  if (!out) throw CacheError("cannot open cache file for append: " + path_);
  out << line << '\n';
  out.flush();
  if (!out) throw CacheError("failed writing cache record to " + path_);
}

std::vector<ComparisonRecord> read_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  std::size_t last_nonempty = lines.size();
  for (std::size_t i = lines.size(); i > 0; --i) {
    if (!lines[i - 1].empty()) {
      last_nonempty = i - 1;
      break;
    }
  }
  std::vector<ComparisonRecord> records;
  records.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      records.push_back(record_from_json(lines[i]));
    } catch (const CacheError& e) {
      if (i == last_nonempty) {
        std::cerr << "warning: dropping torn final line of " << path << "\n";
        break;
      }
      throw CacheError(path + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return records;
}

std::unordered_set<std::string> usable_keys(
    const std::vector<ComparisonRecord>& records, const std::string& model_id) {
  std::unordered_set<std::string> keys;
  for (const auto& record : records) {
    if (record.model_id == model_id && record.outcome != Outcome::kUnusable) {
      keys.insert(task_key(record.task, record.model_id));
    }
  }
  return keys;
}

std::vector<PairTask> pending_tasks(const std::vector<PairTask>& schedule,
                                    const std::vector<ComparisonRecord>& records,
                                    const std::string& model_id) {
  auto done = usable_keys(records, model_id);
  std::vector<PairTask> pending;
  for (const auto& task : schedule) {
    if (!done.count(task_key(task, model_id))) pending.push_back(task);
  }
  return pending;
}

std::vector<ComparisonRecord> dedupe_by_key(
    const std::vector<ComparisonRecord>& records) {
  std::vector<ComparisonRecord> out;
  std::unordered_map<std::string, std::size_t> by_key;
  for (const auto& record : records) {
    std::string key = task_key(record.task, record.model_id);
    auto [it, inserted] = by_key.emplace(key, out.size());
    if (inserted) {
      out.push_back(record);
      continue;
    }
    ComparisonRecord& kept = out[it->second];
    bool new_usable = record.outcome != Outcome::kUnusable;
    bool old_usable = kept.outcome != Outcome::kUnusable;
    if (new_usable || !old_usable) kept = record;
  }
  return out;
}

}  // namespace pairscale
