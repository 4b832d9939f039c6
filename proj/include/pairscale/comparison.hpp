#pragma once

#include <Eigen/Core>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "pairscale/entity.hpp"

namespace pairscale {

enum class Outcome { kWinLeft, kWinRight, kTie, kUnusable };

const char* outcome_name(Outcome o);
Outcome outcome_from_name(const std::string& name);

// One scheduled presentation of an unordered pair.
struct PairTask {
  std::string left;
  std::string right;
  std::string attribute;
  int repeat_index = 0;
};

// One elicited outcome, transcripts retained verbatim for audit. Unusable
// means the extraction parse failed after all retries; such records are
// kept in the cache but never enter a tally.
struct ComparisonRecord {
  PairTask task;
  Outcome outcome = Outcome::kUnusable;
  std::string stage1_transcript;
  std::string stage2_transcript;
  std::string model_id;
  std::chrono::system_clock::time_point timestamp{};
};

// Aggregated real-valued win counts. wins(i, j) is the number of wins of
// entity i over entity j; ties contribute 0.5 to each side.
struct WinTally {
  std::vector<std::string> entities;
  Eigen::MatrixXd wins;

  explicit WinTally(std::vector<std::string> ids);
  WinTally(std::vector<std::string> ids, Eigen::MatrixXd w);

  Eigen::Index size() const { return wins.rows(); }
  Eigen::Index index_of(const std::string& id) const;

  // Nonnegative entries, zero diagonal, square and matching the id list.
  void check_invariants() const;
};

struct TallySummary {
  std::int64_t usable = 0;
  std::int64_t unusable = 0;
};

struct TallyResult {
  WinTally tally;
  TallySummary summary;
};

// Aggregates records into a tally over the given roster order. Unusable
// records are skipped (counted in the summary); a record referencing an id
// outside the roster throws UnknownEntityError.
TallyResult tally(const std::vector<ComparisonRecord>& records,
                  const std::vector<Entity>& entities);
TallyResult tally_ids(const std::vector<ComparisonRecord>& records,
                      const std::vector<std::string>& ids);

}  // namespace pairscale
