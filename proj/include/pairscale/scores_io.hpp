#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pairscale/bt.hpp"

namespace pairscale {

// Scores table as stored on disk: columns id, lambda, quasi_se, ci_low,
// ci_high; rows sorted by descending lambda (ties by id); 10 significant
// digits.
struct ScoresTable {
  std::vector<std::string> ids;
  Eigen::VectorXd lambda;
  Eigen::VectorXd quasi_se;
  Eigen::VectorXd ci_low;
  Eigen::VectorXd ci_high;

  std::size_t size() const { return ids.size(); }
};

void write_scores(const std::string& path, const ScaledScores& scores);
ScoresTable read_scores(const std::string& path);

// Audit sidecar written next to a scores file as <path>.meta.json.
struct FitMetadata {
  std::string attribute;
  std::string model_id;
  std::string template_hash;  // empty when the attribute has no known template
  std::string toolkit_version;
  std::string rng;
  std::optional<std::uint64_t> seed;  // elicitation seed when known
  bool sign_flip = false;
  double ci_level = 0.95;
  std::int64_t usable = 0;
  std::int64_t unusable = 0;
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;
};

std::string metadata_path(const std::string& scores_path);
void write_fit_metadata(const std::string& path, const FitMetadata& meta);
std::optional<FitMetadata> read_fit_metadata(const std::string& path);

}  // namespace pairscale
