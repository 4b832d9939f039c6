#include "pairscale/comparison.hpp"

#include <unordered_map>

#include "pairscale/errors.hpp"

namespace pairscale {

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kWinLeft:
      return "win_left";
    case Outcome::kWinRight:
      return "win_right";
    case Outcome::kTie:
      return "tie";
    case Outcome::kUnusable:
      return "unusable";
  }
  return "unusable";
}

Outcome outcome_from_name(const std::string& name) {
  if (name == "win_left") return Outcome::kWinLeft;
  if (name == "win_right") return Outcome::kWinRight;
  if (name == "tie") return Outcome::kTie;
  if (name == "unusable") return Outcome::kUnusable;
  throw ValidationError("unknown outcome '" + name + "'");
}

WinTally::WinTally(std::vector<std::string> ids)
    : entities(std::move(ids)),
      wins(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(entities.size()),
                                 static_cast<Eigen::Index>(entities.size()))) {}

WinTally::WinTally(std::vector<std::string> ids, Eigen::MatrixXd w)
    : entities(std::move(ids)), wins(std::move(w)) {
  check_invariants();
}

Eigen::Index WinTally::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (entities[i] == id) return static_cast<Eigen::Index>(i);
  }
  throw UnknownEntityError("entity '" + id + "' not in tally");
}

void WinTally::check_invariants() const {
  const auto n = static_cast<Eigen::Index>(entities.size());
  if (wins.rows() != n || wins.cols() != n) {
    throw ValidationError("win matrix shape does not match entity list");
  }
  if ((wins.array() < 0.0).any()) {
    throw ValidationError("win matrix has a negative entry");
  }
  if (wins.diagonal().cwiseAbs().maxCoeff() != 0.0) {
    throw ValidationError("win matrix has a nonzero diagonal entry");
  }
}

TallyResult tally_ids(const std::vector<ComparisonRecord>& records,
                      const std::vector<std::string>& ids) {
  WinTally result(ids);
  std::unordered_map<std::string, Eigen::Index> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    index.emplace(ids[i], static_cast<Eigen::Index>(i));
  }
  auto lookup = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw UnknownEntityError("comparison record references entity '" + id +
                               "' not present in the roster");
    }
    return it->second;
  };
  TallySummary summary;
  for (const ComparisonRecord& record : records) {
    Eigen::Index left = lookup(record.task.left);
    Eigen::Index right = lookup(record.task.right);
    switch (record.outcome) {
      case Outcome::kWinLeft:
        result.wins(left, right) += 1.0;
        ++summary.usable;
        break;
      case Outcome::kWinRight:
        result.wins(right, left) += 1.0;
        ++summary.usable;
        break;
      case Outcome::kTie:
        result.wins(left, right) += 0.5;
        result.wins(right, left) += 0.5;
        ++summary.usable;
        break;
      case Outcome::kUnusable:
        ++summary.unusable;
        break;
    }
  }
  return TallyResult{std::move(result), summary};
}

TallyResult tally(const std::vector<ComparisonRecord>& records,
                  const std::vector<Entity>& entities) {
  std::vector<std::string> ids;
  ids.reserve(entities.size());
  for (const Entity& e : entities) ids.push_back(e.id);
  return tally_ids(records, ids);
}

}  // namespace pairscale
