#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pairscale {

struct Covariates {
  std::optional<double> annual_budget;  // > 0 when present (log is a regressor)
  std::optional<double> total_staff;    // > 0 when present
  std::optional<int> layoff;            // 0 or 1 when present
  std::optional<double> external_score;
};

// One roster row. Immutable after validation; the id is the join key for
// everything downstream (prompts, cache, scores, regressions).
struct Entity {
  std::string id;
  std::string display_name;
  Covariates covariates;
};

struct RawRosterRow {
  std::string id;
  Covariates covariates;
};

// Canonicalizes ids (NFC + trim), checks uniqueness and covariate ranges.
// Throws EmptyRosterError, DuplicateIdError, NonPositiveCovariateError.
std::vector<Entity> validate_roster(const std::vector<RawRosterRow>& rows);

// Roster file: comma-separated, header row required, columns
//   id, annual_budget, total_staff, layoff, external_score
// (last four optional; any column order; empty cells mean absent).
std::vector<RawRosterRow> read_roster_csv(const std::string& path);
std::vector<Entity> load_roster(const std::string& path);
void write_roster_csv(const std::string& path, const std::vector<Entity>& roster);

}  // namespace pairscale
