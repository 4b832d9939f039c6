#include "pairscale/entity.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "pairscale/errors.hpp"
#include "pairscale/text.hpp"

namespace pairscale {

namespace {

void check_positive(const std::optional<double>& value, const std::string& id,
                    const char* field) {
  if (value && !(*value > 0.0)) {
    throw NonPositiveCovariateError("covariate '" + std::string(field) +
                                    "' must be positive for entity '" + id +
                                    "', got " + std::to_string(*value));
  }
  if (value && !std::isfinite(*value)) {
    throw NonPositiveCovariateError("covariate '" + std::string(field) +
                                    "' must be finite for entity '" + id + "'");
  }
}

std::optional<double> parse_optional_double(const std::string& cell,
                                            const std::string& id,
                                            const std::string& column) {
  std::string s = trim(cell);
  if (s.empty()) return std::nullopt;
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("roster row '" + id + "': cannot parse column '" +
                          column + "' value '" + s + "' as a number");
  }
}

}  // namespace

std::vector<Entity> validate_roster(const std::vector<RawRosterRow>& rows) {
  if (rows.empty()) throw EmptyRosterError("roster contains no rows");
  std::vector<Entity> entities;
  entities.reserve(rows.size());
  std::unordered_set<std::string> seen;
  for (const RawRosterRow& row : rows) {
    std::string id = canonical_id(row.id);
    if (id.empty()) throw ValidationError("roster row with empty id");
    if (!seen.insert(id).second) {
      throw DuplicateIdError("duplicate roster id '" + id + "'");
    }
    check_positive(row.covariates.annual_budget, id, "annual_budget");
    check_positive(row.covariates.total_staff, id, "total_staff");
    if (row.covariates.layoff && *row.covariates.layoff != 0 &&
        *row.covariates.layoff != 1) {
      throw ValidationError("covariate 'layoff' must be 0 or 1 for entity '" +
                            id + "', got " +
                            std::to_string(*row.covariates.layoff));
    }
    entities.push_back(Entity{id, id, row.covariates});
  }
  return entities;
}

std::vector<RawRosterRow> read_roster_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open roster file '" + path + "'");
  auto rows = parse_csv(in);
  if (rows.empty()) throw EmptyRosterError("roster file '" + path + "' is empty");

  static const std::unordered_set<std::string> known = {
      "id", "annual_budget", "total_staff", "layoff", "external_score"};
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) {
    std::string name = fold_case(trim(rows[0][i]));
    if (!known.count(name)) {
      throw ValidationError("roster file '" + path + "': unknown column '" +
                            rows[0][i] + "'");
    }
    if (!col.emplace(name, i).second) {
      throw ValidationError("roster file '" + path + "': repeated column '" +
                            name + "'");
    }
  }
  if (!col.count("id")) {
    throw ValidationError("roster file '" + path + "': missing 'id' column");
  }

  auto cell = [&](const std::vector<std::string>& row,
                  const char* name) -> std::string {
    auto it = col.find(name);
    if (it == col.end() || it->second >= row.size()) return "";
    return row[it->second];
  };

  std::vector<RawRosterRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    RawRosterRow row;
    row.id = cell(rows[r], "id");
    if (trim(row.id).empty()) {
      throw ValidationError("roster file '" + path + "': row " +
                            std::to_string(r + 1) + " has an empty id");
    }
    row.covariates.annual_budget =
        parse_optional_double(cell(rows[r], "annual_budget"), row.id, "annual_budget");
    row.covariates.total_staff =
        parse_optional_double(cell(rows[r], "total_staff"), row.id, "total_staff");
    if (auto layoff = parse_optional_double(cell(rows[r], "layoff"), row.id, "layoff")) {
      row.covariates.layoff = static_cast<int>(*layoff);
      if (*layoff != 0.0 && *layoff != 1.0) {
        throw ValidationError("roster row '" + row.id + "': layoff must be 0 or 1");
      }
    }
    row.covariates.external_score =
        parse_optional_double(cell(rows[r], "external_score"), row.id, "external_score");
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<Entity> load_roster(const std::string& path) {
  return validate_roster(read_roster_csv(path));
}

void write_roster_csv(const std::string& path, const std::vector<Entity>& roster) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write roster file '" + path + "'");
  out << "id,annual_budget,total_staff,layoff,external_score\n";
  char buf[64];
  auto fmt = [&](const std::optional<double>& v) -> std::string {
    if (!v) return "";
    // Shortest representation that parses back to the same double.
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), *v);
    return ec == std::errc() ? std::string(buf, end) : "";
  };
  for (const Entity& e : roster) {
    out << csv_escape(e.id) << ',' << fmt(e.covariates.annual_budget) << ','
        << fmt(e.covariates.total_staff) << ','
        << (e.covariates.layoff ? std::to_string(*e.covariates.layoff) : "")
        << ',' << fmt(e.covariates.external_score) << '\n';
  }
}

}  // namespace pairscale
