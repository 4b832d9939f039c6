#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pairscale/entity.hpp"
#include "pairscale/errors.hpp"

using namespace pairscale;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "pairscale_test_entity";
  fs::create_directories(dir);
  return dir / name;
}

RawRosterRow row(const std::string& id) {
  RawRosterRow r;
  r.id = id;
  return r;
}

}  // namespace

TEST_CASE("validate_roster happy path") {
  std::vector<RawRosterRow> rows = {row("Peace Corps"),
                                    row("Department of Education")};
  rows[0].covariates.annual_budget = 4.1e8;
  rows[0].covariates.total_staff = 7000;
  rows[0].covariates.layoff = 1;
  rows[1].covariates.external_score = -0.3;
  auto roster = validate_roster(rows);
  REQUIRE(roster.size() == 2);
  CHECK(roster[0].id == "Peace Corps");
  CHECK(*roster[0].covariates.layoff == 1);
  CHECK(*roster[1].covariates.external_score == doctest::Approx(-0.3));
  CHECK(!roster[1].covariates.annual_budget.has_value());
}

TEST_CASE("validate_roster rejects empty roster") {
  CHECK_THROWS_AS(validate_roster({}), EmptyRosterError);
}

TEST_CASE("validate_roster rejects duplicates after canonicalization") {
  // Same id modulo whitespace and unicode normalization.
  std::vector<RawRosterRow> rows = {row("Caf\xc3\xa9"), row(" Caf\x65\xcc\x81 ")};
  CHECK_THROWS_AS(validate_roster(rows), DuplicateIdError);
}

TEST_CASE("validate_roster rejects non-positive covariates") {
  std::vector<RawRosterRow> rows = {row("A"), row("B")};
  rows[0].covariates.total_staff = 0.0;
  CHECK_THROWS_AS(validate_roster(rows), NonPositiveCovariateError);
  rows[0].covariates.total_staff = 5.0;
  rows[1].covariates.annual_budget = -2.0;
  CHECK_THROWS_AS(validate_roster(rows), NonPositiveCovariateError);
}

TEST_CASE("validate_roster rejects out-of-range layoff") {
  std::vector<RawRosterRow> rows = {row("A"), row("B")};
  rows[0].covariates.layoff = 2;
  CHECK_THROWS_AS(validate_roster(rows), ValidationError);
}

TEST_CASE("roster csv round-trip") {
  std::vector<RawRosterRow> rows = {row("Agency, The \"Big\" One"), row("Small")};
  rows[0].covariates.annual_budget = 123456789.25;
  rows[0].covariates.total_staff = 321;
  rows[0].covariates.layoff = 0;
  rows[0].covariates.external_score = 1.5;
  auto roster = validate_roster(rows);

  auto path = temp_file("round_trip.csv");
  write_roster_csv(path.string(), roster);
  auto loaded = load_roster(path.string());
  REQUIRE(loaded.size() == roster.size());
  for (std::size_t i = 0; i < roster.size(); ++i) {
    CHECK(loaded[i].id == roster[i].id);
    CHECK(loaded[i].covariates.annual_budget == roster[i].covariates.annual_budget);
    CHECK(loaded[i].covariates.total_staff == roster[i].covariates.total_staff);
    CHECK(loaded[i].covariates.layoff == roster[i].covariates.layoff);
    CHECK(loaded[i].covariates.external_score ==
          roster[i].covariates.external_score);
  }
}

TEST_CASE("read_roster_csv accepts any column order and missing columns") {
  auto path = temp_file("cols.csv");
  {
    std::ofstream out(path);
    out << "external_score,id\n0.25,First\n,Second\n";
  }
  auto rows = read_roster_csv(path.string());
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].id == "First");
  CHECK(*rows[0].covariates.external_score == doctest::Approx(0.25));
  CHECK(!rows[1].covariates.external_score.has_value());
  CHECK(!rows[0].covariates.layoff.has_value());
}

TEST_CASE("read_roster_csv rejects unknown columns") {
  auto path = temp_file("unknown.csv");
  {
    std::ofstream out(path);
    out << "id,wingspan\nA,2\n";
  }
  CHECK_THROWS_AS(read_roster_csv(path.string()), ValidationError);
}

TEST_CASE("read_roster_csv rejects unparseable numbers and bad layoff") {
  auto path = temp_file("badnum.csv");
  {
    std::ofstream out(path);
    out << "id,total_staff\nA,lots\n";
  }
  CHECK_THROWS_AS(read_roster_csv(path.string()), ValidationError);
  {
    std::ofstream out(path);
    out << "id,layoff\nA,3\n";
  }
  CHECK_THROWS_AS(read_roster_csv(path.string()), ValidationError);
}

TEST_CASE("read_roster_csv missing file and missing id column") {
  CHECK_THROWS_AS(read_roster_csv("/nonexistent/no.csv"), ValidationError);
  auto path = temp_file("noid.csv");
  {
    std::ofstream out(path);
    out << "layoff\n1\n";
  }
  CHECK_THROWS_AS(read_roster_csv(path.string()), ValidationError);
}

TEST_CASE("load_roster of 123 ids keeps order") {
  auto path = temp_file("many.csv");
  {
    std::ofstream out(path);
    out << "id\n";
    for (int i = 0; i < 123; ++i) out << "Agency " << 1000 + i << "\n";
  }
  auto roster = load_roster(path.string());
  REQUIRE(roster.size() == 123);
  CHECK(roster.front().id == "Agency 1000");
  CHECK(roster.back().id == "Agency 1122");
}
