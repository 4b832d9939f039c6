#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "pairscale/text.hpp"

using namespace pairscale;

TEST_CASE("trim strips ascii whitespace on both ends") {
  CHECK(trim("  hello  ") == "hello");
  CHECK(trim("\t\r\n x \n") == "x");
  CHECK(trim("") == "");
  CHECK(trim("   ") == "");
  CHECK(trim("no-op") == "no-op");
}

TEST_CASE("nfc composes decomposed sequences") {
  // "é" as e + combining acute vs precomposed U+00E9.
  std::string decomposed = "Caf\x65\xcc\x81";
  std::string composed = "Caf\xc3\xa9";
  CHECK(nfc(decomposed) == composed);
  CHECK(nfc(composed) == composed);
}

TEST_CASE("nfc is total on invalid utf-8") {
  std::string bad = "ok\xff\xfe\x80zz";
  std::string out = nfc(bad);
  CHECK(!out.empty());  // replaced, not rejected
  CHECK(nfc(out) == out);
}

TEST_CASE("fold_case handles non-ascii") {
  CHECK(fold_case("HeLLo") == "hello");
  CHECK(fold_case("\xc3\x89PA") == "\xc3\xa9pa");  // É -> é
}

TEST_CASE("match_key equates case and normalization variants") {
  CHECK(match_key(" Environmental Protection Agency ") ==
        match_key("ENVIRONMENTAL PROTECTION AGENCY"));
  CHECK(match_key("Caf\x65\xcc\x81") == match_key("caf\xc3\xa9"));
}

TEST_CASE("canonical_id trims and normalizes but keeps case") {
  CHECK(canonical_id("  Peace Corps ") == "Peace Corps");
  CHECK(canonical_id("Caf\x65\xcc\x81") == "Caf\xc3\xa9");
}

TEST_CASE("contains") {
  CHECK(contains("department of education", "education"));
  CHECK(!contains("peace corps", "education"));
  CHECK(!contains("abc", ""));  // empty needle must not match everything
}

TEST_CASE("parse_csv handles quotes, commas and newlines") {
  std::istringstream in(
      "a,b,c\n"
      "\"x,y\",\"line\nbreak\",\"doubled \"\"quote\"\"\"\n"
      "plain,,end\n");
  auto rows = parse_csv(in);
  REQUIRE(rows.size() == 3);
  REQUIRE(rows[1].size() == 3);
  CHECK(rows[1][0] == "x,y");
  CHECK(rows[1][1] == "line\nbreak");
  CHECK(rows[1][2] == "doubled \"quote\"");
  CHECK(rows[2][1] == "");
}

TEST_CASE("csv_escape round-trips through parse_csv") {
  std::vector<std::string> fields = {"plain", "with,comma", "with \"quotes\"",
                                     "multi\nline", ""};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(fields[i]);
  }
  line += '\n';
  std::istringstream in(line);
  auto rows = parse_csv(in);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].size() == fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) CHECK(rows[0][i] == fields[i]);
}

TEST_CASE("parse_csv crlf line endings") {
  std::istringstream in("a,b\r\n1,2\r\n");
  auto rows = parse_csv(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][1] == "b");
  CHECK(rows[1][1] == "2");
}
