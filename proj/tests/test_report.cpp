#include <doctest.h>

#include <fstream>

#include "hscale/analysis.hpp"
#include "hscale/orfun.hpp"
#include "hscale/report.hpp"

using namespace hscale;
using namespace hscale::report;

TEST_CASE("verdict schema") {
  const auto v =
      analysis::criterion_integral(orfun::OrFunction::power(1), 0, 1);
  const auto doc = verdict_to_json(v);
  CHECK(validate_schema(doc, verdict_schema()).ok);

  auto missing = doc;
  missing.erase("kind");
  const auto r = validate_schema(missing, verdict_schema());
  CHECK_FALSE(r.ok);
  CHECK(r.path == "/kind");

  auto extra = doc;
  extra["unexpected"] = 1;
  CHECK_FALSE(validate_schema(extra, verdict_schema()).ok);

  auto wrong_type = doc;
  wrong_type["tail_ratio"] = "fast";
  const auto w = validate_schema(wrong_type, verdict_schema());
  CHECK_FALSE(w.ok);
  CHECK(w.path == "/tail_ratio");

  // a diverging verdict omits value and still validates
  const auto d =
      analysis::criterion_integral(orfun::OrFunction::power(0.25), 0, 1);
  CHECK(validate_schema(verdict_to_json(d), verdict_schema()).ok);
}

TEST_CASE("record schemas") {
  SlackRecord s{"3b.3", 1e-3, digest("x"), 1e-10};
  CHECK(validate_schema(to_json(s), slack_record_schema()).ok);
  FitRecord f{"c* of the rate bound", 1.7, 1.2};
  CHECK(validate_schema(to_json(f), fit_record_schema()).ok);
}

TEST_CASE("rate CSV validation") {
  const std::string good =
      "k,error,bound,ratio\r\n16,0.5,0.7,0.714\r\n32,0.25,0.5,0.5\r\n";
  CHECK(validate_rate_csv(good).ok);

  const std::string bad_cell =
      "k,error,bound,ratio\r\n16,0.5,0.7,0.714\r\n32,oops,0.5,0.5\r\n";
  const auto r = validate_rate_csv(bad_cell);
  CHECK_FALSE(r.ok);
  CHECK(r.row == 3);
  CHECK(r.col == 2);

  const std::string bad_header = "k,err,bound,ratio\r\n1,2,3,4\r\n";
  const auto h = validate_rate_csv(bad_header);
  CHECK_FALSE(h.ok);
  CHECK(h.row == 1);
  CHECK(h.col == 2);

  // emitted tables validate and end lines with CRLF
  const auto text = rate_table_csv({{16, 0.5, 0.7, 0.714}, {32, 0.1, 0.4, 0.25}});
  CHECK(validate_rate_csv(text).ok);
  CHECK(text.find("\r\n") != std::string::npos);
}

TEST_CASE("aggregation never flips a failing record") {
  std::vector<SlackRecord> all_ok = {{"3b.3", 1e-3, "d", 1e-10},
                                     {"3b.12", 0.0, "d", 1e-10}};
  CHECK(aggregate_pass(all_ok));
  std::vector<SlackRecord> one_bad = all_ok;
  one_bad.push_back({"3b.19", -1e-3, "d", 1e-10});
  CHECK_FALSE(aggregate_pass(one_bad));
  // tiny negative slack within tolerance still passes
  std::vector<SlackRecord> near = {{"3b.3", -1e-12, "d", 1e-10}};
  CHECK(aggregate_pass(near));
}

TEST_CASE("digest is stable and input-sensitive") {
  CHECK(digest("abc") == digest("abc"));
  CHECK(digest("abc") != digest("abd"));
  CHECK(digest("").size() == 16);
}

TEST_CASE("shipped schema files match the embedded versions") {
  struct Entry {
    const char* file;
    const nlohmann::json& embedded;
  } entries[] = {
      {"verdict.schema.json", verdict_schema()},
      {"slack_record.schema.json", slack_record_schema()},
      {"fit_record.schema.json", fit_record_schema()},
  };
  for (const auto& e : entries) {
    std::ifstream in(std::string(HSCALE_SCHEMA_DIR) + "/" + e.file);
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    CHECK(j == e.embedded);
  }
}
