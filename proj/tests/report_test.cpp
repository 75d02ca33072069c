#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "report.hpp"
#include "util.hpp"

using namespace sconclab;

TEST_SUITE("report") {

TEST_CASE("expectations fold into the verdict") {
  Report r("demo", 3);
  r.metric("err", 0.5);
  r.expect({"err", "max", 1.0, 0, 0, false});
  CHECK(r.pass());
  r.expect({"err", "min", 0.75, 0, 0, false});
  CHECK(!r.pass());
  // A later success does not clear an earlier failure.
  r.expect({"err", "eq", 0.5, 1e-12, 0, false});
  CHECK(!r.pass());
}

TEST_CASE("equality expectations use the tolerance") {
  Report r("demo", 3);
  r.metric("v", 1.05);
  r.expect({"v", "eq", 1.0, 0.1, 0, false});
  CHECK(r.pass());
  Report r2("demo", 3);
  r2.metric("v", 1.25);
  r2.expect({"v", "eq", 1.0, 0.1, 0, false});
  CHECK(!r2.pass());
}

TEST_CASE("unknown operators are config errors") {
  Report r("demo", 3);
  r.metric("v", 1.0);
  try {
    r.expect({"v", "between", 1.0, 0, 0, false});
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Err::Config);
  }
}

TEST_CASE("serialization is ordered and reproducible") {
  auto build = [] {
    Report r("demo", 9);
    r.set_params(ordered_json{{"phi", {{"name", "neg-norm"}}}});
    r.metric("b_second", 2.0);
    r.metric("a_first", 1.0);
    r.info("note", "text");
    r.expect({"a_first", "max", 2.0, 0, 0, false});
    r.add_artifact("out.csv");
    return r;
  };
  std::string a = build().to_json(false).dump(2);
  std::string b = build().to_json(false).dump(2);
  CHECK(a == b);
  CHECK(a.find("timestamp") == std::string::npos);
  // Metrics keep insertion order.
  CHECK(a.find("b_second") < a.find("a_first"));
  CHECK(a.find("\"schema\": \"sconclab-report-v1\"") != std::string::npos);
  std::string stamped = build().to_json(true).dump(2);
  CHECK(stamped.find("timestamp") != std::string::npos);
}

TEST_CASE("csv emitters carry full precision") {
  GridSpec g = GridSpec::over(Vec::of({0}), Vec::of({1}), 0.5);
  GridFn fn{g, {1.0 / 3.0, 0.1, -2.0}};
  std::string csv = csv_of_grid(fn);
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "x1,value");
  std::getline(in, row);
  auto comma = row.find(',');
  CHECK(std::stod(row.substr(comma + 1)) == 1.0 / 3.0);

  std::vector<Vec> pts = {Vec::of({0.25, -1})};
  std::string pcsv = csv_of_points(pts, 2);
  CHECK(pcsv.find("x1,x2") == 0);
}

TEST_CASE("text files land where asked") {
  std::string path = "/tmp/sconclab_report_test/inner/out.txt";
  write_text_file(path, "payload");
  std::ifstream in(path);
  std::string content;
  std::getline(in, content);
  CHECK(content == "payload");
  std::remove(path.c_str());
}

}  // TEST_SUITE
