#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "config.hpp"
#include "util.hpp"

using namespace sconclab;

TEST_SUITE("config") {

TEST_CASE("sections, comments and typed lookups") {
  const char* text =
      "# leading comment\n"
      "[experiment]\n"
      "name = evolve\n"
      "seed = 42\n"
      "\n"
      "[params]\n"
      "t = 0.5\n"
      "; full comment\n"
      "h = 1e-2\n"
      "refine = true\n"
      "dims = 1, 2\n"
      "win_lo = -2\n";
  Config cfg = Config::parse_text(text, "inline.ini");
  CHECK(cfg.str("experiment", "name") == "evolve");
  CHECK(cfg.u64_or("experiment", "seed", 0) == 42);
  CHECK(cfg.number("params", "h") == doctest::Approx(0.01));
  CHECK(cfg.flag_or("params", "refine", false));
  CHECK(cfg.integers_or("params", "dims", {}) == std::vector<int>{1, 2});
  CHECK(cfg.number_or("params", "missing", 7.0) == 7.0);
  Vec lo = cfg.vec_or("params", "win_lo", 2, Vec(2, 0.0));
  CHECK(lo[0] == -2.0);
  CHECK(lo[1] == -2.0);  // scalars broadcast
}

TEST_CASE("trailing text on a value line stays part of the value") {
  // Values run to the end of the line; only whole-line comments are dropped.
  Config cfg = Config::parse_text("[a]\nk = 1 2 3\n", "x.ini");
  CHECK(cfg.numbers("a", "k") == std::vector<double>{1, 2, 3});
}

TEST_CASE("repeated keys overwrite in place") {
  Config cfg = Config::parse_text("[a]\nk = 1\nj = 2\nk = 3\n", "x.ini");
  CHECK(cfg.number("a", "k") == 3.0);
  REQUIRE(cfg.find("a") != nullptr);
  CHECK(cfg.find("a")->entries.size() == 2);
  CHECK(cfg.find("a")->entries[0].key == "k");  // keeps first position
}

TEST_CASE("overrides win and report line zero") {
  Config cfg = Config::parse_text("[params]\nt = 1\n", "x.ini");
  cfg.apply_override("params.t=2.5");
  cfg.apply_override("system.name=free");
  CHECK(cfg.number("params", "t") == 2.5);
  CHECK(cfg.str("system", "name") == "free");
  CHECK(cfg.find("params")->entries[0].line == 0);
}

TEST_CASE("diagnostics carry origin and line") {
  Config cfg = Config::parse_text("[params]\nt = fast\n", "bad.ini");
  try {
    cfg.number("params", "t");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == Err::Config);
    CHECK(std::string(e.what()).find("bad.ini:2") != std::string::npos);
    CHECK(std::string(e.what()).find("fast") != std::string::npos);
  }
}

TEST_CASE("structural errors are rejected") {
  CHECK_THROWS_AS(Config::parse_text("key = 1\n", "x.ini"), Error);
  CHECK_THROWS_AS(Config::parse_text("[a]\nnot a pair\n", "x.ini"), Error);
  Config cfg = Config::parse_text("[a]\nk = 1\n", "x.ini");
  CHECK_THROWS_AS(cfg.str("a", "missing"), Error);
  CHECK_THROWS_AS(cfg.apply_override("no-dot=1"), Error);
}

TEST_CASE("file round trip") {
  std::string path = "/tmp/sconclab_config_test.ini";
  {
    std::ofstream out(path);
    out << "[experiment]\nname = strata\n[params]\nh = 0.25\n";
  }
  Config cfg = Config::parse_file(path);
  CHECK(cfg.str("experiment", "name") == "strata");
  CHECK(cfg.number("params", "h") == 0.25);
  CHECK(cfg.origin() == path);
  std::remove(path.c_str());
  CHECK_THROWS_AS(Config::parse_file("/tmp/definitely_missing_sconclab.ini"), Error);
}

}  // TEST_SUITE
