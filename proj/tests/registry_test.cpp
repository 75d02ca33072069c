#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "config.hpp"
#include "registry.hpp"
#include "report.hpp"
#include "util.hpp"

using namespace sconclab;

namespace {
bool lists(const std::vector<std::string>& names, const char* want) {
  return std::find(names.begin(), names.end(), want) != names.end();
}
}  // namespace

TEST_SUITE("registry") {

TEST_CASE("required names are registered") {
  for (const char* s : {"free", "mechanical", "quartic"}) CHECK(lists(list_systems(), s));
  for (const char* f : {"phi1", "phi2", "neg-norm", "min-parabolas"})
    CHECK(lists(list_functions(), f));
  for (const char* e : {"verify-arnaud", "strata", "path", "evolve", "flow", "dim",
                        "critical-time", "inf-repr"})
    CHECK(lists(list_experiments(), e));
  CHECK(registry_help("systems").find("free") != std::string::npos);
  CHECK(registry_help("functions").find("neg-norm") != std::string::npos);
  CHECK_THROWS_AS(registry_help("operators"), Error);
}

TEST_CASE("system defaults and parameter wiring") {
  Config cfg;
  cfg.set("system", "name", "free");
  SystemPtr sys = system_from(cfg, 2);
  CHECK(sys->dim() == 2);
  CHECK(sys->domain().kind == Domain::Kind::Box);
  CHECK(sys->domain().lower[0] == -8.0);

  Config mc;
  mc.set("system", "name", "mechanical");
  mc.set("system", "a", "-2.5");
  SystemPtr mech = system_from(mc, 1);
  CHECK(mech->domain().kind == Domain::Kind::Torus);
  CHECK(mech->domain().period[0] == doctest::Approx(2 * std::numbers::pi));
  // V(x) = a cos(x) enters the hamiltonian directly.
  double h0 = mech->hamiltonian(0, Vec::of({0.0}), Vec::of({0.0})).value;
  CHECK(h0 == doctest::Approx(-2.5));
}

TEST_CASE("domain section overrides the default") {
  Config cfg;
  cfg.set("system", "name", "free");
  cfg.set("domain", "kind", "box");
  cfg.set("domain", "lo", "-3");
  cfg.set("domain", "hi", "3");
  SystemPtr sys = system_from(cfg, 2);
  CHECK(sys->domain().upper[1] == 3.0);

  Config fc;
  fc.set("phi", "name", "neg-norm");
  fc.set("domain", "kind", "box");
  fc.set("domain", "lo", "-2");
  fc.set("domain", "hi", "2");
  FunctionPtr phi = function_from(fc, 1);
  CHECK(phi->domain().upper[0] == 2.0);
}

TEST_CASE("dimension resolution order") {
  Config cfg;
  CHECK(dim_from(cfg) == 1);
  cfg.set("system", "dim", "3");
  CHECK(dim_from(cfg) == 3);
  cfg.set("phi", "dim", "2");
  CHECK(dim_from(cfg) == 2);
}

TEST_CASE("unknown names are rejected with the known list") {
  Config cfg;
  cfg.set("system", "name", "springs");
  try {
    system_from(cfg, 1);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Err::UnknownName);
    CHECK(std::string(e.what()).find("mechanical") != std::string::npos);
  }
  Config fc;
  fc.set("phi", "name", "bumps");
  CHECK_THROWS_AS(function_from(fc, 1), Error);
  Config ec;
  CHECK_THROWS_AS(run_experiment("warp", ec, "", 1), Error);
}

TEST_CASE("experiments run from a config and evaluate expectations") {
  Config cfg;
  cfg.set("system", "name", "free");
  cfg.set("phi", "name", "neg-norm");
  cfg.set("phi", "dim", "1");
  cfg.set("params", "t", "0.5");
  cfg.set("params", "h", "0.05");
  cfg.set("params", "win_lo", "-1");
  cfg.set("params", "win_hi", "1");
  cfg.set("expect", "max.oracle_err", "1e-6");
  Report r = run_experiment("evolve", cfg, "", 11);
  CHECK(r.pass());
  CHECK(r.has_metric("oracle_err"));
  CHECK(r.metric_value("nodes") == 41.0);
  ordered_json j = r.to_json(false);
  CHECK(j["params"].contains("phi"));
  CHECK(j["experiment"] == "evolve");

  // An unreachable bound flips the verdict but still reports.
  cfg.set("expect", "eq.nodes", "40");
  Report r2 = run_experiment("evolve", cfg, "", 11);
  CHECK(!r2.pass());
  CHECK(r2.metric_value("nodes") == 41.0);

  // Expectations on unknown metrics are config errors.
  cfg.set("expect", "eq.nodes", "41");
  cfg.set("expect", "max.mystery", "1");
  CHECK_THROWS_AS(run_experiment("evolve", cfg, "", 11), Error);
}

}  // TEST_SUITE
