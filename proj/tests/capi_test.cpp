// Exercises the shared library through the public header only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "sconclab/sconclab.h"

TEST_SUITE("capi") {

TEST_CASE("version and status names") {
  CHECK(std::strcmp(sconc_version(), "1.0.0") == 0);
  CHECK(std::strcmp(sconc_status_name(SCONC_OK), "ok") == 0);
  CHECK(std::strcmp(sconc_status_name(SCONC_ERR_UNKNOWN_NAME), "unknown_name") == 0);
  CHECK(std::strcmp(sconc_status_name(SCONC_ERR_TOLERANCE), "tolerance_failure") == 0);
}

TEST_CASE("system handle lifecycle and hamiltonian") {
  sconc_system* sys = nullptr;
  REQUIRE(sconc_system_create("free", 2, nullptr, nullptr, 0, &sys) == SCONC_OK);
  REQUIRE(sys != nullptr);
  CHECK(sconc_system_dim(sys) == 2);
  double x[2] = {0.3, -0.1};
  double p[2] = {1.0, 2.0};
  double h = 0;
  CHECK(sconc_system_hamiltonian(sys, 0.0, x, p, &h) == SCONC_OK);
  CHECK(h == doctest::Approx(2.5));
  sconc_system_destroy(sys);
  sconc_system_destroy(nullptr);  // must be a no-op
}

TEST_CASE("system parameters pass through") {
  const char* keys[] = {"a"};
  const char* values[] = {"-2.0"};
  sconc_system* sys = nullptr;
  REQUIRE(sconc_system_create("mechanical", 1, keys, values, 1, &sys) == SCONC_OK);
  double x = 0.0, p = 0.0, h = 0;
  CHECK(sconc_system_hamiltonian(sys, 0.0, &x, &p, &h) == SCONC_OK);
  CHECK(h == doctest::Approx(-2.0));
  sconc_system_destroy(sys);
}

TEST_CASE("unknown names set the thread error message") {
  sconc_system* sys = nullptr;
  CHECK(sconc_system_create("springs", 1, nullptr, nullptr, 0, &sys) ==
        SCONC_ERR_UNKNOWN_NAME);
  CHECK(std::strlen(sconc_last_error()) > 0);
  CHECK(sys == nullptr);
}

TEST_CASE("function values and strata") {
  sconc_function* fn = nullptr;
  REQUIRE(sconc_function_create("neg-norm", 1, nullptr, nullptr, 0, &fn) == SCONC_OK);
  CHECK(sconc_function_dim(fn) == 1);
  double x = 0.5, v = 0;
  CHECK(sconc_function_value(fn, &x, &v) == SCONC_OK);
  CHECK(v == doctest::Approx(-0.5));
  int s = -1;
  x = 0.0;
  CHECK(sconc_function_stratum(fn, &x, 0.0, &s) == SCONC_OK);
  CHECK(s == 1);
  x = 0.5;
  CHECK(sconc_function_stratum(fn, &x, 0.0, &s) == SCONC_OK);
  CHECK(s == 0);
  sconc_function_destroy(fn);
}

TEST_CASE("evolution through the c surface matches the closed form") {
  sconc_system* sys = nullptr;
  sconc_function* fn = nullptr;
  REQUIRE(sconc_system_create("free", 1, nullptr, nullptr, 0, &sys) == SCONC_OK);
  REQUIRE(sconc_function_create("neg-norm", 1, nullptr, nullptr, 0, &fn) == SCONC_OK);
  double x = 0.5, value = 0, arg = 0;
  REQUIRE(sconc_evolve_value(sys, fn, 0.0, 1.0, &x, 1, 0.0, &value, &arg) == SCONC_OK);
  CHECK(value == doctest::Approx(-0.125).epsilon(1e-6));
  CHECK(std::abs(arg) < 1e-6);  // maximizer of the sup-convolution at 0.5 is the origin
  sconc_function_destroy(fn);
  sconc_system_destroy(sys);
}

TEST_CASE("config runs return reports and verdicts") {
  const char* path = "/tmp/sconclab_capi_run.ini";
  {
    std::ofstream out(path);
    out << "[experiment]\nname = evolve\nseed = 3\n"
        << "[system]\nname = free\n"
        << "[phi]\nname = neg-norm\ndim = 1\n"
        << "[params]\nt = 0.5\nh = 0.05\nwin_lo = -1\nwin_hi = 1\n"
        << "[expect]\nmax.oracle_err = 1e-6\n";
  }
  char* report = nullptr;
  int pass = 0;
  REQUIRE(sconc_run_config(path, nullptr, 0, nullptr, -1, &report, &pass) == SCONC_OK);
  REQUIRE(report != nullptr);
  CHECK(pass == 1);
  std::string text(report);
  CHECK(text.find("\"experiment\": \"evolve\"") != std::string::npos);
  CHECK(text.find("\"pass\": true") != std::string::npos);
  sconc_string_free(report);

  // Overrides win over the file; an unreachable bound turns into a
  // tolerance failure with the report still available.
  const char* overrides[] = {"expect.min.oracle_err=1"};
  char* report2 = nullptr;
  int pass2 = 1;
  CHECK(sconc_run_config(path, overrides, 1, nullptr, -1, &report2, &pass2) ==
        SCONC_ERR_TOLERANCE);
  REQUIRE(report2 != nullptr);
  CHECK(pass2 == 0);
  CHECK(std::string(report2).find("\"pass\": false") != std::string::npos);
  sconc_string_free(report2);
  std::remove(path);
}

TEST_CASE("missing experiment name is a config error") {
  const char* overrides[] = {"system.name=free"};
  char* report = nullptr;
  CHECK(sconc_run_config(nullptr, overrides, 1, nullptr, -1, &report, nullptr) ==
        SCONC_ERR_CONFIG);
  CHECK(report == nullptr);
}

TEST_CASE("listings cover the registries") {
  char* text = nullptr;
  REQUIRE(sconc_list("functions", &text) == SCONC_OK);
  CHECK(std::string(text).find("neg-norm") != std::string::npos);
  sconc_string_free(text);
  CHECK(sconc_list("operators", &text) == SCONC_ERR_UNKNOWN_NAME);
}

}  // TEST_SUITE
