#include "doctest.h"

#include <cmath>
#include <numbers>

#include "tonelli.hpp"

using namespace sconclab;

namespace {
const double kTau = 2.0 * std::numbers::pi;
}

TEST_SUITE("tonelli") {

TEST_CASE("structural conditions hold for the built-in systems") {
  auto check = [](const SystemPtr& sys) {
    TonelliReport rep = verify_tonelli(*sys);
    CAPTURE(sys->name());
    CHECK(rep.pass);
    CHECK(rep.margin_convexity > 0);
    // The growth margin is exactly zero for quadratic kinetic energy and
    // shows up as rounding noise around it.
    CHECK(rep.margin_growth >= -1e-12);
    CHECK(rep.margin_time >= 0);
    CHECK(rep.legendre_residual < 1e-7);
  };
  check(make_free_system(Domain::cube(2, -8, 8)));
  check(make_mechanical_cos(Domain::torus_cube(1, kTau), -1.0, 1.0));
  check(make_mechanical_poly(Domain::cube(1, -8, 8), {0.0, 0.0, 0.5}));
  check(make_quartic_system(Domain::cube(1, -8, 8)));
  check(make_driven_cos(Domain::torus_cube(1, kTau), -1.0, 1.0, 0.3, 2.0));
}

TEST_CASE("free hamiltonian and lagrangian are dual") {
  auto sys = make_free_system(Domain::cube(2, -8, 8));
  Vec x = Vec::of({0.3, -0.7});
  Vec p = Vec::of({1.5, 0.5});
  CHECK(sys->hamiltonian(0, x, p).value == doctest::Approx(0.5 * norm2(p)));
  CHECK(sys->lagrangian(0, x, p).value == doctest::Approx(0.5 * norm2(p)));
  LegendreResult lr = legendre_transform(*sys, 0, x, p);
  CHECK(lr.value == doctest::Approx(0.5 * norm2(p)).epsilon(1e-10));
  CHECK(norm(lr.argmax - p) < 1e-8);
}

TEST_CASE("mechanical legendre transform recovers the hamiltonian") {
  auto sys = make_mechanical_cos(Domain::torus_cube(1, kTau), -1.0, 1.0);
  Vec x = Vec::of({0.9});
  Vec p = Vec::of({-1.2});
  LegendreResult lr = legendre_transform(*sys, 0, x, p);
  CHECK(std::abs(lr.value - sys->hamiltonian(0, x, p).value) < 1e-9);
}

TEST_CASE("quartic conjugate falls back without closed form") {
  auto sys = make_quartic_system(Domain::cube(1, -8, 8));
  Vec x = Vec::of({0.0});
  Vec p = Vec::of({2.0});
  // sup_v { p v - v^4 / 4 } = (3/4) p^{4/3}.
  LegendreResult lr = legendre_transform(*sys, 0, x, p);
  CHECK(lr.value == doctest::Approx(0.75 * std::pow(2.0, 4.0 / 3.0)).epsilon(1e-7));
}

TEST_CASE("theta conjugate of the free growth bound") {
  auto sys = make_free_system(Domain::cube(1, -8, 8));
  // theta(r) = r^2/2 gives theta*(s) = s^2/2.
  CHECK(theta_conjugate(*sys, 2.0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(theta_conjugate(*sys, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("free action has its closed form") {
  auto sys = make_free_system(Domain::cube(2, -8, 8));
  Vec x = Vec::of({0, 0});
  Vec y = Vec::of({1, 2});
  auto act = sys->exact_action(0.0, 0.5, x, y);
  REQUIRE(act.has_value());
  CHECK(*act == doctest::Approx(norm2(y - x) / (2 * 0.5)));
}

TEST_CASE("localization constant defaults to the time-control constant") {
  auto sys = make_mechanical_cos(Domain::torus_cube(1, kTau), -1.0, 1.0);
  TonelliConstants k = sys->constants();
  CHECK(k.c1_loc == k.C1);
  CHECK(k.c0 >= 0);
}

}  // TEST_SUITE
