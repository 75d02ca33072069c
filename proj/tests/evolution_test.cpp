#include "doctest.h"

#include <cmath>
#include <numbers>

#include "evolution.hpp"
#include "util.hpp"

using namespace sconclab;

namespace {
const double kTau = 2.0 * std::numbers::pi;

SystemPtr free1() { return make_free_system(Domain::cube(1, -8, 8)); }
SystemPtr pendulum() { return make_mechanical_cos(Domain::torus_cube(1, kTau), -1.0, 1.0); }

// Sup-convolution of -|x| under the free flow, in closed form.
double evolved_neg_norm(double x, double t) {
  return std::abs(x) <= t ? -x * x / (2 * t) : -std::abs(x) + t / 2;
}
}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("free fundamental solution matches the parabola of the gap") {
  auto sys = free1();
  Vec x = Vec::of({-0.4});
  Vec y = Vec::of({0.6});
  for (ActionMethod m : {ActionMethod::Direct, ActionMethod::Shooting}) {
    ActionOptions opt;
    opt.method = m;
    CurvePath path = fundamental_solution(*sys, 0.0, 0.5, x, y, opt);
    CHECK(std::abs(path.action - 1.0) < 1e-6);
    CHECK(path.knots.front()[0] == doctest::Approx(-0.4));
    CHECK(path.knots.back()[0] == doctest::Approx(0.6));
  }
}

TEST_CASE("pendulum action routes agree") {
  auto sys = pendulum();
  Vec x = Vec::of({1.0});
  Vec y = Vec::of({1.4});
  ActionOptions direct, shoot;
  direct.method = ActionMethod::Direct;
  shoot.method = ActionMethod::Shooting;
  double ad = fundamental_solution(*sys, 0.0, 0.25, x, y, direct).action;
  double as = fundamental_solution(*sys, 0.0, 0.25, x, y, shoot).action;
  CHECK(std::abs(ad - as) < 1e-5);
}

TEST_CASE("point operators match the closed form") {
  auto sys = free1();
  auto phi = make_neg_norm(1, 2);
  for (double x : {-1.5, -0.3, 0.0, 0.7, 1.9}) {
    EvolveValue ev = lax_oleinik_positive(*sys, *phi, 0.0, 1.0, Vec::of({x}));
    CHECK(std::abs(ev.value - evolved_neg_norm(x, 1.0)) < 1e-6);
  }
}

TEST_CASE("negative operator keeps the initial condition at vanishing time") {
  auto sys = free1();
  auto phi = make_min_parabolas(1);
  EvolveValue ev = lax_oleinik_negative(*sys, *phi, 0.0, 0.02, Vec::of({0.6}));
  // Short horizons only shave O(t) off the datum.
  CHECK(ev.value <= phi->value(Vec::of({0.6})) + 1e-9);
  CHECK(ev.value > phi->value(Vec::of({0.6})) - 0.1);
}

TEST_CASE("grid evolution matches the closed form everywhere") {
  auto sys = free1();
  auto phi = make_neg_norm(1, 2);
  GridSpec win = GridSpec::over(Vec::of({-2}), Vec::of({2}), 0.01);
  EvolvedGrid eg = evolve_grid(*sys, *phi, 0.0, 1.0, win, true);
  REQUIRE(eg.fn.values.size() == 401);
  double err = 0;
  for (std::size_t i = 0; i < win.size(); ++i)
    err = std::max(err, std::abs(eg.fn.values[i] - evolved_neg_norm(win.coord(i)[0], 1.0)));
  CHECK(err < 1e-10);
  CHECK(!eg.any_nonunique);
}

TEST_CASE("localization radius for unit lipschitz data under the free flow") {
  auto sys = free1();
  LocalizationBound lb = maximizer_radius(*sys, 1.0, 0.0, 0.5);
  CHECK(lb.lambda == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(datum_lipschitz(*make_neg_norm(1, 2)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("touching members cap the datum from above") {
  auto phi = make_min_parabolas(1);
  Vec anchor = Vec::of({0.0});
  auto members = touching_family(*phi, anchor);
  REQUIRE(members.size() >= 2);
  Rng rng(5);
  for (const auto& m : members) {
    CHECK(std::abs(m.piece.jet(anchor).value - phi->value(anchor)) < 1e-12);
    for (int i = 0; i < 50; ++i) {
      Vec y = Vec::of({rng.uniform(-1.5, 1.5)});
      CHECK(m.piece.jet(y).value >= phi->value(y) - 1e-9);
    }
  }
}

TEST_CASE("envelope of evolved touching members reproduces the evolution") {
  auto sys = free1();
  GridSpec win = GridSpec::over(Vec::of({-1}), Vec::of({1}), 0.05);
  for (const FunctionPtr& phi : {make_neg_norm(1, 2), make_min_parabolas(1)}) {
    InfReprReport rep = verify_inf_representation(*sys, *phi, 0.0, 0.2, win);
    CHECK(rep.max_deviation < 1e-10);
    CHECK(rep.max_envelope_gap < 1e-10);
    CHECK(rep.nodes == win.size());
  }
}

TEST_CASE("curvature certificate separates smooth from kinked grids") {
  GridSpec g = GridSpec::over(Vec::of({-1}), Vec::of({1}), 0.01);
  GridFn smooth{g, {}};
  GridFn kinked{g, {}};
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.coord(i)[0];
    smooth.values.push_back(x * x);
    kinked.values.push_back(std::abs(x));
  }
  CHECK(c11_certificate(smooth, 50.0).pass);
  CHECK(!c11_certificate(kinked, 50.0).pass);
}

TEST_CASE("critical time bracket for the parabola pair") {
  auto sys = free1();
  auto phi = make_min_parabolas(1);
  GridSpec win = GridSpec::over(Vec::of({-2}), Vec::of({2}), 0.01);
  CriticalTimeEstimate est = estimate_critical_time(*sys, *phi, win);
  CHECK(est.lower == doctest::Approx(0.46875).epsilon(1e-12));
  CHECK(est.upper == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(est.upper - est.lower <= 0.05 + 1e-12);
}

}  // TEST_SUITE
