#include "doctest.h"

#include <cmath>

#include "pseudograph.hpp"

using namespace sconclab;

namespace {
SystemPtr free1() { return make_free_system(Domain::cube(1, -8, 8)); }
}  // namespace

TEST_SUITE("pseudograph") {

TEST_CASE("pseudograph fills the fiber at a kink") {
  auto phi = make_neg_norm(1, 2);
  GridSpec win = GridSpec::over(Vec::of({-1}), Vec::of({1}), 0.01);
  PhaseCloud cloud = sample_pseudograph(*phi, win);
  REQUIRE(cloud.size() > win.size());
  double p_lo = 1e300, p_hi = -1e300;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (std::abs(cloud.x[i][0]) < 1e-9) {
      p_lo = std::min(p_lo, cloud.p[i][0]);
      p_hi = std::max(p_hi, cloud.p[i][0]);
    }
    // Every momentum stays inside the gradient range of the pieces.
    CHECK(std::abs(cloud.p[i][0]) <= 1.0 + 1e-9);
  }
  CHECK(p_lo == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(p_hi == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("graph gradient of a sampled parabola") {
  GridSpec g = GridSpec::over(Vec::of({-1}), Vec::of({1}), 0.01);
  GridFn fn{g, {}};
  for (std::size_t i = 0; i < g.size(); ++i) fn.values.push_back(0.5 * g.coord(i)[0] * g.coord(i)[0]);
  PhaseCloud cloud = graph_gradient(fn);
  REQUIRE(cloud.size() == g.size() - 2);
  for (std::size_t i = 0; i < cloud.size(); ++i)
    CHECK(std::abs(cloud.p[i][0] - cloud.x[i][0]) < 1e-10);
}

TEST_CASE("hausdorff distance tracks a cloud shift") {
  PhaseCloud a, b;
  a.dim = b.dim = 1;
  for (int i = 0; i <= 10; ++i) {
    a.push_back(Vec::of({0.1 * i}), Vec::of({0.0}));
    b.push_back(Vec::of({0.1 * i}), Vec::of({0.3}));
  }
  Domain dom = Domain::cube(1, -8, 8);
  HausdorffReport same = hausdorff_distance(a, a, dom);
  CHECK(same.sym == 0.0);
  HausdorffReport shifted = hausdorff_distance(a, b, dom);
  CHECK(shifted.sym == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(shifted.ab == shifted.ba);
}

TEST_CASE("free flow translates the base by t times the momentum") {
  PhaseCloud cloud;
  cloud.dim = 1;
  cloud.push_back(Vec::of({0.2}), Vec::of({-0.5}));
  cloud.push_back(Vec::of({-1.0}), Vec::of({1.5}));
  PhaseCloud out = flow_cloud(*free1(), 0.0, 0.4, cloud);
  REQUIRE(out.size() == 2);
  CHECK(out.x[0][0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(out.x[1][0] == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(out.p[0][0] == -0.5);
}

TEST_CASE("identity holds for the cone datum under the free flow") {
  auto phi = make_neg_norm(1, 2);
  GridSpec win = GridSpec::over(Vec::of({-2}), Vec::of({2}), 0.01);
  PseudographMatch m = verify_pseudograph_identity(*free1(), *phi, 0.0, 0.5, win);
  CHECK(m.pass);
  CHECK(m.symmetric_required);
  CHECK(m.hausdorff <= 0.02);
  CHECK(m.cloud_flowed > 0);
  CHECK(m.cloud_pseudo > 0);
}

TEST_CASE("fibers separate under the backward flow") {
  auto phi = make_neg_norm(1, 2);
  FiberSeparation fs = fiber_separation(*free1(), *phi, 0.0, 0.5, Vec::of({0.0}));
  CHECK(fs.samples > 0);
  // Free backward flow moves distinct momenta apart at exactly rate dt.
  CHECK(fs.min_ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("breakdown guard rejects horizons past the critical time") {
  auto phi = make_min_parabolas(1);
  GridSpec win = GridSpec::over(Vec::of({-2}), Vec::of({2}), 0.01);
  PseudographMatchOptions opt;
  opt.c11_cap = 50.0;
  try {
    verify_pseudograph_identity(*free1(), *phi, 0.0, 0.7, win, opt);
    FAIL("expected the breakdown guard to fire");
  } catch (const Error& e) {
    CHECK(e.code() == Err::CriticalTimeExceeded);
  }
}

}  // TEST_SUITE
