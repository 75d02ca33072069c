#include "doctest.h"

#include <cmath>
#include <numbers>

#include "domain.hpp"

using namespace sconclab;

TEST_SUITE("domain") {

TEST_CASE("box metric is euclidean") {
  Domain dom = Domain::cube(2, -1.0, 3.0);
  CHECK(dom.contains(Vec::of({0, 0})));
  CHECK(!dom.contains(Vec::of({4, 0})));
  Vec w = dom.wrap(Vec::of({2.5, -0.5}));
  CHECK(w[0] == 2.5);
  CHECK(dom.distance(Vec::of({0, 0}), Vec::of({3, 0})) == 3.0);
  Vec d = dom.diff(Vec::of({1, 1}), Vec::of({0, 2}));
  CHECK(d[0] == -1.0);
  CHECK(d[1] == 1.0);
}

TEST_CASE("torus wraps and takes the shortest lift") {
  double tau = 2.0 * std::numbers::pi;
  Domain dom = Domain::torus_cube(1, tau);
  Vec w = dom.wrap(Vec::of({tau + 0.25}));
  CHECK(w[0] == doctest::Approx(0.25));
  // Points near opposite ends of the period are close through the seam.
  double dist = dom.distance(Vec::of({0.1}), Vec::of({tau - 0.1}));
  CHECK(dist == doctest::Approx(0.2));
  Vec d = dom.diff(Vec::of({0.1}), Vec::of({tau - 0.1}));
  CHECK(d[0] == doctest::Approx(-0.2));
  CHECK(dom.extent()[0] == doctest::Approx(tau));
}

TEST_CASE("grid covers its window inclusively") {
  GridSpec g = GridSpec::over(Vec::of({-2}), Vec::of({2}), 0.01);
  CHECK(g.size() == 401);
  CHECK(g.coord(0)[0] == doctest::Approx(-2.0));
  CHECK(g.coord(400)[0] == doctest::Approx(2.0));

  GridSpec g2 = GridSpec::over(Vec::of({-1, 0}), Vec::of({1, 1}), 0.5);
  CHECK(g2.size() == 5 * 3);
  auto idx = g2.unflatten(7);
  CHECK(g2.flatten(idx) == 7);
  CHECK(g2.in_bounds(idx));
}

TEST_CASE("inflated grid aligns with its parent") {
  GridSpec g = GridSpec::over(Vec::of({-1}), Vec::of({1}), 0.1);
  GridSpec big = g.inflated(0.35);
  // Inflation rounds up to whole cells.
  CHECK(big.lo[0] <= -1.35);
  auto off = g.offset_in(big);
  Vec shared = big.coord(big.flatten(off));
  CHECK(shared[0] == doctest::Approx(g.lo[0]));
}

}  // TEST_SUITE
