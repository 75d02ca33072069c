#include "doctest.h"

#include <cmath>

#include "topology.hpp"
#include "util.hpp"

using namespace sconclab;

TEST_SUITE("topology") {

TEST_CASE("classification census for the parabola pair") {
  auto phi = make_min_parabolas(2);
  GridSpec win = GridSpec::over(Vec::of({-1, -1}), Vec::of({1, 1}), 0.2);
  StrataGrid sg = classify_grid(*phi, win);
  REQUIRE(sg.labels.size() == win.size());
  CHECK(sg.counts[0] == 110);
  CHECK(sg.counts[1] == 11);  // the seam column x1 = 0
  CHECK(sg.counts[2] == 0);
  // Flags appear only within one step of the seam. Whether a particular
  // crossing registers as singular at bisection precision is rounding
  // dependent, so the count is bounded, not pinned.
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < win.size(); ++i) {
    if (sg.near_interface[i] == 0) continue;
    ++flagged;
    CHECK(std::fabs(win.coord(i)[0]) <= 0.2 + 1e-12);
  }
  CHECK(flagged > 0);
  CHECK(flagged <= 33);
}

TEST_CASE("regular set of the staircase splits into slabs") {
  auto phi = make_staircase(2, 8);
  GridSpec win = GridSpec::over(Vec::of({-1.5, -1.5}), Vec::of({0.5, 0.5}), 0.01);
  StrataGrid sg = classify_grid(*phi, win);
  ConnectivityReport cr = connectivity_report(sg, 0);
  CHECK(cr.components == 6);
  CHECK(cr.nodes == 37788);
  CHECK(cr.sizes.front() >= cr.sizes.back());
}

TEST_CASE("cone complement of the vertex stays connected") {
  auto phi = make_neg_norm(2, 256);
  GridSpec win = GridSpec::over(Vec::of({-1, -1}), Vec::of({1, 1}), 0.01);
  StrataGrid sg = classify_grid(*phi, win);
  ConnectivityReport cr = connectivity_report(sg, 1);
  CHECK(cr.components == 1);
  CHECK(cr.nodes == 40398);
  CHECK(sg.counts[2] == 1);
}

TEST_CASE("box counting recovers flat dimensions") {
  std::vector<Vec> line, square;
  Rng rng(11);
  for (int i = 0; i < 4000; ++i) {
    line.push_back(Vec::of({rng.uniform(0.0, 1.0), 0.25}));
    square.push_back(Vec::of({rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)}));
  }
  DimensionEstimate dl = box_counting_dimension(line, 0.004);
  CHECK(std::abs(dl.dimension - 1.0) < 0.05);
  DimensionEstimate ds = box_counting_dimension(square, 0.02);
  CHECK(std::abs(ds.dimension - 2.0) < 0.2);
}

TEST_CASE("box counting needs enough scales") {
  std::vector<Vec> single = {Vec::of({0.5, 0.5})};
  try {
    box_counting_dimension(single, 0.01);
    FAIL("expected degenerate scales");
  } catch (const Error& e) {
    CHECK(e.code() == Err::DegenerateScales);
  }
}

TEST_CASE("singular samples lie on the seam") {
  auto phi = make_min_parabolas(2);
  GridSpec win = GridSpec::over(Vec::of({-1, -1}), Vec::of({1, 1}), 0.05);
  std::vector<Vec> pts = singular_samples(*phi, win);
  REQUIRE(!pts.empty());
  for (const auto& p : pts) CHECK(std::abs(p[0]) < 0.05);
}

TEST_CASE("broken lines avoid the cone vertex") {
  auto phi = make_neg_norm(2, 256);
  Vec a = Vec::of({-1, 0});
  Vec b = Vec::of({1, 0});
  PathOptions opt;
  for (int seed = 1; seed <= 20; ++seed) {
    opt.seed = static_cast<std::uint64_t>(seed);
    BrokenLine bl = broken_line_path(*phi, a, b, opt);
    CHECK(bl.tried <= opt.max_samples);
    // The waypoint stays on the perpendicular bisector.
    CHECK(std::abs(dot(bl.bend - 0.5 * (a + b), b - a)) <= 1e-12);
    // Re-check the whole path at ten times the sampling resolution.
    int fine = 10 * bl.samples_checked;
    for (int i = 0; i <= fine; ++i) {
      Vec x = bl.at(static_cast<double>(i) / fine);
      CHECK(phi->stratum_dimension(x) < 2);
    }
  }
}

TEST_CASE("singular endpoints are rejected") {
  auto phi = make_neg_norm(2, 256);
  try {
    broken_line_path(*phi, Vec::of({0, 0}), Vec::of({1, 0}), {});
    FAIL("expected endpoint rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Err::EndpointsSingular);
  }
}

TEST_CASE("a bend box swallowed by the high stratum reports no path") {
  auto phi = make_neg_norm(2, 256);
  PathOptions opt;
  opt.radius = 2e-6;
  opt.tol = 2e-6;
  try {
    broken_line_path(*phi, Vec::of({-1e-5, 0}), Vec::of({1e-5, 0}), opt);
    FAIL("expected path failure");
  } catch (const Error& e) {
    CHECK(e.code() == Err::NoPathFound);
  }
}

TEST_CASE("one dimension leaves no room for a transversal disk") {
  auto phi = make_neg_norm(1, 2);
  try {
    broken_line_path(*phi, Vec::of({-1.0}), Vec::of({1.0}), {});
    FAIL("expected dimension rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Err::InvalidArgument);
  }
}

TEST_CASE("estimated dimension respects the stratum codimension bound") {
  // Sing of the parabola pair is the line x1 = 0: dimension d - 1.
  auto phi = make_min_parabolas(2);
  GridSpec win = GridSpec::over(Vec::of({-1, -1}), Vec::of({1, 1}), 0.005);
  std::vector<Vec> pts = singular_samples(*phi, win);
  DimensionEstimate est = box_counting_dimension(pts, 0.01);
  CHECK(est.dimension <= 1.25);
  CHECK(est.dimension > 0.75);
}

}  // TEST_SUITE
