#include "doctest.h"

#include <cmath>

#include "semiconcave.hpp"

using namespace sconclab;

TEST_SUITE("semiconcave") {

TEST_CASE("staircase values and strata") {
  auto phi = make_staircase(1, 8);
  // Right of the first kink only the zero piece is active.
  CHECK(phi->value(Vec::of({1.0})) == 0.0);
  CHECK(phi->stratum_dimension(Vec::of({1.0})) == 0);
  // The kinks sit at x = -2^{1-n}.
  for (int n = 1; n <= 8; ++n) {
    double x = -std::pow(2.0, 1 - n);
    CHECK(phi->stratum_dimension(Vec::of({x})) == 1);
  }
  // Differentiable at the accumulation point.
  CHECK(phi->stratum_dimension(Vec::of({0.0})) == 0);
}

TEST_CASE("staircase edge piece makes the origin singular") {
  auto phi1 = make_staircase(2, 8);
  auto phi2 = make_staircase_edge(2, 8);
  CHECK(phi1->stratum_dimension(Vec::of({0.0, 0.3})) == 0);
  CHECK(phi2->stratum_dimension(Vec::of({0.0, 0.3})) == 1);
  // D+ at the edge is the segment [-1, 0] x {0}.
  Polytope sd = phi2->superdifferential(Vec::of({0.0, 0.3}));
  CHECK(sd.affine_dim == 1);
  bool saw_zero = false, saw_minus = false;
  for (const auto& v : sd.vertices) {
    if (std::abs(v[0]) < 1e-9) saw_zero = true;
    if (std::abs(v[0] + 1) < 1e-9) saw_minus = true;
    CHECK(std::abs(v[1]) < 1e-9);
  }
  CHECK(saw_zero);
  CHECK(saw_minus);
}

TEST_CASE("negative norm in one dimension") {
  auto phi = make_neg_norm(1, 2);
  CHECK(phi->value(Vec::of({0.5})) == doctest::Approx(-0.5));
  CHECK(phi->value(Vec::of({-2.0})) == doctest::Approx(-2.0));
  CHECK(phi->stratum_dimension(Vec::of({0.0})) == 1);
  CHECK(phi->stratum_dimension(Vec::of({0.25})) == 0);
  auto grads = phi->reachable_gradients(Vec::of({0.0}), 0.01);
  REQUIRE(grads.size() == 2);
  CHECK(std::abs(std::abs(grads[0][0]) - 1.0) < 1e-12);
}

TEST_CASE("negative norm cone vertex has full rank in two dimensions") {
  auto phi = make_neg_norm(2, 256);
  // Sphere sampling keeps the values within O(spacing^2) of -|x|.
  CHECK(phi->value(Vec::of({0.6, -0.8})) == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(phi->stratum_dimension(Vec::of({0, 0})) == 2);
  CHECK(phi->stratum_dimension(Vec::of({0.5, 0})) == 0);
}

TEST_CASE("min of two parabolas is singular on the midplane") {
  auto phi = make_min_parabolas(2);
  CHECK(phi->value(Vec::of({1, 0})) == 0.0);
  CHECK(phi->value(Vec::of({0, 0})) == 1.0);
  CHECK(phi->stratum_dimension(Vec::of({0, 0.7})) == 1);
  CHECK(phi->stratum_dimension(Vec::of({0.2, 0.7})) == 0);
  // Piece Hessians are 2I, so the family bound must cover them.
  CHECK(phi->hessian_bound() >= 2.0);
}

TEST_CASE("two cones meet on the bisector hypersurface") {
  auto phi = make_two_cones(2, Vec::of({-1, 0}), Vec::of({1, 0}), 0.0, 0.0, 256);
  // The farther apex drives the min, so each apex itself is regular and the
  // value there is minus the apex separation.
  CHECK(phi->value(Vec::of({-1, 0})) == doctest::Approx(-2.0).epsilon(1e-3));
  CHECK(phi->stratum_dimension(Vec::of({-1, 0})) == 0);
  CHECK(phi->stratum_dimension(Vec::of({0, 0.4})) == 1);
  CHECK(phi->stratum_dimension(Vec::of({0.3, 0.4})) == 0);
}

TEST_CASE("active set tolerance widens ties") {
  auto phi = make_min_parabolas(1);
  Vec x = Vec::of({0.001});
  CHECK(phi->active_set(x).size() == 1);
  CHECK(phi->active_set(x, 0.1).size() == 2);
}

TEST_CASE("custom quadratic family") {
  Mat a = Mat::identity(1);
  std::vector<QuadPieceSpec> specs = {{0.0, Vec::of({0.0}), a}, {0.25, Vec::of({-1.0}), a}};
  auto phi = make_custom(1, specs);
  // min(x^2/2, x^2/2 - x + 1/4) ties at x = 1/4.
  CHECK(phi->value(Vec::of({0.0})) == 0.0);
  CHECK(phi->value(Vec::of({1.0})) == doctest::Approx(-0.25));
  CHECK(phi->stratum_dimension(Vec::of({0.25})) == 1);
}

}  // TEST_SUITE
