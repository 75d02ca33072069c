#include "doctest.h"

#include <cmath>
#include <numbers>

#include "flow.hpp"

using namespace sconclab;

namespace {
const double kTau = 2.0 * std::numbers::pi;

SystemPtr pendulum() { return make_mechanical_cos(Domain::torus_cube(1, kTau), -1.0, 1.0); }
}  // namespace

TEST_SUITE("flow") {

TEST_CASE("free characteristics are straight lines") {
  auto sys = make_free_system(Domain::cube(2, -8, 8));
  Vec x = Vec::of({0.5, -0.25});
  Vec p = Vec::of({1.0, 2.0});
  FlowResult fr = hamiltonian_flow(*sys, 0.0, 0.75, x, p);
  CHECK(norm(fr.end.x - (x + 0.75 * p)) < 1e-12);
  CHECK(norm(fr.end.p - p) < 1e-12);
}

TEST_CASE("pendulum conserves energy along the orbit") {
  auto sys = pendulum();
  Vec x = Vec::of({1.0});
  Vec p = Vec::of({0.5});
  FlowOptions opt;
  opt.steps = 1000;
  opt.record_trajectory = true;
  FlowResult fr = hamiltonian_flow(*sys, 0.0, 1.0, x, p, opt);
  double h0 = sys->hamiltonian(0, x, p).value;
  double drift = 0;
  for (const auto& pt : fr.trajectory)
    drift = std::max(drift, std::abs(sys->hamiltonian(pt.t, pt.x, pt.p).value - h0));
  CHECK(drift < 1e-12);
  CHECK(fr.scheme_used == FlowScheme::Yoshida4);
}

TEST_CASE("schemes agree on a smooth orbit") {
  auto sys = pendulum();
  Vec x = Vec::of({1.0});
  Vec p = Vec::of({0.5});
  FlowOptions a, b;
  a.scheme = FlowScheme::Yoshida4;
  a.steps = 2000;
  b.scheme = FlowScheme::RK4;
  b.steps = 2000;
  PhasePoint pa = hamiltonian_flow(*sys, 0.0, 1.0, x, p, a).end;
  PhasePoint pb = hamiltonian_flow(*sys, 0.0, 1.0, x, p, b).end;
  CHECK(sys->domain().distance(pa.x, pb.x) < 1e-10);
  CHECK(norm(pa.p - pb.p) < 1e-10);
}

TEST_CASE("backward integration undoes forward integration") {
  auto sys = pendulum();
  Vec x = Vec::of({2.0});
  Vec p = Vec::of({-0.7});
  FlowOptions opt;
  opt.steps = 500;
  PhasePoint mid = hamiltonian_flow(*sys, 0.0, 0.8, x, p, opt).end;
  PhasePoint back = hamiltonian_flow(*sys, 0.8, 0.0, mid.x, mid.p, opt).end;
  CHECK(sys->domain().distance(back.x, x) < 1e-11);
  CHECK(norm(back.p - p) < 1e-11);
}

TEST_CASE("forward variational state matches finite differences") {
  auto sys = pendulum();
  Vec x = Vec::of({1.0});
  Vec p = Vec::of({0.5});
  VariationalState vs = variational_flow_forward(*sys, 0.0, 1.0, x, p, 1000);
  double eps = 1e-6;
  FlowOptions opt;
  opt.steps = 1000;
  PhasePoint hi = hamiltonian_flow(*sys, 0.0, 1.0, x, Vec::of({0.5 + eps}), opt).end;
  PhasePoint lo = hamiltonian_flow(*sys, 0.0, 1.0, x, Vec::of({0.5 - eps}), opt).end;
  double fd_x = sys->domain().diff(lo.x, hi.x)[0] / (2 * eps);
  double fd_p = (hi.p[0] - lo.p[0]) / (2 * eps);
  CHECK(std::abs(vs.x_p(0, 0) - fd_x) < 1e-6);
  CHECK(std::abs(vs.p_p(0, 0) - fd_p) < 1e-6);
}

TEST_CASE("free backward jacobian is minus the gap times identity") {
  auto sys = make_free_system(Domain::cube(2, -8, 8));
  VariationalState vs =
      variational_flow(*sys, 0.0, 0.5, Vec::of({1.0, 0.0}), Vec::of({0.5, -0.3}), 100);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(vs.x_p(i, j) + (i == j ? 0.5 : 0.0)) < 1e-12);
}

TEST_CASE("shooting map inverts") {
  auto sys = pendulum();
  Vec x = Vec::of({1.0});
  Vec p_true = Vec::of({0.8});
  // flow_map takes the terminal pair (x, p) at t2 down to t1.
  Vec y = flow_map(*sys, 0.0, 0.3, x, p_true);
  Vec p_rec = flow_map_inverse(*sys, 0.0, 0.3, x, y);
  CHECK(std::abs(p_rec[0] - p_true[0]) < 1e-9);
}

TEST_CASE("free diffeo window has unit spectral floor") {
  auto sys = make_free_system(Domain::cube(1, -8, 8));
  DiffeoWindow dw = diffeo_window(*sys, 2.0);
  CHECK(dw.c_r == doctest::Approx(1.0).epsilon(1e-9));
  // m_r comes from sampled Hessians, so it is only close to the exact bound.
  CHECK(dw.m_r == doctest::Approx(2.0).epsilon(0.005));
  CHECK(dw.t_r > 0.5);
}

TEST_CASE("auto step count follows the gap") {
  auto sys = pendulum();
  FlowResult fr = hamiltonian_flow(*sys, 0.0, 0.1, Vec::of({1.0}), Vec::of({0.0}));
  CHECK(fr.steps == 100);
}

}  // TEST_SUITE
