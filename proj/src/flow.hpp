#pragma once

#include <vector>

#include "tonelli.hpp"

namespace sconclab {

struct PhasePoint {
  double t = 0;
  Vec x, p;
};

enum class FlowScheme {
  Auto,      // composition stepper for separable autonomous systems, RK4 otherwise
  Verlet,    // second order symplectic, separable autonomous only
  Yoshida4,  // fourth order composition of Verlet stages
  RK4,
};

struct FlowOptions {
  FlowScheme scheme = FlowScheme::Auto;
  // steps <= 0 selects ceil(|t2 - t1| / 1e-3)
  int steps = 0;
  bool record_trajectory = false;
};

struct FlowResult {
  PhasePoint end;
  std::vector<PhasePoint> trajectory;  // filled only when recorded
  int steps = 0;
  FlowScheme scheme_used = FlowScheme::RK4;
};

// Integrates the characteristic system x' = H_p, p' = -H_x from t1 to t2.
// t2 < t1 integrates backwards; symplectic schemes remain valid under time
// reversal. Positions are torus-wrapped on periodic domains.
FlowResult hamiltonian_flow(const TonelliSystem& sys, double t1, double t2, const Vec& x,
                            const Vec& p, const FlowOptions& opt = {});

// State of the flow linearized in the terminal momentum: the pair
// (X_p, P_p) solving the variational equations along the characteristic with
// X_p = 0, P_p = I at the terminal time t2.
struct VariationalState {
  PhasePoint end;
  Mat x_p, p_p;
};

// Integrates the variational equations backward from terminal data (x, p) at
// t2 down to t1. RK4 on the augmented system.
VariationalState variational_flow(const TonelliSystem& sys, double t1, double t2, const Vec& x,
                                  const Vec& p, int steps = 0);

// Forward analogue: d(X, P)(t2) / d p(t1), with X_p = 0, P_p = I at t1.
VariationalState variational_flow_forward(const TonelliSystem& sys, double t1, double t2,
                                          const Vec& x, const Vec& p, int steps = 0);

// Quantified window on which p -> X(t1; t2, x, p) is a diffeomorphism onto
// its image:
//   c_R   lower bound on the H_pp spectrum over the momentum ball B(0, R)
//   m_R   max |H_p| over the ball (image radius m_R dt)
//   t_R   largest probed dt with min eig(-X_p / dt) > c_R / 2 at probe pairs
struct DiffeoWindow {
  double radius = 0;
  double c_r = 0;
  double m_r = 0;
  double t_r = 0;
  bool hessian_bounded = true;
};

struct DiffeoProbe {
  double t_max = 1.0;   // largest gap to probe
  int t_samples = 10;   // dyadic refinement of [0, t_max]
  int space_samples = 24;
  std::uint64_t seed = 2024;
};

DiffeoWindow diffeo_window(const TonelliSystem& sys, double radius, const DiffeoProbe& probe = {});

// The map p -> X(t1; t2, x, p) and its inverse by Newton iteration on the
// variational Jacobian. The inverse raises ShootingNotDiffeo when Newton
// stalls or the Jacobian degenerates.
Vec flow_map(const TonelliSystem& sys, double t1, double t2, const Vec& x, const Vec& p,
             int steps = 0);
Vec flow_map_inverse(const TonelliSystem& sys, double t1, double t2, const Vec& x, const Vec& y,
                     int steps = 0, const Vec* p_init = nullptr);

}  // namespace sconclab
