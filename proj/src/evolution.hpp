#pragma once

#include <optional>

#include "flow.hpp"
#include "semiconcave.hpp"

namespace sconclab {

// Discrete minimizing path between fixed endpoints.
struct CurvePath {
  std::vector<double> times;
  std::vector<Vec> knots;
  std::vector<Vec> costates;  // L_v along the path
  double action = 0;
};

enum class ActionMethod { Direct, Shooting };

struct ActionOptions {
  ActionMethod method = ActionMethod::Direct;
  int knots = 64;        // direct: interior discretization
  int steps = 0;         // shooting: integrator steps (0 = auto)
  int max_iter = 500;    // direct: optimizer iterations
  double grad_tol = 1e-10;
};

// Minimal action h(t1, t2, x, y) over curves from x at t1 to y at t2,
// together with the discrete minimizer.
CurvePath fundamental_solution(const TonelliSystem& sys, double t1, double t2, const Vec& x,
                               const Vec& y, const ActionOptions& opt = {});

// Localization radius for evolution maximizers: a Lipschitz datum with
// constant ell only sees endpoints with |y - x| <= lambda * (t2 - t1).
struct LocalizationBound {
  double ell = 0;
  double lambda = 0;
  double t1 = 0, t2 = 0;
};

LocalizationBound maximizer_radius(const TonelliSystem& sys, double ell, double t1, double t2);

// Lipschitz constant of the datum, estimated as the largest piece gradient
// norm over a sample lattice of the domain.
double datum_lipschitz(const MarginalFunction& phi);

struct EvolveOptions {
  double radius = 0;     // search window half width (0 = derive from localization)
  double spacing = 0.01; // candidate grid spacing in y
  bool refine = true;    // golden refinement inside the winning cell
  double lipschitz = -1; // datum Lipschitz constant (-1 = estimate from pieces)
  int shoot_steps = 0;   // integrator steps per action evaluation (0 = auto)
  // non-uniqueness probe: report distinct basins at least basin_sep grid
  // cells apart whose values agree to basin_value_tol (relative)
  bool detect_basins = false;
  double basin_sep_cells = 10;
  double basin_value_tol = 1e-7;
};

struct EvolveValue {
  double value = 0;
  Vec argopt;
  bool unique = true;  // false when a second basin was detected
};

// Negative operator (inf-convolution): (T phi)(x) = inf_y phi(y) + h(t1,t2,y,x).
EvolveValue lax_oleinik_negative(const TonelliSystem& sys, const MarginalFunction& phi, double t1,
                                 double t2, const Vec& x, const EvolveOptions& opt = {});
// Positive operator (sup-convolution): (T' phi)(x) = sup_y phi(y) - h(t1,t2,x,y).
EvolveValue lax_oleinik_positive(const TonelliSystem& sys, const MarginalFunction& phi, double t1,
                                 double t2, const Vec& x, const EvolveOptions& opt = {});

struct EvolvedGrid {
  GridFn fn;
  std::vector<Vec> maximizers;
  bool any_nonunique = false;
};

// Whole-grid application of either operator. Free kinetic systems take an
// exact separable envelope transform over the inflated lattice; other
// systems fall back to per-node search with warm-started shooting.
EvolvedGrid evolve_grid(const TonelliSystem& sys, const MarginalFunction& phi, double t1,
                        double t2, const GridSpec& out, bool positive,
                        const EvolveOptions& opt = {});

// Smooth quadratics that touch phi from above at anchor points. Each member
// is anchored at x with a slope from D+phi(x) and curvature hessian_bound.
struct TouchingMember {
  Vec anchor;
  Vec slope;
  Piece piece;
};

std::vector<TouchingMember> touching_family(const MarginalFunction& phi, const Vec& x,
                                            double tie_tol = 0.0);
TouchingMember touching_member(const MarginalFunction& phi, const Vec& anchor, const Vec& slope);

// Deviation between the evolved function and the lower envelope of evolved
// touching members anchored at each node's maximizer.
struct InfReprReport {
  double max_deviation = 0;
  double max_envelope_gap = 0;  // positive part of T phi - min_f T f (one-sided)
  std::size_t nodes = 0;
};

InfReprReport verify_inf_representation(const TonelliSystem& sys, const MarginalFunction& phi,
                                        double t1, double t2, const GridSpec& window,
                                        const EvolveOptions& opt = {});

// Centered second differences over a grid sample, axis and diagonal probes.
struct C11Certificate {
  double upper = 0;  // largest second difference
  double lower = 0;  // smallest second difference
  double cap = 0;
  bool pass = false;
};

C11Certificate c11_certificate(const GridFn& fn, double cap);

struct CriticalTimeOptions {
  double t_cap = 1.0;
  int probes = 8;
  double bisect_tol = 0.05;
  double c11_cap = 50.0;
  EvolveOptions evolve;
};

struct CriticalTimeEstimate {
  double lower = 0;
  double upper = 0;
  double cap = 0;
  std::vector<double> probed;  // t values actually evaluated
};

// Largest time window on which the evolved function stays C^{1,1}, bracketed
// by certificate failures on the probe grid.
CriticalTimeEstimate estimate_critical_time(const TonelliSystem& sys, const MarginalFunction& phi,
                                            const GridSpec& window,
                                            const CriticalTimeOptions& opt = {});

}  // namespace sconclab
