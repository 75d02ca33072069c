#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "domain.hpp"
#include "geom.hpp"

namespace sconclab {

// First and second jet of L at (t, x, v).
struct LagJet {
  double value = 0;
  double Lt = 0;
  Vec Lx, Lv;
  Mat Lvv;
};

// First and second jet of H at (t, x, p).
struct HamJet {
  double value = 0;
  Vec Hx, Hp;
  Mat Hxx, Hxp, Hpp;  // Hxp(i,j) = d2H / dx_i dp_j
};

// Structural constants of a Tonelli system:
//   convexity:      L_vv positive definite on the sampling window
//   growth:         L(t,x,v) >= theta(|v|) - c0 with theta superlinear
//   time control:   |L_t| <= C1 + C2 * L
// c1_loc enters the maximizer localization radius; by default it equals C1.
struct TonelliConstants {
  double c0 = 0;
  double C1 = 0;
  double C2 = 0;
  double c1_loc = 0;
};

class TonelliSystem {
 public:
  virtual ~TonelliSystem() = default;

  virtual const std::string& name() const = 0;
  virtual const Domain& domain() const = 0;
  virtual bool autonomous() const = 0;
  // Separable means H(t,x,p) = T(p) + V(x) up to sign, which admits the
  // splitting used by the symplectic steppers.
  virtual bool separable() const = 0;
  virtual TonelliConstants constants() const = 0;

  virtual LagJet lagrangian(double t, const Vec& x, const Vec& v) const = 0;
  virtual HamJet hamiltonian(double t, const Vec& x, const Vec& p) const = 0;

  // Superlinear minorant of L in |v|.
  virtual double theta(double r) const = 0;

  // Closed-form minimal action between endpoints where one exists.
  virtual std::optional<double> exact_action(double t1, double t2, const Vec& x,
                                             const Vec& y) const {
    (void)t1; (void)t2; (void)x; (void)y;
    return std::nullopt;
  }

  int dim() const { return domain().dim; }
};

using SystemPtr = std::shared_ptr<const TonelliSystem>;

// Built-in systems. `a`, `k` shape the potential; `coeffs` is a polynomial
// potential in x_1 (lowest degree first).
SystemPtr make_free_system(const Domain& dom);
SystemPtr make_mechanical_cos(const Domain& dom, double a, double k);
SystemPtr make_mechanical_poly(const Domain& dom, std::vector<double> coeffs);
SystemPtr make_quartic_system(const Domain& dom);
// Time-dependent mechanical system, V(t,x) = a (1 + eps sin(omega t)) sum_i cos(k x_i).
SystemPtr make_driven_cos(const Domain& dom, double a, double k, double eps, double omega);

struct LegendreOptions {
  double tol = 1e-10;
  int max_iter = 50;
  int grid_points = 2048;   // per-axis fallback resolution
  double radius = 8.0;      // initial search ball for the conjugate variable
  int max_growth = 6;       // radius doublings before MaximizerOnBoundary
};

struct LegendreResult {
  double value = 0;
  Vec argmax;
  int newton_iters = 0;
  bool used_fallback = false;
};

// Value of the convex conjugate sup_v { p.v - f(t,x,v) } where f is the
// system Lagrangian; with `of_hamiltonian` the roles of L and H swap and the
// result is the (double) conjugate sup_p { p.v - H(t,x,p) }.
LegendreResult legendre_transform(const TonelliSystem& sys, double t, const Vec& x, const Vec& p,
                                  const LegendreOptions& opt = {});
LegendreResult legendre_of_hamiltonian(const TonelliSystem& sys, double t, const Vec& x,
                                       const Vec& v, const LegendreOptions& opt = {});

// 1d convex conjugate theta*(s) = sup_{r>=0} { s r - theta(r) }.
double theta_conjugate(const TonelliSystem& sys, double s);

// Sampled verification of the structural conditions. Margins are the worst
// observed slack; negative margin means the condition failed at a sample.
struct VerifyWindow {
  double t_lo = 0.0, t_hi = 1.0;
  double v_radius = 3.0;
  int samples = 2000;
  std::uint64_t seed = 12345;
};

struct TonelliReport {
  double margin_convexity = 0;    // min sample eigenvalue of L_vv
  double margin_growth = 0;       // min of L - theta(|v|) + c0
  double margin_time = 0;         // min of C1 + C2 L - |L_t|
  double legendre_residual = 0;   // max |L - sup_p(p.v - H)|
  bool pass = false;
};

TonelliReport verify_tonelli(const TonelliSystem& sys, const VerifyWindow& win = {});

}  // namespace sconclab
