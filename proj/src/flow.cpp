#include "flow.hpp"

#include <algorithm>
#include <cmath>

namespace sconclab {

namespace {

int default_steps(double t1, double t2, int requested) {
  if (requested > 0) return requested;
  double span = std::fabs(t2 - t1);
  int n = static_cast<int>(std::ceil(span / 1e-3 - 1e-9));
  return std::max(1, n);
}

// One kick-drift-kick stage. Valid for separable H(x, p) = T(p) + V(x);
// remains a symplectic map for negative h.
void verlet_stage(const TonelliSystem& sys, double t, double h, Vec& x, Vec& p) {
  HamJet j = sys.hamiltonian(t, x, p);
  p = p - (0.5 * h) * j.Hx;
  HamJet jm = sys.hamiltonian(t, x, p);
  x = x + h * jm.Hp;
  HamJet je = sys.hamiltonian(t, x, p);
  p = p - (0.5 * h) * je.Hx;
}

void yoshida_stage(const TonelliSystem& sys, double t, double h, Vec& x, Vec& p) {
  static const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
  static const double w0 = 1.0 - 2.0 * w1;
  verlet_stage(sys, t, w1 * h, x, p);
  verlet_stage(sys, t, w0 * h, x, p);
  verlet_stage(sys, t, w1 * h, x, p);
}

void rk4_stage(const TonelliSystem& sys, double t, double h, Vec& x, Vec& p) {
  auto f = [&](double s, const Vec& xx, const Vec& pp, Vec& dx, Vec& dp) {
    HamJet j = sys.hamiltonian(s, xx, pp);
    dx = j.Hp;
    dp = -j.Hx;
  };
  Vec k1x, k1p, k2x, k2p, k3x, k3p, k4x, k4p;
  f(t, x, p, k1x, k1p);
  f(t + 0.5 * h, x + (0.5 * h) * k1x, p + (0.5 * h) * k1p, k2x, k2p);
  f(t + 0.5 * h, x + (0.5 * h) * k2x, p + (0.5 * h) * k2p, k3x, k3p);
  f(t + h, x + h * k3x, p + h * k3p, k4x, k4p);
  x = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  p = p + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
}

}  // namespace

FlowResult hamiltonian_flow(const TonelliSystem& sys, double t1, double t2, const Vec& x,
                            const Vec& p, const FlowOptions& opt) {
  if (x.d != sys.dim() || p.d != sys.dim())
    fail(Err::InvalidArgument, "hamiltonian_flow: state dimension mismatch");
  FlowScheme scheme = opt.scheme;
  if (scheme == FlowScheme::Auto)
    scheme = (sys.separable() && sys.autonomous()) ? FlowScheme::Yoshida4 : FlowScheme::RK4;
  if ((scheme == FlowScheme::Verlet || scheme == FlowScheme::Yoshida4) &&
      !(sys.separable() && sys.autonomous()))
    fail(Err::InvalidArgument,
         "splitting schemes need a separable autonomous system; use rk4 for %s",
         sys.name().c_str());

  const int steps = default_steps(t1, t2, opt.steps);
  const double h = (t2 - t1) / steps;
  FlowResult out;
  out.steps = steps;
  out.scheme_used = scheme;
  Vec cx = x, cp = p;
  if (opt.record_trajectory) {
    out.trajectory.reserve(static_cast<std::size_t>(steps) + 1);
    out.trajectory.push_back({t1, sys.domain().wrap(cx), cp});
  }
  for (int i = 0; i < steps; ++i) {
    double t = t1 + i * h;
    switch (scheme) {
      case FlowScheme::Verlet: verlet_stage(sys, t, h, cx, cp); break;
      case FlowScheme::Yoshida4: yoshida_stage(sys, t, h, cx, cp); break;
      default: rk4_stage(sys, t, h, cx, cp); break;
    }
    if (opt.record_trajectory)
      out.trajectory.push_back({t1 + (i + 1) * h, sys.domain().wrap(cx), cp});
  }
  out.end = {t2, sys.domain().wrap(cx), cp};
  return out;
}

namespace {

// Augmented state for the linearized flow: (x, p, X_p, P_p).
struct VarState {
  Vec x, p;
  Mat xp, pp;
};

VarState var_derivative(const TonelliSystem& sys, double t, const VarState& s) {
  HamJet j = sys.hamiltonian(t, s.x, s.p);
  VarState d;
  d.x = j.Hp;
  d.p = -1.0 * j.Hx;
  Mat h_px = transpose(j.Hxp);  // d2H / dp dx
  d.xp = h_px * s.xp + j.Hpp * s.pp;
  d.pp = -1.0 * (j.Hxx * s.xp) - j.Hxp * s.pp;
  return d;
}

VarState var_axpy(const VarState& a, double c, const VarState& b) {
  VarState r;
  r.x = a.x + c * b.x;
  r.p = a.p + c * b.p;
  r.xp = a.xp + c * b.xp;
  r.pp = a.pp + c * b.pp;
  return r;
}

VariationalState integrate_variational(const TonelliSystem& sys, double from, double to,
                                       const Vec& x, const Vec& p, int steps) {
  const int n = default_steps(from, to, steps);
  const double h = (to - from) / n;
  VarState s;
  s.x = x;
  s.p = p;
  s.xp = Mat::zero(x.d);
  s.pp = Mat::identity(x.d);
  for (int i = 0; i < n; ++i) {
    double t = from + i * h;
    VarState k1 = var_derivative(sys, t, s);
    VarState k2 = var_derivative(sys, t + 0.5 * h, var_axpy(s, 0.5 * h, k1));
    VarState k3 = var_derivative(sys, t + 0.5 * h, var_axpy(s, 0.5 * h, k2));
    VarState k4 = var_derivative(sys, t + h, var_axpy(s, h, k3));
    s.x = s.x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.p = s.p + (h / 6.0) * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
    s.xp = s.xp + (h / 6.0) * (k1.xp + 2.0 * k2.xp + 2.0 * k3.xp + k4.xp);
    s.pp = s.pp + (h / 6.0) * (k1.pp + 2.0 * k2.pp + 2.0 * k3.pp + k4.pp);
  }
  VariationalState out;
  out.end = {to, s.x, s.p};
  out.x_p = s.xp;
  out.p_p = s.pp;
  return out;
}

}  // namespace

VariationalState variational_flow(const TonelliSystem& sys, double t1, double t2, const Vec& x,
                                  const Vec& p, int steps) {
  if (!(t2 > t1)) fail(Err::InvalidArgument, "variational_flow needs t2 > t1");
  return integrate_variational(sys, t2, t1, x, p, steps);
}

VariationalState variational_flow_forward(const TonelliSystem& sys, double t1, double t2,
                                          const Vec& x, const Vec& p, int steps) {
  if (!(t2 > t1)) fail(Err::InvalidArgument, "variational_flow_forward needs t2 > t1");
  return integrate_variational(sys, t1, t2, x, p, steps);
}

DiffeoWindow diffeo_window(const TonelliSystem& sys, double radius, const DiffeoProbe& probe) {
  if (!(radius > 0)) fail(Err::InvalidArgument, "diffeo_window: radius must be positive");
  const Domain& dom = sys.domain();
  const int d = dom.dim;
  Rng rng(probe.seed);

  DiffeoWindow win;
  win.radius = radius;
  double min_eig = 1e300, max_eig = -1e300, max_hp = 0;
  const int curvature_samples = 512;
  for (int i = 0; i < curvature_samples; ++i) {
    Vec x(d), p(d);
    for (int a = 0; a < d; ++a) {
      x[a] = dom.kind == Domain::Kind::Box ? rng.uniform(dom.lower[a], dom.upper[a])
                                           : rng.uniform(0.0, dom.period[a]);
      p[a] = rng.uniform(-radius, radius);
    }
    if (norm(p) > radius) p = (radius * rng.uniform()) * normalized(p);
    double t = sys.autonomous() ? 0.0 : rng.uniform(0.0, probe.t_max);
    HamJet j = sys.hamiltonian(t, x, p);
    auto ev = sym_eigenvalues(j.Hpp);
    min_eig = std::min(min_eig, ev[0]);
    max_eig = std::max(max_eig, ev[static_cast<std::size_t>(d - 1)]);
    max_hp = std::max(max_hp, norm(j.Hp));
  }
  win.c_r = min_eig;
  win.m_r = max_hp;
  win.hessian_bounded = max_eig < 1e8 && min_eig > 0;
  if (!win.hessian_bounded) {
    win.t_r = 0;
    return win;
  }

  // grow the gap until the contraction bound on -X_p / dt degrades
  for (int k = 1; k <= probe.t_samples; ++k) {
    double dt = probe.t_max * k / probe.t_samples;
    bool ok = true;
    for (int s = 0; s < probe.space_samples && ok; ++s) {
      Vec x(d), p(d);
      for (int a = 0; a < d; ++a) {
        x[a] = dom.kind == Domain::Kind::Box ? rng.uniform(dom.lower[a], dom.upper[a])
                                             : rng.uniform(0.0, dom.period[a]);
        p[a] = rng.uniform(-radius, radius);
      }
      if (norm(p) > radius) p = (radius * rng.uniform()) * normalized(p);
      int steps = std::max(16, static_cast<int>(std::ceil(dt / 1e-3)));
      VariationalState vs = variational_flow(sys, 0.0, dt, x, p, steps);
      Mat scaled = (-1.0 / dt) * vs.x_p;
      if (min_eigenvalue_sym(scaled) <= 0.5 * win.c_r) ok = false;
    }
    if (!ok) break;
    win.t_r = dt;
  }
  return win;
}

Vec flow_map(const TonelliSystem& sys, double t1, double t2, const Vec& x, const Vec& p,
             int steps) {
  FlowOptions opt;
  opt.steps = steps;
  return hamiltonian_flow(sys, t2, t1, x, p, opt).end.x;
}

Vec flow_map_inverse(const TonelliSystem& sys, double t1, double t2, const Vec& x, const Vec& y,
                     int steps, const Vec* p_init) {
  const Domain& dom = sys.domain();
  double dt = t2 - t1;
  if (!(dt > 0)) fail(Err::InvalidArgument, "flow_map_inverse needs t2 > t1");
  Vec p = p_init ? *p_init : (-1.0 / dt) * dom.diff(x, y);
  double scale = 1.0 + norm(dom.diff(x, y));
  for (int it = 0; it < 20; ++it) {
    VariationalState vs = variational_flow(sys, t1, t2, x, p, steps);
    Vec r = dom.diff(y, vs.end.x);  // X(t1; p) - y, shortest representative
    if (norm(r) <= 1e-11 * scale) return p;
    Vec dp;
    try {
      dp = solve(vs.x_p, r);
    } catch (const Error&) {
      fail(Err::ShootingNotDiffeo,
           "flow linearization is singular at gap %g; target outside the diffeo window", dt);
    }
    p = p - dp;
  }
  fail(Err::ShootingNotDiffeo,
       "shooting did not converge in 20 Newton steps at gap %g; target outside the diffeo window",
       dt);
}

}  // namespace sconclab
