#include "evolution.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>

namespace sconclab {

namespace {

constexpr double kGolden = 0.6180339887498949;

double golden_max_1d(const std::function<double(double)>& f, double a, double b) {
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 120 && (b - a) > 1e-12 * (1.0 + std::fabs(a) + std::fabs(b)); ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + kGolden * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - kGolden * (b - a); f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// direct method: trapezoidal action over a knot chain, L-BFGS descent
// ---------------------------------------------------------------------------

struct DiscreteAction {
  const TonelliSystem& sys;
  double t1, dt;  // dt = segment length
  int n;          // segments
  Vec x0, x1;    // fixed endpoints (lifted coordinates)

  // packs interior knots only
  double eval(const std::vector<double>& z, std::vector<double>* grad) const {
    const int d = x0.d;
    auto knot = [&](int i) -> Vec {
      if (i == 0) return x0;
      if (i == n) return x1;
      Vec v(d);
      for (int a = 0; a < d; ++a) v[a] = z[static_cast<std::size_t>((i - 1) * d + a)];
      return v;
    };
    if (grad) std::fill(grad->begin(), grad->end(), 0.0);
    double action = 0;
    for (int i = 0; i < n; ++i) {
      Vec gi = knot(i), gj = knot(i + 1);
      Vec v = (1.0 / dt) * (gj - gi);
      double si = t1 + i * dt, sj = si + dt;
      LagJet li = sys.lagrangian(si, gi, v);
      LagJet lj = sys.lagrangian(sj, gj, v);
      action += 0.5 * dt * (li.value + lj.value);
      if (!grad) continue;
      // d/d gi: position part at si, velocity part through v = (gj - gi)/dt
      Vec dgi = (0.5 * dt) * li.Lx - 0.5 * (li.Lv + lj.Lv);
      Vec dgj = (0.5 * dt) * lj.Lx + 0.5 * (li.Lv + lj.Lv);
      if (i > 0)
        for (int a = 0; a < d; ++a) (*grad)[static_cast<std::size_t>((i - 1) * d + a)] += dgi[a];
      if (i + 1 < n)
        for (int a = 0; a < d; ++a) (*grad)[static_cast<std::size_t>(i * d + a)] += dgj[a];
    }
    return action;
  }
};

double inf_norm(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// Limited-memory BFGS with Armijo backtracking.
void lbfgs_minimize(const DiscreteAction& f, std::vector<double>& z, int max_iter, double tol) {
  const std::size_t dim = z.size();
  if (dim == 0) return;
  const int mem = 8;
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> g(dim), g_new(dim), q(dim), step(dim), z_new(dim);
  double val = f.eval(z, &g);
  for (int it = 0; it < max_iter; ++it) {
    if (inf_norm(g) <= tol * (1.0 + std::fabs(val))) return;
    // two-loop recursion
    q = g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      double a = 0;
      for (std::size_t i = 0; i < dim; ++i) a += s_hist[k][i] * q[i];
      a *= rho_hist[k];
      alpha[k] = a;
      for (std::size_t i = 0; i < dim; ++i) q[i] -= a * y_hist[k][i];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) {
      double sy = 0, yy = 0;
      for (std::size_t i = 0; i < dim; ++i) {
        sy += s_hist.back()[i] * y_hist.back()[i];
        yy += y_hist.back()[i] * y_hist.back()[i];
      }
      if (yy > 0) gamma = sy / yy;
    }
    for (std::size_t i = 0; i < dim; ++i) q[i] *= gamma;
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      double b = 0;
      for (std::size_t i = 0; i < dim; ++i) b += y_hist[k][i] * q[i];
      b *= rho_hist[k];
      for (std::size_t i = 0; i < dim; ++i) q[i] += s_hist[k][i] * (alpha[k] - b);
    }
    for (std::size_t i = 0; i < dim; ++i) step[i] = -q[i];

    double slope = 0;
    for (std::size_t i = 0; i < dim; ++i) slope += g[i] * step[i];
    if (slope >= 0) {  // reset to steepest descent
      for (std::size_t i = 0; i < dim; ++i) step[i] = -g[i];
      slope = 0;
      for (std::size_t i = 0; i < dim; ++i) slope += g[i] * step[i];
      s_hist.clear(); y_hist.clear(); rho_hist.clear();
    }
    double lam = 1.0;
    double val_new = val;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t i = 0; i < dim; ++i) z_new[i] = z[i] + lam * step[i];
      val_new = f.eval(z_new, &g_new);
      if (val_new <= val + 1e-4 * lam * slope) break;
      lam *= 0.5;
    }
    if (lam < 1e-12) return;  // no further progress representable
    std::vector<double> s_vec(dim), y_vec(dim);
    double sy = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      s_vec[i] = z_new[i] - z[i];
      y_vec[i] = g_new[i] - g[i];
      sy += s_vec[i] * y_vec[i];
    }
    z.swap(z_new);
    g.swap(g_new);
    val = val_new;
    if (sy > 1e-14) {
      s_hist.push_back(std::move(s_vec));
      y_hist.push_back(std::move(y_vec));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > mem) {
        s_hist.pop_front(); y_hist.pop_front(); rho_hist.pop_front();
      }
    }
  }
}

// ---------------------------------------------------------------------------
// shooting: terminal boundary value problem + action along the characteristic
// ---------------------------------------------------------------------------

struct Shot {
  Vec p_start;   // momentum at t1
  Vec p_end;     // momentum at t2 (the endpoint derivative of the action)
  Vec y_end;     // integrated endpoint
  double action = 0;
  std::vector<double> times;
  std::vector<Vec> knots;
  std::vector<Vec> costates;
};

int auto_steps(double t1, double t2, int requested) {
  if (requested > 0) return requested;
  return std::max(16, static_cast<int>(std::ceil(std::fabs(t2 - t1) / 1e-3 - 1e-9)));
}

// Newton solve for p(t1) with X(t2) = y, then re-integration accumulating the
// Legendre action integrand p . H_p - H.
Shot shoot_forward(const TonelliSystem& sys, double t1, double t2, const Vec& x, const Vec& y,
                   int steps, const Vec* warm, bool record) {
  double dt = t2 - t1;
  if (!(dt > 0)) fail(Err::InvalidArgument, "shooting needs t2 > t1");
  const int n = auto_steps(t1, t2, steps);
  Vec p = warm ? *warm : (1.0 / dt) * (y - x);
  double scale = 1.0 + norm(y - x);
  bool converged = false;
  for (int it = 0; it < 20; ++it) {
    VariationalState vs = variational_flow_forward(sys, t1, t2, x, p, n);
    Vec r = vs.end.x - y;
    if (norm(r) <= 1e-11 * scale) { converged = true; break; }
    Vec dp;
    try {
      dp = solve(vs.x_p, r);
    } catch (const Error&) {
      fail(Err::ShootingNotDiffeo,
           "shooting linearization singular over gap %g; outside the diffeo window", dt);
    }
    p = p - dp;
  }
  if (!converged) {
    // one cold restart guards against a bad warm start
    if (warm) return shoot_forward(sys, t1, t2, x, y, steps, nullptr, record);
    fail(Err::ShootingNotDiffeo, "shooting did not converge over gap %g", dt);
  }

  Shot shot;
  shot.p_start = p;
  double h = dt / n;
  Vec cx = x, cp = p;
  double action = 0;
  if (record) {
    shot.times.reserve(static_cast<std::size_t>(n) + 1);
    shot.knots.reserve(static_cast<std::size_t>(n) + 1);
    shot.costates.reserve(static_cast<std::size_t>(n) + 1);
  }
  auto rhs = [&](double s, const Vec& xx, const Vec& pp, Vec& dx, Vec& dp, double& da) {
    HamJet j = sys.hamiltonian(s, xx, pp);
    dx = j.Hp;
    dp = -1.0 * j.Hx;
    da = dot(pp, j.Hp) - j.value;
  };
  for (int i = 0; i <= n; ++i) {
    if (record) {
      shot.times.push_back(t1 + i * h);
      shot.knots.push_back(cx);
      shot.costates.push_back(cp);
    }
    if (i == n) break;
    double s = t1 + i * h;
    Vec k1x, k1p, k2x, k2p, k3x, k3p, k4x, k4p;
    double k1a, k2a, k3a, k4a;
    rhs(s, cx, cp, k1x, k1p, k1a);
    rhs(s + 0.5 * h, cx + (0.5 * h) * k1x, cp + (0.5 * h) * k1p, k2x, k2p, k2a);
    rhs(s + 0.5 * h, cx + (0.5 * h) * k2x, cp + (0.5 * h) * k2p, k3x, k3p, k3a);
    rhs(s + h, cx + h * k3x, cp + h * k3p, k4x, k4p, k4a);
    cx = cx + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    cp = cp + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    action += (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
  }
  shot.p_end = cp;
  shot.y_end = cx;
  shot.action = action;
  return shot;
}

}  // namespace

CurvePath fundamental_solution(const TonelliSystem& sys, double t1, double t2, const Vec& x,
                               const Vec& y, const ActionOptions& opt) {
  if (!(t2 > t1)) fail(Err::InvalidArgument, "fundamental_solution needs t2 > t1");
  const Domain& dom = sys.domain();
  dom.require_inside(x, "fundamental_solution");
  dom.require_inside(y, "fundamental_solution");
  Vec y_lift = x + dom.diff(x, y);  // minimal representative on a torus

  CurvePath path;
  if (opt.method == ActionMethod::Shooting) {
    Shot shot = shoot_forward(sys, t1, t2, x, y_lift, opt.steps, nullptr, true);
    path.times = std::move(shot.times);
    path.knots = std::move(shot.knots);
    path.costates = std::move(shot.costates);
    path.action = shot.action;
    return path;
  }

  const int n = std::max(2, opt.knots);
  const int d = x.d;
  DiscreteAction fa{sys, t1, (t2 - t1) / n, n, x, y_lift};
  std::vector<double> z(static_cast<std::size_t>((n - 1) * d));
  for (int i = 1; i < n; ++i) {
    double s = static_cast<double>(i) / n;
    for (int a = 0; a < d; ++a)
      z[static_cast<std::size_t>((i - 1) * d + a)] = x[a] + s * (y_lift[a] - x[a]);
  }
  lbfgs_minimize(fa, z, opt.max_iter, opt.grad_tol);
  std::vector<double> grad(z.size());
  path.action = fa.eval(z, &grad);
  if (!z.empty() && inf_norm(grad) > 1e-6 * (1.0 + std::fabs(path.action)))
    fail(Err::NoConvergence, "action descent stalled with gradient %g", inf_norm(grad));

  path.times.resize(static_cast<std::size_t>(n) + 1);
  path.knots.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    path.times[static_cast<std::size_t>(i)] = t1 + (t2 - t1) * i / n;
    if (i == 0) path.knots[0] = x;
    else if (i == n) path.knots[static_cast<std::size_t>(n)] = y_lift;
    else {
      Vec v(d);
      for (int a = 0; a < d; ++a) v[a] = z[static_cast<std::size_t>((i - 1) * d + a)];
      path.knots[static_cast<std::size_t>(i)] = v;
    }
  }
  // costates from centered velocity estimates
  path.costates.resize(path.knots.size());
  double hs = (t2 - t1) / n;
  for (int i = 0; i <= n; ++i) {
    Vec v(d);
    if (i == 0) v = (1.0 / hs) * (path.knots[1] - path.knots[0]);
    else if (i == n) v = (1.0 / hs) * (path.knots.back() - path.knots[path.knots.size() - 2]);
    else v = (0.5 / hs) * (path.knots[static_cast<std::size_t>(i) + 1] - path.knots[static_cast<std::size_t>(i) - 1]);
    path.costates[static_cast<std::size_t>(i)] =
        sys.lagrangian(path.times[static_cast<std::size_t>(i)], path.knots[static_cast<std::size_t>(i)], v).Lv;
  }
  return path;
}

LocalizationBound maximizer_radius(const TonelliSystem& sys, double ell, double t1, double t2) {
  if (!(t2 > t1)) fail(Err::InvalidArgument, "maximizer_radius needs t2 > t1");
  if (ell < 0) fail(Err::InvalidArgument, "maximizer_radius needs a nonnegative Lipschitz bound");
  TonelliConstants k = sys.constants();
  const Domain& dom = sys.domain();
  // rest Lagrangian sampled over the window and domain
  double max_l0 = 0;
  const int nt = sys.autonomous() ? 1 : 33;
  const int nx = dom.dim == 1 ? 1025 : (dom.dim == 2 ? 65 : 17);
  Vec lo = dom.kind == Domain::Kind::Box ? dom.lower : Vec(dom.dim, 0.0);
  Vec ext = dom.extent();
  std::array<int, 3> idx{0, 0, 0};
  std::array<int, 3> counts{1, 1, 1};
  for (int a = 0; a < dom.dim; ++a) counts[static_cast<std::size_t>(a)] = nx;
  for (int it = 0; it < nt; ++it) {
    double t = nt == 1 ? t1 : t1 + (t2 - t1) * it / (nt - 1);
    for (idx[0] = 0; idx[0] < counts[0]; ++idx[0])
      for (idx[1] = 0; idx[1] < counts[1]; ++idx[1])
        for (idx[2] = 0; idx[2] < counts[2]; ++idx[2]) {
          Vec x(dom.dim);
          for (int a = 0; a < dom.dim; ++a)
            x[a] = lo[a] + ext[a] * idx[static_cast<std::size_t>(a)] / (nx > 1 ? nx - 1 : 1);
          max_l0 = std::max(max_l0, std::fabs(sys.lagrangian(t, x, Vec(dom.dim, 0.0)).value));
        }
  }
  LocalizationBound b;
  b.ell = ell;
  b.t1 = t1;
  b.t2 = t2;
  b.lambda = k.c1_loc + theta_conjugate(sys, ell + 1.0) + max_l0 + k.c0;
  return b;
}

double datum_lipschitz(const MarginalFunction& phi) {
  const Domain& dom = phi.domain();
  const int d = dom.dim;
  const int nx = d == 1 ? 33 : (d == 2 ? 9 : 5);
  Vec lo = dom.kind == Domain::Kind::Box ? dom.lower : Vec(d, 0.0);
  Vec ext = dom.extent();
  double m = 0;
  std::array<int, 3> idx{0, 0, 0};
  std::array<int, 3> counts{1, 1, 1};
  for (int a = 0; a < d; ++a) counts[static_cast<std::size_t>(a)] = nx;
  for (idx[0] = 0; idx[0] < counts[0]; ++idx[0])
    for (idx[1] = 0; idx[1] < counts[1]; ++idx[1])
      for (idx[2] = 0; idx[2] < counts[2]; ++idx[2]) {
        Vec x(d);
        for (int a = 0; a < d; ++a)
          x[a] = lo[a] + ext[a] * idx[static_cast<std::size_t>(a)] / (nx - 1);
        for (const Piece& p : phi.pieces()) m = std::max(m, norm(p.jet(x).grad));
      }
  return m;
}

namespace {

double derive_radius(const TonelliSystem& sys, const MarginalFunction& phi, double t1, double t2,
                     const EvolveOptions& opt) {
  if (opt.radius > 0) return opt.radius;
  double ell = opt.lipschitz >= 0 ? opt.lipschitz : datum_lipschitz(phi);
  LocalizationBound b = maximizer_radius(sys, ell, t1, t2);
  return b.lambda * (t2 - t1) + 5.0 * opt.spacing;
}

// action h(t1,t2,x,y) together with the endpoint momentum D_y h.
struct ActionAt {
  double value = 0;
  Vec p_end;
  Vec p_start;
};

ActionAt action_between(const TonelliSystem& sys, double t1, double t2, const Vec& x, const Vec& y,
                        int steps, const Vec* warm) {
  ActionAt out;
  if (auto exact = sys.exact_action(t1, t2, x, y)) {
    out.value = *exact;
    Vec d = sys.domain().diff(x, y);
    out.p_end = (1.0 / (t2 - t1)) * d;  // free kinetic: straight characteristics
    out.p_start = out.p_end;
    return out;
  }
  Shot s = shoot_forward(sys, t1, t2, x, x + sys.domain().diff(x, y), steps, warm, false);
  out.value = s.action;
  out.p_end = s.p_end;
  out.p_start = s.p_start;
  return out;
}

struct ScanResult {
  double best = -1e300;
  Vec arg;
  bool unique = true;
};

// Grid scan + golden refinement of a 1d..3d objective over a box window.
// `positive` selects maximization; minimization is handled by negating.
ScanResult scan_window(const std::function<double(const Vec&, const Vec*, Vec*)>& obj, int d,
                       const Vec& lo, const Vec& hi, const EvolveOptions& opt) {
  std::array<int, 3> counts{1, 1, 1};
  for (int a = 0; a < d; ++a) {
    double len = hi[a] - lo[a];
    counts[static_cast<std::size_t>(a)] = std::max(2, static_cast<int>(std::floor(len / opt.spacing + 1e-9)) + 1);
  }
  std::vector<double> vals;
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(counts[static_cast<std::size_t>(a)]);
  vals.resize(total, -1e300);

  auto coord = [&](std::size_t flat) {
    Vec y(d);
    std::array<int, 3> idx{0, 0, 0};
    std::size_t f = flat;
    for (int a = d - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(f % static_cast<std::size_t>(counts[static_cast<std::size_t>(a)]));
      f /= static_cast<std::size_t>(counts[static_cast<std::size_t>(a)]);
    }
    for (int a = 0; a < d; ++a) {
      double len = hi[a] - lo[a];
      y[a] = lo[a] + len * idx[static_cast<std::size_t>(a)] / (counts[static_cast<std::size_t>(a)] - 1);
    }
    return y;
  };

  Vec warm;
  bool have_warm = false;
  ScanResult res;
  std::size_t best_flat = 0;
  for (std::size_t f = 0; f < total; ++f) {
    Vec y = coord(f);
    Vec p_out;
    double v = obj(y, have_warm ? &warm : nullptr, &p_out);
    vals[f] = v;
    if (p_out.d > 0) { warm = p_out; have_warm = true; }
    if (v > res.best) { res.best = v; res.arg = y; best_flat = f; }
  }

  if (opt.detect_basins && total > 2) {
    // local maxima separated from the winner by many cells with nearly the
    // same value signal a second basin
    double sep2 = opt.basin_sep_cells * opt.spacing;
    sep2 *= sep2;
    Vec bestc = coord(best_flat);
    for (std::size_t f = 0; f < total; ++f) {
      if (f == best_flat) continue;
      // neighbor comparison along each axis
      bool local_max = true;
      std::array<int, 3> idx{0, 0, 0};
      std::size_t ff = f;
      for (int a = d - 1; a >= 0; --a) {
        idx[static_cast<std::size_t>(a)] = static_cast<int>(ff % static_cast<std::size_t>(counts[static_cast<std::size_t>(a)]));
        ff /= static_cast<std::size_t>(counts[static_cast<std::size_t>(a)]);
      }
      for (int a = 0; a < d && local_max; ++a) {
        for (int s : {-1, 1}) {
          auto jdx = idx;
          jdx[static_cast<std::size_t>(a)] += s;
          if (jdx[static_cast<std::size_t>(a)] < 0 ||
              jdx[static_cast<std::size_t>(a)] >= counts[static_cast<std::size_t>(a)])
            continue;
          std::size_t jf = 0;
          for (int b = 0; b < d; ++b)
            jf = jf * static_cast<std::size_t>(counts[static_cast<std::size_t>(b)]) +
                 static_cast<std::size_t>(jdx[static_cast<std::size_t>(b)]);
          if (vals[jf] > vals[f]) { local_max = false; break; }
        }
      }
      if (!local_max) continue;
      if (res.best - vals[f] > opt.basin_value_tol * (1.0 + std::fabs(res.best))) continue;
      if (norm2(coord(f) - bestc) > sep2) { res.unique = false; break; }
    }
  }

  if (opt.refine) {
    Vec w = res.arg;
    int cycles = d == 1 ? 2 : 4;
    for (int cyc = 0; cyc < cycles; ++cyc)
      for (int a = 0; a < d; ++a) {
        double lo_a = std::max(lo[a], w[a] - opt.spacing);
        double hi_a = std::min(hi[a], w[a] + opt.spacing);
        double arg = golden_max_1d(
            [&](double s) {
              Vec u = w;
              u[a] = s;
              return obj(u, have_warm ? &warm : nullptr, nullptr);
            },
            lo_a, hi_a);
        w[a] = arg;
      }
    double wv = obj(w, have_warm ? &warm : nullptr, nullptr);
    if (wv > res.best) { res.best = wv; res.arg = w; }
  }
  return res;
}

// window [x - r, x + r] clamped into the datum's box domain
void clamp_window(const Domain& dom, const Vec& x, double r, Vec& lo, Vec& hi) {
  const int d = dom.dim;
  lo = Vec(d);
  hi = Vec(d);
  for (int a = 0; a < d; ++a) {
    if (dom.kind == Domain::Kind::Box) {
      lo[a] = std::max(dom.lower[a], x[a] - r);
      hi[a] = std::min(dom.upper[a], x[a] + r);
    } else {
      double half = std::min(r, 0.5 * dom.period[a]);
      lo[a] = x[a] - half;
      hi[a] = x[a] + half;
    }
    if (!(hi[a] > lo[a]))
      fail(Err::OutOfDomain, "evolution window collapsed on axis %d", a);
  }
}

EvolveValue lax_oleinik_point(const TonelliSystem& sys, const MarginalFunction& phi, double t1,
                              double t2, const Vec& x, bool positive, const EvolveOptions& opt) {
  if (!(t2 > t1)) fail(Err::InvalidArgument, "evolution operators need t2 > t1");
  phi.domain().require_inside(x, "lax_oleinik");
  double r = derive_radius(sys, phi, t1, t2, opt);
  Vec lo, hi;
  clamp_window(phi.domain(), x, r, lo, hi);

  auto obj = [&](const Vec& y, const Vec* warm, Vec* p_out) {
    Vec yy = phi.domain().kind == Domain::Kind::Torus ? phi.domain().wrap(y) : y;
    double fy = phi.value(yy);
    ActionAt a = positive ? action_between(sys, t1, t2, x, y, opt.shoot_steps, warm)
                          : action_between(sys, t1, t2, y, x, opt.shoot_steps, warm);
    if (p_out) *p_out = a.p_start;
    return positive ? fy - a.value : -(fy + a.value);
  };
  ScanResult s = scan_window(obj, x.d, lo, hi, opt);
  EvolveValue out;
  out.value = positive ? s.best : -s.best;
  out.argopt = s.arg;
  out.unique = s.unique;
  return out;
}

// ---------------------------------------------------------------------------
// separable envelope transform (exact grid sup/inf convolution for free
// kinetic systems)
// ---------------------------------------------------------------------------

// out[i] = min_j ( f[j] + c (i-j)^2 ), owners get the argmin j.
void envelope_1d(const std::vector<double>& f, double c, std::vector<double>& out,
                 std::vector<int>& owner) {
  const int n = static_cast<int>(f.size());
  out.assign(static_cast<std::size_t>(n), 0.0);
  owner.assign(static_cast<std::size_t>(n), 0);
  std::vector<int> v(static_cast<std::size_t>(n));
  std::vector<double> zz(static_cast<std::size_t>(n) + 1);
  int k = 0;
  v[0] = 0;
  zz[0] = -std::numeric_limits<double>::infinity();
  zz[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = 0;
    for (;;) {
      int vk = v[static_cast<std::size_t>(k)];
      s = ((f[static_cast<std::size_t>(q)] + c * q * q) - (f[static_cast<std::size_t>(vk)] + c * vk * vk)) /
          (2.0 * c * (q - vk));
      if (s <= zz[static_cast<std::size_t>(k)]) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    zz[static_cast<std::size_t>(k)] = s;
    zz[static_cast<std::size_t>(k) + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int i = 0; i < n; ++i) {
    while (zz[static_cast<std::size_t>(k) + 1] < i) ++k;
    int vk = v[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(vk)] + c * (i - vk) * (i - vk);
    owner[static_cast<std::size_t>(i)] = vk;
  }
}

// Applies the 1d envelope along `axis` of a full lattice.
void envelope_axis(const GridSpec& g, std::vector<double>& vals, std::vector<int>& owners,
                   double c, int axis) {
  const int n_axis = g.n[static_cast<std::size_t>(axis)];
  std::size_t stride = 1;
  for (int a = g.dim - 1; a > axis; --a) stride *= static_cast<std::size_t>(g.n[static_cast<std::size_t>(a)]);
  std::size_t lines = g.size() / static_cast<std::size_t>(n_axis);
  owners.assign(g.size(), 0);

  parallel_for(lines, [&](std::size_t line_lo, std::size_t line_hi) {
    std::vector<double> buf(static_cast<std::size_t>(n_axis));
    std::vector<double> env;
    std::vector<int> own;
    for (std::size_t line = line_lo; line < line_hi; ++line) {
      // base index of this line: split line index into (outer, inner)
      std::size_t outer = line / stride;
      std::size_t inner = line % stride;
      std::size_t base = outer * (static_cast<std::size_t>(n_axis) * stride) + inner;
      for (int i = 0; i < n_axis; ++i)
        buf[static_cast<std::size_t>(i)] = vals[base + static_cast<std::size_t>(i) * stride];
      envelope_1d(buf, c, env, own);
      for (int i = 0; i < n_axis; ++i) {
        vals[base + static_cast<std::size_t>(i) * stride] = env[static_cast<std::size_t>(i)];
        owners[base + static_cast<std::size_t>(i) * stride] = own[static_cast<std::size_t>(i)];
      }
    }
  });
}

GridSpec clip_to_box(const GridSpec& g, const Vec& lo, const Vec& hi) {
  GridSpec out = g;
  for (int a = 0; a < g.dim; ++a) {
    int i_lo = std::max(0, static_cast<int>(std::ceil((lo[a] - g.lo[a]) / g.h - 1e-9)));
    int i_hi = std::min(g.n[static_cast<std::size_t>(a)] - 1,
                        static_cast<int>(std::floor((hi[a] - g.lo[a]) / g.h + 1e-9)));
    if (i_hi < i_lo) fail(Err::OutOfDomain, "evolution lattice does not meet the domain");
    out.lo[a] = g.lo[a] + i_lo * g.h;
    out.n[static_cast<std::size_t>(a)] = i_hi - i_lo + 1;
  }
  return out;
}

}  // namespace

EvolveValue lax_oleinik_negative(const TonelliSystem& sys, const MarginalFunction& phi, double t1,
                                 double t2, const Vec& x, const EvolveOptions& opt) {
  return lax_oleinik_point(sys, phi, t1, t2, x, false, opt);
}

EvolveValue lax_oleinik_positive(const TonelliSystem& sys, const MarginalFunction& phi, double t1,
                                 double t2, const Vec& x, const EvolveOptions& opt) {
  return lax_oleinik_point(sys, phi, t1, t2, x, true, opt);
}

EvolvedGrid evolve_grid(const TonelliSystem& sys, const MarginalFunction& phi, double t1,
                        double t2, const GridSpec& out, bool positive, const EvolveOptions& opt) {
  if (!(t2 > t1)) fail(Err::InvalidArgument, "evolve_grid needs t2 > t1");
  EvolvedGrid result;
  result.fn.grid = out;
  result.fn.values.assign(out.size(), 0.0);
  result.maximizers.assign(out.size(), Vec(out.dim));

  const bool exact_kernel =
      sys.exact_action(t1, t2, out.coord(0), out.coord(0)).has_value() &&
      phi.domain().kind == Domain::Kind::Box;

  if (exact_kernel && !(opt.detect_basins && out.dim == 1)) {
    double r = derive_radius(sys, phi, t1, t2, opt);
    GridSpec lattice = clip_to_box(out.inflated(r), phi.domain().lower, phi.domain().upper);
    std::vector<double> vals(lattice.size());
    parallel_for(lattice.size(), [&](std::size_t a, std::size_t b) {
      for (std::size_t i = a; i < b; ++i) vals[i] = phi.value(lattice.coord(i));
    });
    if (positive)
      for (double& v : vals) v = -v;
    double c = (lattice.h * lattice.h) / (2.0 * (t2 - t1));
    std::vector<std::vector<int>> owner_passes(static_cast<std::size_t>(lattice.dim));
    for (int axis = 0; axis < lattice.dim; ++axis)
      envelope_axis(lattice, vals, owner_passes[static_cast<std::size_t>(axis)], c, axis);

    auto off = out.offset_in(lattice);
    parallel_for(out.size(), [&](std::size_t a, std::size_t b) {
      for (std::size_t i = a; i < b; ++i) {
        auto idx = out.unflatten(i);
        std::array<int, 3> lat_idx{0, 0, 0};
        for (int ax = 0; ax < out.dim; ++ax)
          lat_idx[static_cast<std::size_t>(ax)] =
              idx[static_cast<std::size_t>(ax)] + off[static_cast<std::size_t>(ax)];
        std::size_t flat = lattice.flatten(lat_idx);
        result.fn.values[i] = positive ? -vals[flat] : vals[flat];
        // walk the owner chain from the last axis back to the first
        std::array<int, 3> src = lat_idx;
        for (int ax = lattice.dim - 1; ax >= 0; --ax) {
          std::size_t q = lattice.flatten(src);
          src[static_cast<std::size_t>(ax)] =
              owner_passes[static_cast<std::size_t>(ax)][q];
        }
        Vec y(out.dim);
        for (int ax = 0; ax < out.dim; ++ax)
          y[ax] = lattice.lo[ax] + lattice.h * src[static_cast<std::size_t>(ax)];
        result.maximizers[i] = y;
      }
    });
    return result;
  }

  // general path: per-node search (warm starts chain within each node scan)
  std::atomic<bool> any_nonunique{false};
  parallel_for(out.size(), [&](std::size_t a, std::size_t b) {
    bool chunk_nonunique = false;
    for (std::size_t i = a; i < b; ++i) {
      EvolveValue v = lax_oleinik_point(sys, phi, t1, t2, out.coord(i), positive, opt);
      result.fn.values[i] = v.value;
      result.maximizers[i] = v.argopt;
      if (!v.unique) chunk_nonunique = true;
    }
    if (chunk_nonunique) any_nonunique.store(true, std::memory_order_relaxed);
  });
  result.any_nonunique = any_nonunique.load();
  return result;
}

TouchingMember touching_member(const MarginalFunction& phi, const Vec& anchor, const Vec& slope) {
  double c = phi.hessian_bound();
  double val = phi.value(anchor);
  TouchingMember m;
  m.anchor = anchor;
  m.slope = slope;
  // f(y) = phi(anchor) + slope.(y - anchor) + c/2 |y - anchor|^2 >= phi(y)
  m.piece = Piece{"touch", [val, anchor, slope, c](const Vec& y) {
                    PieceJet j;
                    Vec dxx = y - anchor;
                    j.value = val + dot(slope, dxx) + 0.5 * c * norm2(dxx);
                    j.grad = slope + c * dxx;
                    j.hess = c * Mat::identity(y.d);
                    return j;
                  }};
  return m;
}

std::vector<TouchingMember> touching_family(const MarginalFunction& phi, const Vec& x,
                                            double tie_tol) {
  Polytope dplus = phi.superdifferential(x, tie_tol);
  std::vector<TouchingMember> fam;
  fam.reserve(dplus.vertices.size());
  for (const Vec& v : dplus.vertices) fam.push_back(touching_member(phi, x, v));
  return fam;
}

InfReprReport verify_inf_representation(const TonelliSystem& sys, const MarginalFunction& phi,
                                        double t1, double t2, const GridSpec& window,
                                        const EvolveOptions& opt) {
  EvolveOptions eopt = opt;
  eopt.refine = true;
  EvolvedGrid evolved = evolve_grid(sys, phi, t1, t2, window, true, eopt);

  InfReprReport rep;
  rep.nodes = window.size();
  std::vector<double> devs(window.size(), 0.0), gaps(window.size(), 0.0);
  parallel_for(window.size(), [&](std::size_t a, std::size_t b) {
    for (std::size_t i = a; i < b; ++i) {
      Vec x = window.coord(i);
      Vec ystar = evolved.maximizers[i];
      double lhs = evolved.fn.values[i];

      // slope of the action at the maximizer: the momentum reaching y*
      ActionAt act = action_between(sys, t1, t2, x, ystar, opt.shoot_steps, nullptr);
      std::vector<TouchingMember> fam = touching_family(phi, ystar);
      fam.push_back(touching_member(phi, ystar, act.p_end));

      double rhs = 1e300, worst_gap = 0;
      for (const TouchingMember& m : fam) {
        std::vector<Piece> single{m.piece};
        MarginalFunction f("touch", phi.domain(), single, phi.hessian_bound());
        EvolveValue tv = lax_oleinik_point(sys, f, t1, t2, x, true, eopt);
        rhs = std::min(rhs, tv.value);
        worst_gap = std::max(worst_gap, lhs - tv.value);
      }
      devs[i] = std::fabs(lhs - rhs);
      gaps[i] = worst_gap;
    }
  });
  for (std::size_t i = 0; i < window.size(); ++i) {
    rep.max_deviation = std::max(rep.max_deviation, devs[i]);
    rep.max_envelope_gap = std::max(rep.max_envelope_gap, gaps[i]);
  }
  return rep;
}

C11Certificate c11_certificate(const GridFn& fn, double cap) {
  if (!(cap > 0)) fail(Err::InvalidArgument, "c11_certificate needs a positive cap");
  const GridSpec& g = fn.grid;
  C11Certificate cert;
  cert.cap = cap;
  cert.upper = -1e300;
  cert.lower = 1e300;
  const double h2 = g.h * g.h;

  std::vector<std::array<int, 3>> dirs;
  for (int a = 0; a < g.dim; ++a) {
    std::array<int, 3> e{0, 0, 0};
    e[static_cast<std::size_t>(a)] = 1;
    dirs.push_back(e);
  }
  // diagonal probes close the gap between axis bounds and a full Hessian bound
  if (g.dim >= 2)
    for (int a = 0; a < g.dim; ++a)
      for (int b = a + 1; b < g.dim; ++b)
        for (int s : {1, -1}) {
          std::array<int, 3> e{0, 0, 0};
          e[static_cast<std::size_t>(a)] = 1;
          e[static_cast<std::size_t>(b)] = s;
          dirs.push_back(e);
        }

  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.unflatten(i);
    for (const auto& e : dirs) {
      std::array<int, 3> ip = idx, im = idx;
      double len2 = 0;
      for (int a = 0; a < g.dim; ++a) {
        ip[static_cast<std::size_t>(a)] += e[static_cast<std::size_t>(a)];
        im[static_cast<std::size_t>(a)] -= e[static_cast<std::size_t>(a)];
        len2 += static_cast<double>(e[static_cast<std::size_t>(a)]) * e[static_cast<std::size_t>(a)];
      }
      if (!g.in_bounds(ip) || !g.in_bounds(im)) continue;
      double d2 = (fn.at(g.flatten(ip)) - 2.0 * fn.at(i) + fn.at(g.flatten(im))) / (h2 * len2);
      cert.upper = std::max(cert.upper, d2);
      cert.lower = std::min(cert.lower, d2);
    }
  }
  cert.pass = cert.upper <= cap && cert.lower >= -cap;
  return cert;
}

CriticalTimeEstimate estimate_critical_time(const TonelliSystem& sys, const MarginalFunction& phi,
                                            const GridSpec& window,
                                            const CriticalTimeOptions& opt) {
  if (!(opt.t_cap > 0) || opt.probes < 2)
    fail(Err::InvalidArgument, "estimate_critical_time needs a positive cap and >= 2 probes");
  CriticalTimeEstimate est;
  est.cap = opt.t_cap;

  EvolveOptions eopt = opt.evolve;
  eopt.detect_basins = true;
  auto fails_at = [&](double t) {
    EvolvedGrid ev = evolve_grid(sys, phi, 0.0, t, window, true, eopt);
    C11Certificate cert = c11_certificate(ev.fn, opt.c11_cap);
    est.probed.push_back(t);
    return !cert.pass || ev.any_nonunique;
  };

  double last_pass = 0.0;
  double first_fail = -1.0;
  for (int j = 1; j <= opt.probes; ++j) {
    double t = opt.t_cap * j / opt.probes;
    if (fails_at(t)) { first_fail = t; break; }
    last_pass = t;
  }
  if (first_fail < 0) {
    est.lower = opt.t_cap;
    est.upper = opt.t_cap;
    return est;
  }
  double lo = last_pass, hi = first_fail;
  while (hi - lo > opt.bisect_tol) {
    double mid = 0.5 * (lo + hi);
    if (fails_at(mid)) hi = mid;
    else lo = mid;
  }
  est.lower = lo;
  est.upper = hi;
  return est;
}

}  // namespace sconclab
