#include "tonelli.hpp"

#include <algorithm>
#include <cmath>

namespace sconclab {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Golden-section maximum of a concave 1d function on [lo, hi].
double golden_max(const std::function<double(double)>& f, double lo, double hi, double* arg) {
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::fabs(a) + std::fabs(b)); ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + kGolden * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - kGolden * (b - a); f1 = f(x1);
    }
  }
  double xm = 0.5 * (a + b);
  if (arg) *arg = xm;
  return f(xm);
}

struct ConcaveJet {
  double value = 0;
  Vec grad;
  Mat hess;  // of the *objective*, negative semidefinite when concave
};

using ConcaveFn = std::function<ConcaveJet(const Vec&)>;

// Maximizes a concave objective over a growing centered ball. Newton with
// backtracking from a coarse-grid start, dense-grid refinement as fallback.
LegendreResult concave_maximize(int d, const ConcaveFn& fn, const LegendreOptions& opt) {
  double radius = opt.radius;
  for (int growth = 0; growth <= opt.max_growth; ++growth, radius *= 2.0) {
    // coarse prescan
    int per_axis = d == 1 ? 513 : (d == 2 ? 65 : 33);
    Vec best(d);
    double best_val = -1e300;
    std::array<int, 3> idx{0, 0, 0};
    std::array<int, 3> counts{1, 1, 1};
    for (int i = 0; i < d; ++i) counts[static_cast<std::size_t>(i)] = per_axis;
    for (idx[0] = 0; idx[0] < counts[0]; ++idx[0])
      for (idx[1] = 0; idx[1] < counts[1]; ++idx[1])
        for (idx[2] = 0; idx[2] < counts[2]; ++idx[2]) {
          Vec v(d);
          for (int i = 0; i < d; ++i)
            v[i] = -radius + 2.0 * radius * idx[static_cast<std::size_t>(i)] / (per_axis - 1);
          double val = fn(v).value;
          if (val > best_val) { best_val = val; best = v; }
        }

    // Newton ascent
    LegendreResult res;
    res.argmax = best;
    res.value = best_val;
    Vec v = best;
    bool newton_ok = false;
    for (int it = 0; it < opt.max_iter; ++it) {
      ConcaveJet j = fn(v);
      res.value = j.value;
      res.argmax = v;
      res.newton_iters = it;
      double gn = norm(j.grad);
      if (gn <= opt.tol) { newton_ok = true; break; }
      Mat neg_hess = -1.0 * j.hess;
      if (!is_spd(neg_hess, 1e-14)) break;  // flat or indefinite curvature, use the grid
      Vec step = solve(neg_hess, j.grad);
      double lam = 1.0;
      Vec vn = v + step;
      while (lam > 1e-8 && fn(vn).value < j.value) {
        lam *= 0.5;
        vn = v + lam * step;
      }
      if (lam <= 1e-8) break;
      v = vn;
    }

    if (!newton_ok) {
      // dense fallback; concavity makes every 1d slice unimodal
      res.used_fallback = true;
      Vec w = best;
      int cycles = d == 1 ? 1 : 10;
      for (int cyc = 0; cyc < cycles; ++cyc) {
        for (int ax = 0; ax < d; ++ax) {
          double arg = 0;
          auto slice = [&](double s) {
            Vec u = w;
            u[ax] = s;
            return fn(u).value;
          };
          if (d == 1) {
            // bracket on the dense grid first
            double lo = -radius, hi = radius;
            double bs = lo, bv = -1e300;
            for (int i = 0; i < opt.grid_points; ++i) {
              double s = lo + (hi - lo) * i / (opt.grid_points - 1);
              double val = slice(s);
              if (val > bv) { bv = val; bs = s; }
            }
            double cell = (hi - lo) / (opt.grid_points - 1);
            golden_max(slice, std::max(lo, bs - cell), std::min(hi, bs + cell), &arg);
          } else {
            golden_max(slice, -radius, radius, &arg);
          }
          w[ax] = arg;
        }
      }
      double wv = fn(w).value;
      if (wv > res.value) { res.value = wv; res.argmax = w; }
    }

    // boundary check drives the grow-and-retry loop
    double linf = 0;
    for (int i = 0; i < d; ++i) linf = std::max(linf, std::fabs(res.argmax[i]));
    if (linf < 0.995 * radius) {
      ConcaveJet j = fn(res.argmax);
      if (min_eigenvalue_sym(j.hess) > 1e-8 * (1.0 + frob_norm(j.hess)))
        fail(Err::NonConvexObjective,
             "conjugate objective is not concave near its maximizer (min curvature %g)",
             min_eigenvalue_sym(j.hess));
      return res;
    }
  }
  fail(Err::MaximizerOnBoundary,
       "conjugate maximizer pinned to the search boundary after %d radius doublings",
       opt.max_growth);
}

}  // namespace

LegendreResult legendre_transform(const TonelliSystem& sys, double t, const Vec& x, const Vec& p,
                                  const LegendreOptions& opt) {
  if (p.d != sys.dim()) fail(Err::InvalidArgument, "legendre_transform: momentum dimension mismatch");
  sys.domain().require_inside(x, "legendre_transform");
  auto fn = [&](const Vec& v) {
    LagJet l = sys.lagrangian(t, x, v);
    ConcaveJet j;
    j.value = dot(p, v) - l.value;
    j.grad = p - l.Lv;
    j.hess = -1.0 * l.Lvv;
    return j;
  };
  return concave_maximize(sys.dim(), fn, opt);
}

LegendreResult legendre_of_hamiltonian(const TonelliSystem& sys, double t, const Vec& x,
                                       const Vec& v, const LegendreOptions& opt) {
  if (v.d != sys.dim()) fail(Err::InvalidArgument, "legendre_of_hamiltonian: velocity dimension mismatch");
  sys.domain().require_inside(x, "legendre_of_hamiltonian");
  auto fn = [&](const Vec& q) {
    HamJet h = sys.hamiltonian(t, x, q);
    ConcaveJet j;
    j.value = dot(q, v) - h.value;
    j.grad = v - h.Hp;
    j.hess = -1.0 * h.Hpp;
    return j;
  };
  return concave_maximize(sys.dim(), fn, opt);
}

double theta_conjugate(const TonelliSystem& sys, double s) {
  double radius = 8.0;
  for (int growth = 0; growth < 40; ++growth, radius *= 2.0) {
    double arg = 0;
    double val = golden_max([&](double r) { return s * r - sys.theta(r); }, 0.0, radius, &arg);
    if (arg < 0.9 * radius) return std::max(val, s * 0.0 - sys.theta(0.0));
  }
  fail(Err::NoConvergence, "theta conjugate did not localize; theta may not be superlinear");
}

TonelliReport verify_tonelli(const TonelliSystem& sys, const VerifyWindow& win) {
  Rng rng(win.seed);
  const Domain& dom = sys.domain();
  TonelliConstants k = sys.constants();
  TonelliReport rep;
  rep.margin_convexity = 1e300;
  rep.margin_growth = 1e300;
  rep.margin_time = 1e300;
  rep.legendre_residual = 0;

  int stride = std::max(1, win.samples / 200);
  for (int i = 0; i < win.samples; ++i) {
    double t = sys.autonomous() ? 0.0 : rng.uniform(win.t_lo, win.t_hi);
    Vec x(dom.dim), v(dom.dim);
    for (int a = 0; a < dom.dim; ++a) {
      if (dom.kind == Domain::Kind::Box)
        x[a] = rng.uniform(dom.lower[a], dom.upper[a]);
      else
        x[a] = rng.uniform(0.0, dom.period[a]);
      v[a] = rng.uniform(-win.v_radius, win.v_radius);
    }
    LagJet l = sys.lagrangian(t, x, v);
    rep.margin_convexity = std::min(rep.margin_convexity, min_eigenvalue_sym(l.Lvv));
    rep.margin_growth = std::min(rep.margin_growth, l.value - sys.theta(norm(v)) + k.c0);
    rep.margin_time = std::min(rep.margin_time, k.C1 + k.C2 * l.value - std::fabs(l.Lt));
    if (i % stride == 0) {
      LegendreResult back = legendre_of_hamiltonian(sys, t, x, v);
      rep.legendre_residual = std::max(rep.legendre_residual, std::fabs(l.value - back.value));
    }
  }
  rep.pass = rep.margin_convexity > 0 && rep.margin_growth >= -1e-9 && rep.margin_time >= -1e-9 &&
             rep.legendre_residual <= 1e-6;
  return rep;
}

namespace {

class FreeSystem final : public TonelliSystem {
 public:
  explicit FreeSystem(const Domain& dom) : dom_(dom), name_("free") {}
  const std::string& name() const override { return name_; }
  const Domain& domain() const override { return dom_; }
  bool autonomous() const override { return true; }
  bool separable() const override { return true; }
  TonelliConstants constants() const override { return {}; }

  LagJet lagrangian(double, const Vec&, const Vec& v) const override {
    LagJet j;
    j.value = 0.5 * norm2(v);
    j.Lx = Vec(v.d);
    j.Lv = v;
    j.Lvv = Mat::identity(v.d);
    return j;
  }
  HamJet hamiltonian(double, const Vec& x, const Vec& p) const override {
    HamJet j;
    j.value = 0.5 * norm2(p);
    j.Hx = Vec(x.d);
    j.Hp = p;
    j.Hxx = Mat::zero(x.d);
    j.Hxp = Mat::zero(x.d);
    j.Hpp = Mat::identity(x.d);
    return j;
  }
  double theta(double r) const override { return 0.5 * r * r; }
  std::optional<double> exact_action(double t1, double t2, const Vec& x,
                                     const Vec& y) const override {
    double dt = t2 - t1;
    if (!(dt > 0)) return std::nullopt;
    double r = dom_.distance(x, y);
    return r * r / (2.0 * dt);
  }

 private:
  Domain dom_;
  std::string name_;
};

// Kinetic energy |v|^2/2 over a potential acting on each axis.
class MechanicalCos final : public TonelliSystem {
 public:
  MechanicalCos(const Domain& dom, double a, double k, std::string name)
      : dom_(dom), a_(a), k_(k), name_(std::move(name)) {}
  const std::string& name() const override { return name_; }
  const Domain& domain() const override { return dom_; }
  bool autonomous() const override { return true; }
  bool separable() const override { return true; }
  TonelliConstants constants() const override {
    TonelliConstants c;
    c.c0 = std::fabs(a_) * dom_.dim;
    return c;
  }

  LagJet lagrangian(double, const Vec& x, const Vec& v) const override {
    LagJet j;
    j.value = 0.5 * norm2(v);
    j.Lx = Vec(x.d);
    for (int i = 0; i < x.d; ++i) {
      j.value -= a_ * std::cos(k_ * x[i]);
      j.Lx[i] = a_ * k_ * std::sin(k_ * x[i]);
    }
    j.Lv = v;
    j.Lvv = Mat::identity(v.d);
    return j;
  }
  HamJet hamiltonian(double, const Vec& x, const Vec& p) const override {
    HamJet j;
    j.value = 0.5 * norm2(p);
    j.Hx = Vec(x.d);
    j.Hxx = Mat::zero(x.d);
    for (int i = 0; i < x.d; ++i) {
      j.value += a_ * std::cos(k_ * x[i]);
      j.Hx[i] = -a_ * k_ * std::sin(k_ * x[i]);
      j.Hxx(i, i) = -a_ * k_ * k_ * std::cos(k_ * x[i]);
    }
    j.Hp = p;
    j.Hxp = Mat::zero(x.d);
    j.Hpp = Mat::identity(x.d);
    return j;
  }
  double theta(double r) const override { return 0.5 * r * r; }

 private:
  Domain dom_;
  double a_, k_;
  std::string name_;
};

class MechanicalPoly final : public TonelliSystem {
 public:
  MechanicalPoly(const Domain& dom, std::vector<double> coeffs)
      : dom_(dom), coeffs_(std::move(coeffs)), name_("mechanical-poly") {
    // growth offset from a dense scan of the potential over the domain
    double vmax = -1e300;
    double lo = dom_.kind == Domain::Kind::Box ? dom_.lower[0] : 0.0;
    double hi = dom_.kind == Domain::Kind::Box ? dom_.upper[0] : dom_.period[0];
    for (int i = 0; i <= 100000; ++i) {
      double x = lo + (hi - lo) * i / 100000.0;
      vmax = std::max(vmax, poly(x, 0));
    }
    c0_ = std::max(0.0, vmax);
  }
  const std::string& name() const override { return name_; }
  const Domain& domain() const override { return dom_; }
  bool autonomous() const override { return true; }
  bool separable() const override { return true; }
  TonelliConstants constants() const override {
    TonelliConstants c;
    c.c0 = c0_;
    return c;
  }

  LagJet lagrangian(double, const Vec& x, const Vec& v) const override {
    LagJet j;
    j.value = 0.5 * norm2(v) - poly(x[0], 0);
    j.Lx = Vec(x.d);
    j.Lx[0] = -poly(x[0], 1);
    j.Lv = v;
    j.Lvv = Mat::identity(v.d);
    return j;
  }
  HamJet hamiltonian(double, const Vec& x, const Vec& p) const override {
    HamJet j;
    j.value = 0.5 * norm2(p) + poly(x[0], 0);
    j.Hx = Vec(x.d);
    j.Hx[0] = poly(x[0], 1);
    j.Hxx = Mat::zero(x.d);
    j.Hxx(0, 0) = poly(x[0], 2);
    j.Hp = p;
    j.Hxp = Mat::zero(x.d);
    j.Hpp = Mat::identity(x.d);
    return j;
  }
  double theta(double r) const override { return 0.5 * r * r; }

 private:
  double poly(double x, int deriv) const {
    double acc = 0;
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
      int n = static_cast<int>(j);
      if (n < deriv) continue;
      double f = 1;
      for (int k = 0; k < deriv; ++k) f *= (n - k);
      acc += f * coeffs_[j] * ((n - deriv) > 0 ? std::pow(x, n - deriv) : 1.0);
    }
    return acc;
  }

  Domain dom_;
  std::vector<double> coeffs_;
  double c0_ = 0;
  std::string name_;
};

class QuarticSystem final : public TonelliSystem {
 public:
  explicit QuarticSystem(const Domain& dom) : dom_(dom), name_("quartic") {}
  const std::string& name() const override { return name_; }
  const Domain& domain() const override { return dom_; }
  bool autonomous() const override { return true; }
  bool separable() const override { return true; }
  TonelliConstants constants() const override { return {}; }

  LagJet lagrangian(double, const Vec& x, const Vec& v) const override {
    LagJet j;
    double v2 = norm2(v);
    j.value = 0.25 * v2 * v2;
    j.Lx = Vec(x.d);
    j.Lv = v2 * v;
    j.Lvv = Mat(v.d);
    for (int i = 0; i < v.d; ++i)
      for (int jj = 0; jj < v.d; ++jj)
        j.Lvv(i, jj) = 2.0 * v[i] * v[jj] + (i == jj ? v2 : 0.0);
    return j;
  }
  HamJet hamiltonian(double, const Vec& x, const Vec& p) const override {
    HamJet j;
    double pn = norm(p);
    j.value = 0.75 * std::pow(pn, 4.0 / 3.0);
    j.Hx = Vec(x.d);
    j.Hxx = Mat::zero(x.d);
    j.Hxp = Mat::zero(x.d);
    if (pn < 1e-12) {
      // conjugate is C^1 but not C^2 at p = 0; clamp the curvature blow-up
      j.Hp = Vec(p.d);
      double c = std::pow(1e-12, -2.0 / 3.0);
      j.Hpp = c * Mat::identity(p.d);
      return j;
    }
    double s = std::pow(pn, -2.0 / 3.0);
    j.Hp = s * p;
    j.Hpp = Mat(p.d);
    for (int i = 0; i < p.d; ++i)
      for (int jj = 0; jj < p.d; ++jj)
        j.Hpp(i, jj) = s * ((i == jj ? 1.0 : 0.0) - (2.0 / 3.0) * p[i] * p[jj] / (pn * pn));
    return j;
  }
  double theta(double r) const override { return 0.25 * r * r * r * r; }

 private:
  Domain dom_;
  std::string name_;
};

class DrivenCos final : public TonelliSystem {
 public:
  DrivenCos(const Domain& dom, double a, double k, double eps, double omega)
      : dom_(dom), a_(a), k_(k), eps_(eps), omega_(omega), name_("driven") {}
  const std::string& name() const override { return name_; }
  const Domain& domain() const override { return dom_; }
  bool autonomous() const override { return false; }
  bool separable() const override { return false; }
  TonelliConstants constants() const override {
    TonelliConstants c;
    c.c0 = std::fabs(a_) * (1.0 + std::fabs(eps_)) * dom_.dim;
    c.C1 = std::fabs(a_ * eps_ * omega_) * dom_.dim;
    c.c1_loc = c.C1;
    return c;
  }

  LagJet lagrangian(double t, const Vec& x, const Vec& v) const override {
    double amp = a_ * (1.0 + eps_ * std::sin(omega_ * t));
    double damp = a_ * eps_ * omega_ * std::cos(omega_ * t);
    LagJet j;
    j.value = 0.5 * norm2(v);
    j.Lx = Vec(x.d);
    for (int i = 0; i < x.d; ++i) {
      j.value -= amp * std::cos(k_ * x[i]);
      j.Lt -= damp * std::cos(k_ * x[i]);
      j.Lx[i] = amp * k_ * std::sin(k_ * x[i]);
    }
    j.Lv = v;
    j.Lvv = Mat::identity(v.d);
    return j;
  }
  HamJet hamiltonian(double t, const Vec& x, const Vec& p) const override {
    double amp = a_ * (1.0 + eps_ * std::sin(omega_ * t));
    HamJet j;
    j.value = 0.5 * norm2(p);
    j.Hx = Vec(x.d);
    j.Hxx = Mat::zero(x.d);
    for (int i = 0; i < x.d; ++i) {
      j.value += amp * std::cos(k_ * x[i]);
      j.Hx[i] = -amp * k_ * std::sin(k_ * x[i]);
      j.Hxx(i, i) = -amp * k_ * k_ * std::cos(k_ * x[i]);
    }
    j.Hp = p;
    j.Hxp = Mat::zero(x.d);
    j.Hpp = Mat::identity(p.d);
    return j;
  }
  double theta(double r) const override { return 0.5 * r * r; }

 private:
  Domain dom_;
  double a_, k_, eps_, omega_;
  std::string name_;
};

}  // namespace

SystemPtr make_free_system(const Domain& dom) { return std::make_shared<FreeSystem>(dom); }
SystemPtr make_mechanical_cos(const Domain& dom, double a, double k) {
  return std::make_shared<MechanicalCos>(dom, a, k, "mechanical");
}
SystemPtr make_mechanical_poly(const Domain& dom, std::vector<double> coeffs) {
  return std::make_shared<MechanicalPoly>(dom, std::move(coeffs));
}
SystemPtr make_quartic_system(const Domain& dom) { return std::make_shared<QuarticSystem>(dom); }
SystemPtr make_driven_cos(const Domain& dom, double a, double k, double eps, double omega) {
  return std::make_shared<DrivenCos>(dom, a, k, eps, omega);
}

}  // namespace sconclab
