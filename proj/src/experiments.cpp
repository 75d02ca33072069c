#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "evolution.hpp"
#include "flow.hpp"
#include "pseudograph.hpp"
#include "registry.hpp"
#include "topology.hpp"

namespace sconclab {

void ExpCtx::artifact(const std::string& name, const std::string& content) {
  report.add_artifact(name);
  if (out_dir.empty()) return;
  write_text_file(out_dir + "/" + name, content);
}

namespace {

double param(const ExpCtx& c, const char* key, double fallback) {
  return c.cfg.number_or("params", key, fallback);
}

int iparam(const ExpCtx& c, const char* key, int fallback) {
  return c.cfg.integer_or("params", key, fallback);
}

bool bparam(const ExpCtx& c, const char* key, bool fallback) {
  return c.cfg.flag_or("params", key, fallback);
}

GridSpec window_from(const ExpCtx& c, int dim, double lo_def, double hi_def, double h_def) {
  double h = param(c, "h", h_def);
  Vec lo = c.cfg.vec_or("params", "win_lo", dim, Vec(dim, lo_def));
  Vec hi = c.cfg.vec_or("params", "win_hi", dim, Vec(dim, hi_def));
  return GridSpec::over(lo, hi, h);
}

EvolveOptions evolve_opts(const ExpCtx& c) {
  EvolveOptions opt;
  opt.radius = param(c, "radius", 0.0);
  opt.spacing = param(c, "spacing", 0.01);
  opt.refine = bparam(c, "refine", true);
  opt.lipschitz = param(c, "lipschitz", -1.0);
  opt.shoot_steps = iparam(c, "shoot_steps", 0);
  opt.detect_basins = bparam(c, "detect_basins", false);
  return opt;
}

ordered_json json_vec(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.d; ++i) a.push_back(v[i]);
  return a;
}

std::string metric_suffix(std::string s) {
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

// Flowed graph of D(T phi) against the pseudograph of D+phi, per dimension.
void run_verify_arnaud(ExpCtx& c) {
  std::vector<int> dims = c.cfg.integers_or("params", "dims", {dim_from(c.cfg)});
  double t1 = param(c, "t1", 0.0);
  double t2 = param(c, "t", 0.5);
  for (int d : dims) {
    SystemPtr sys = system_from(c.cfg, d);
    FunctionPtr phi = function_from(c.cfg, d);
    GridSpec win = window_from(c, d, -2.0, 2.0, 0.01);

    PseudographMatchOptions opt;
    opt.tol = param(c, "tol", 0.02);
    opt.require_symmetric = bparam(c, "symmetric", d == 1);
    opt.inflate = param(c, "inflate", -1.0);
    opt.flow_steps = iparam(c, "flow_steps", 0);
    opt.c11_cap = param(c, "c11_cap", 1e4);
    opt.fiber.fiber_spacing = param(c, "fiber_spacing", 0.02);
    opt.evolve = evolve_opts(c);

    PseudographMatch m = verify_pseudograph_identity(*sys, *phi, t1, t2, win, opt);
    std::string suf = "_d" + std::to_string(d);
    c.report.metric("dir_flowed" + suf, m.directed_flowed);
    c.report.metric("dir_pseudo" + suf, m.directed_pseudo);
    if (m.symmetric_required) c.report.metric("sym" + suf, m.hausdorff);
    c.report.fold_pass(m.pass);

    // directed_ab reads flowed-to-pseudograph, directed_ba the reverse.
    ordered_json j;
    j["hausdorff"] = m.hausdorff;
    j["directed_ab"] = m.directed_flowed;
    j["directed_ba"] = m.directed_pseudo;
    j["t"] = m.t2 - m.t1;
    j["grid_h"] = m.grid_h;
    j["pass"] = m.pass;
    j["t1"] = m.t1;
    j["t2"] = m.t2;
    j["cloud_flowed"] = m.cloud_flowed;
    j["cloud_pseudo"] = m.cloud_pseudo;
    j["tol"] = m.tol;
    j["symmetric_required"] = m.symmetric_required;
    c.report.info("match" + suf, j);
    c.artifact("arnaud" + suf + ".json", j.dump(2) + "\n");

    if (d == 1) {
      PseudographOptions ps;
      ps.fiber_spacing = opt.fiber.fiber_spacing;
      c.artifact("pseudograph" + suf + ".csv", csv_of_cloud(sample_pseudograph(*phi, win, ps)));
    }
  }
}

// Lax-Oleinik evolution over a window, with a closed-form error metric for
// the free transport of -|x| in one dimension.
void run_evolve(ExpCtx& c) {
  int d = dim_from(c.cfg);
  SystemPtr sys = system_from(c.cfg, d);
  FunctionPtr phi = function_from(c.cfg, d);
  double t1 = param(c, "t1", 0.0);
  double t2 = param(c, "t", 1.0);
  bool positive = bparam(c, "positive", true);
  GridSpec win = window_from(c, d, -2.0, 2.0, 0.01);

  EvolvedGrid eg = evolve_grid(*sys, *phi, t1, t2, win, positive, evolve_opts(c));

  double vmin = eg.fn.values.empty() ? 0.0 : eg.fn.values[0];
  double vmax = vmin;
  for (double v : eg.fn.values) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  c.report.metric("nodes", static_cast<double>(eg.fn.values.size()));
  c.report.metric("value_min", vmin);
  c.report.metric("value_max", vmax);
  c.report.metric("nonunique", eg.any_nonunique ? 1.0 : 0.0);

  bool has_oracle = c.cfg.str_or("system", "name", "free") == "free" &&
                    c.cfg.str_or("phi", "name", "neg-norm") == "neg-norm" && d == 1 &&
                    t1 == 0.0 && t2 > 0.0 && positive;
  if (has_oracle) {
    double err = 0;
    for (std::size_t i = 0; i < win.size(); ++i) {
      double x = win.coord(i)[0];
      double exact = std::abs(x) <= t2 ? -x * x / (2.0 * t2) : -std::abs(x) + t2 / 2.0;
      err = std::max(err, std::abs(eg.fn.values[i] - exact));
    }
    c.report.metric("oracle_err", err);
  }
  c.artifact("evolved.csv", csv_of_grid(eg.fn));

  ordered_json j;
  j["operator"] = positive ? "positive" : "negative";
  j["t1"] = t1;
  j["t2"] = t2;
  ordered_json grid;
  grid["lo"] = json_vec(win.lo);
  grid["hi"] = json_vec(win.upper());
  grid["h"] = win.h;
  grid["nodes"] = win.size();
  j["grid"] = grid;
  j["values"] = ordered_json(eg.fn.values);
  ordered_json maxers = ordered_json::array();
  for (const Vec& y : eg.maximizers) maxers.push_back(json_vec(y));
  j["maximizers"] = maxers;
  c.artifact("evolved.json", j.dump() + "\n");
}

// Bracket of the largest time with a smooth evolved function, plus explicit
// curvature certificates at an early and a late probe time.
void run_critical_time(ExpCtx& c) {
  int d = dim_from(c.cfg);
  SystemPtr sys = system_from(c.cfg, d);
  FunctionPtr phi = function_from(c.cfg, d);
  GridSpec win = window_from(c, d, -2.0, 2.0, 0.01);

  CriticalTimeOptions opt;
  opt.t_cap = param(c, "t_cap", 1.0);
  opt.probes = iparam(c, "probes", 8);
  opt.bisect_tol = param(c, "bisect_tol", 0.05);
  opt.c11_cap = param(c, "c11_cap", 50.0);
  opt.evolve = evolve_opts(c);

  CriticalTimeEstimate est = estimate_critical_time(*sys, *phi, win, opt);
  c.report.metric("lower", est.lower);
  c.report.metric("upper", est.upper);
  c.report.metric("width", est.upper - est.lower);
  c.report.info("probed", ordered_json(est.probed));

  auto cert_at = [&](double t, const std::string& tag) {
    EvolvedGrid eg = evolve_grid(*sys, *phi, 0.0, t, win, true, opt.evolve);
    C11Certificate cert = c11_certificate(eg.fn, opt.c11_cap);
    c.report.metric("cert_" + tag, cert.pass ? 1.0 : 0.0);
    ordered_json j;
    j["t"] = t;
    j["upper"] = cert.upper;
    j["lower"] = cert.lower;
    j["cap"] = cert.cap;
    j["pass"] = cert.pass;
    c.report.info("cert_" + tag, j);
    c.artifact("evolved_" + tag + ".csv", csv_of_grid(eg.fn));
  };
  cert_at(param(c, "t_early", 0.3), "early");
  cert_at(param(c, "t_late", 0.7), "late");
}

// Evolved function against the lower envelope of evolved touching members,
// one metric pair per datum.
void run_inf_repr(ExpCtx& c) {
  int d = dim_from(c.cfg);
  SystemPtr sys = system_from(c.cfg, d);
  double t1 = param(c, "t1", 0.0);
  double t2 = param(c, "t", 0.2);
  GridSpec win = window_from(c, d, -1.0, 1.0, 0.05);
  EvolveOptions opt = evolve_opts(c);

  std::vector<std::string> names =
      c.cfg.words_or("params", "functions", {c.cfg.str_or("phi", "name", "neg-norm")});
  double worst = 0;
  for (const auto& name : names) {
    Config sub = c.cfg;
    sub.set("phi", "name", name);
    FunctionPtr phi = function_from(sub, d);
    InfReprReport rep = verify_inf_representation(*sys, *phi, t1, t2, win, opt);
    std::string suf = "_" + metric_suffix(name);
    c.report.metric("max_dev" + suf, rep.max_deviation);
    c.report.metric("env_gap" + suf, rep.max_envelope_gap);
    worst = std::max(worst, rep.max_deviation);
  }
  c.report.metric("max_dev", worst);
}

// Random evolution maximizers against the localization radius.
void run_localization(ExpCtx& c) {
  int d = dim_from(c.cfg);
  SystemPtr sys = system_from(c.cfg, d);
  FunctionPtr phi = function_from(c.cfg, d);
  int n = iparam(c, "n", 500);
  double t_min = param(c, "t_min", 0.01);
  double t_max = param(c, "t_max", 0.5);
  bool positive = bparam(c, "positive", true);
  EvolveOptions opt = evolve_opts(c);
  Vec lo = c.cfg.vec_or("params", "win_lo", d, Vec(d, -1.0));
  Vec hi = c.cfg.vec_or("params", "win_hi", d, Vec(d, 1.0));

  double ell = param(c, "ell", -1.0);
  if (ell < 0) ell = datum_lipschitz(*phi);
  double lambda = maximizer_radius(*sys, ell, 0.0, t_max).lambda;
  // Discrete search can land one refined cell past the ideal radius.
  double slack = param(c, "slack", 2.0 * opt.spacing);

  int violations = 0;
  double max_excess = -lambda * t_min;
  for (int i = 0; i < n; ++i) {
    Vec x(d);
    for (int j = 0; j < d; ++j) x[j] = c.rng.uniform(lo[j], hi[j]);
    double t = c.rng.uniform(t_min, t_max);
    EvolveValue ev = positive ? lax_oleinik_positive(*sys, *phi, 0.0, t, x, opt)
                              : lax_oleinik_negative(*sys, *phi, 0.0, t, x, opt);
    double excess = sys->domain().distance(ev.argopt, x) - (lambda * t + slack);
    if (excess > 0) ++violations;
    max_excess = std::max(max_excess, excess);
  }
  c.report.metric("draws", n);
  c.report.metric("violations", violations);
  c.report.metric("max_excess", max_excess);
  c.report.metric("lambda", lambda);
  c.report.metric("ell", ell);
}

// Characteristic integration checks: energy drift along one orbit, the
// variational Jacobian against finite differences, and the closed-form
// backward Jacobian of the free system.
void run_flow(ExpCtx& c) {
  int d = dim_from(c.cfg);
  SystemPtr sys = system_from(c.cfg, d);
  double t = param(c, "t", 1.0);
  double step = param(c, "step", 1e-3);
  Vec x0 = c.cfg.vec_or("params", "x0", d, Vec(d, 1.0));
  Vec p0 = c.cfg.vec_or("params", "p0", d, Vec(d, 0.5));

  FlowOptions fo;
  fo.steps = static_cast<int>(std::ceil(t / step));
  fo.record_trajectory = true;
  FlowResult fr = hamiltonian_flow(*sys, 0.0, t, x0, p0, fo);
  double h0 = sys->hamiltonian(0.0, x0, p0).value;
  double drift = 0;
  for (const auto& pt : fr.trajectory)
    drift = std::max(drift, std::abs(sys->hamiltonian(pt.t, pt.x, pt.p).value - h0));
  c.report.metric("energy_drift", drift);
  c.report.metric("steps", fr.steps);

  int vsteps = iparam(c, "var_steps", 1000);
  double eps = param(c, "fd_eps", 1e-6);
  VariationalState vs = variational_flow_forward(*sys, 0.0, t, x0, p0, vsteps);
  FlowOptions bumped;
  bumped.steps = vsteps;
  double fd_err = 0;
  for (int j = 0; j < d; ++j) {
    Vec pp = p0, pm = p0;
    pp[j] += eps;
    pm[j] -= eps;
    PhasePoint hi_end = hamiltonian_flow(*sys, 0.0, t, x0, pp, bumped).end;
    PhasePoint lo_end = hamiltonian_flow(*sys, 0.0, t, x0, pm, bumped).end;
    Vec dx = sys->domain().diff(lo_end.x, hi_end.x);
    Vec dp = hi_end.p - lo_end.p;
    for (int i = 0; i < d; ++i) {
      fd_err = std::max(fd_err, std::abs(dx[i] / (2 * eps) - vs.x_p(i, j)));
      fd_err = std::max(fd_err, std::abs(dp[i] / (2 * eps) - vs.p_p(i, j)));
    }
  }
  c.report.metric("var_fd_err", fd_err);

  // Backward variational state of the free system is -dt * I exactly.
  double dt_free = param(c, "dt_free", 0.5);
  SystemPtr free_sys = make_free_system(Domain::cube(d, -8.0, 8.0));
  VariationalState vb = variational_flow(*free_sys, 0.0, dt_free, Vec(d, 1.0), p0, 100);
  double free_err = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      free_err = std::max(free_err, std::abs(vb.x_p(i, j) + (i == j ? dt_free : 0.0)));
  c.report.metric("free_xp_err", free_err);

  // Quantified shooting window of the free system; its momentum Hessian is
  // the identity, so the spectral floor is 1.
  DiffeoWindow dw = diffeo_window(*free_sys, param(c, "diffeo_radius", 2.0));
  c.report.metric("diffeo_c_r", dw.c_r);
  c.report.metric("diffeo_t_r", dw.t_r);

  if (!fr.trajectory.empty()) {
    CurvePath orbit;
    for (const auto& pt : fr.trajectory) {
      orbit.times.push_back(pt.t);
      orbit.knots.push_back(pt.x);
      orbit.costates.push_back(pt.p);
    }
    c.artifact("orbit.csv", csv_of_curve(orbit));
  }
}

// Stratum census over a window and connectivity of the low strata.
void run_strata(ExpCtx& c) {
  int d = dim_from(c.cfg);
  FunctionPtr phi = function_from(c.cfg, d);
  GridSpec win = window_from(c, d, -2.0, 2.0, 0.01);
  int k = iparam(c, "k", 0);
  double tie_tol = param(c, "tie_tol", 0.0);

  StrataGrid sg = classify_grid(*phi, win, tie_tol);
  ConnectivityReport cr = connectivity_report(sg, k);
  for (int s = 0; s <= 3; ++s)
    c.report.metric("count_dim" + std::to_string(s), static_cast<double>(sg.counts[s]));
  c.report.metric("mask_nodes", static_cast<double>(cr.nodes));
  c.report.metric("components", static_cast<double>(cr.components));
  std::vector<std::size_t> top(cr.sizes.begin(),
                               cr.sizes.begin() + std::min<std::size_t>(cr.sizes.size(), 10));
  c.report.info("component_sizes", ordered_json(top));
  c.artifact("strata.csv", csv_of_strata(sg));

  ordered_json j;
  j["max_dim"] = k;
  j["nodes"] = cr.nodes;
  j["components"] = cr.components;
  j["sizes"] = ordered_json(cr.sizes);
  c.artifact("components.json", j.dump(2) + "\n");
}

// Box-counting dimension of the sampled singular set.
void run_dim(ExpCtx& c) {
  int d = dim_from(c.cfg);
  FunctionPtr phi = function_from(c.cfg, d);
  GridSpec win = window_from(c, d, -2.0, 2.0, 0.0015);
  double tie_tol = param(c, "tie_tol", 0.0);

  std::vector<Vec> pts = singular_samples(*phi, win, tie_tol);
  DimensionEstimate est =
      box_counting_dimension(pts, param(c, "min_eps", 0.003), iparam(c, "max_levels", 14),
                             iparam(c, "fit_levels", 4));
  c.report.metric("dimension", est.dimension);
  c.report.metric("points", static_cast<double>(est.points));
  c.report.metric("scales", static_cast<double>(est.eps.size()));
  c.report.info("eps", ordered_json(est.eps));
  c.report.info("counts", ordered_json(est.counts));
  c.artifact("singular_points.csv", csv_of_points(pts, d));

  // Optional pointwise stratum probes along the first axis.
  if (c.cfg.has("params", "probe_x1")) {
    int lo_label = 99, hi_label = -1;
    for (double x1 : c.cfg.numbers("params", "probe_x1")) {
      Vec x(d);
      x[0] = x1;
      int label = phi->stratum_dimension(x, tie_tol);
      lo_label = std::min(lo_label, label);
      hi_label = std::max(hi_label, label);
    }
    c.report.metric("probe_label_min", lo_label);
    c.report.metric("probe_label_max", hi_label);
  }
}

// Broken-line connections avoiding the high strata, over a seed sweep.
void run_path(ExpCtx& c) {
  int d = dim_from(c.cfg);
  FunctionPtr phi = function_from(c.cfg, d);
  Vec e1(d);
  e1[0] = 1.0;
  Vec a = c.cfg.vec_or("params", "a", d, -1.0 * e1);
  Vec b = c.cfg.vec_or("params", "b", d, e1);
  int seeds = iparam(c, "seeds", 100);

  PathOptions po;
  po.radius = param(c, "radius", -1.0);
  po.max_samples = iparam(c, "max_samples", 10);
  po.tol = param(c, "tol", 0.01);
  po.tie_tol = param(c, "tie_tol", 0.0);

  int successes = 0;
  int worst_tried = 0;
  double max_dot = 0;
  Vec mid = 0.5 * (a + b);
  Vec dir = b - a;
  bool saved = false;
  for (int s = 1; s <= seeds; ++s) {
    po.seed = static_cast<std::uint64_t>(s);
    try {
      BrokenLine bl = broken_line_path(*phi, a, b, po);
      ++successes;
      worst_tried = std::max(worst_tried, bl.tried);
      max_dot = std::max(max_dot, std::abs(dot(bl.bend - mid, dir)));
      if (!saved) {
        // z is the common bend point of the two legs.
        ordered_json j;
        j["a"] = json_vec(bl.a);
        j["z"] = json_vec(bl.bend);
        j["b"] = json_vec(bl.b);
        j["samples_checked"] = bl.samples_checked;
        c.artifact("path.json", j.dump(2) + "\n");
        saved = true;
      }
    } catch (const Error&) {
    }
  }
  c.report.metric("attempts", seeds);
  c.report.metric("successes", successes);
  c.report.metric("worst_tried", worst_tried);
  c.report.metric("max_bisector_dot", max_dot);
  c.report.fold_pass(successes == seeds);
}

// Minimal action between random endpoint pairs, direct descent against
// shooting.
void run_fundamental(ExpCtx& c) {
  int d = dim_from(c.cfg);
  SystemPtr sys = system_from(c.cfg, d);
  int n = iparam(c, "n", 100);
  double t_min = param(c, "t_min", 0.02);
  double t_max = param(c, "t_max", 0.3);
  const Domain& dom = sys->domain();
  Vec ext = dom.extent();
  Vec lo = dom.kind == Domain::Kind::Torus ? Vec(d) : dom.lower;
  lo = c.cfg.vec_or("params", "win_lo", d, lo);
  Vec hi = c.cfg.vec_or("params", "win_hi", d, lo + ext);

  ActionOptions direct;
  direct.method = ActionMethod::Direct;
  direct.knots = iparam(c, "knots", 64);
  ActionOptions shoot;
  shoot.method = ActionMethod::Shooting;
  shoot.steps = iparam(c, "steps", 0);

  double max_gap = 0, sum_gap = 0;
  bool saved = false;
  for (int i = 0; i < n; ++i) {
    Vec x(d), y(d);
    for (int j = 0; j < d; ++j) {
      x[j] = c.rng.uniform(lo[j], hi[j]);
      y[j] = c.rng.uniform(lo[j], hi[j]);
    }
    double t = c.rng.uniform(t_min, t_max);
    CurvePath pd = fundamental_solution(*sys, 0.0, t, x, y, direct);
    CurvePath ps = fundamental_solution(*sys, 0.0, t, x, y, shoot);
    double gap = std::abs(pd.action - ps.action);
    max_gap = std::max(max_gap, gap);
    sum_gap += gap;
    if (!saved) {
      c.artifact("minimizer.csv", csv_of_curve(pd));
      saved = true;
    }
  }
  c.report.metric("draws", n);
  c.report.metric("max_gap", max_gap);
  c.report.metric("mean_gap", n ? sum_gap / n : 0.0);
}

}  // namespace

const std::vector<ExperimentDef>& experiment_table() {
  static const std::vector<ExperimentDef> table = {
      {"verify-arnaud", "flowed gradient graph vs pseudograph of the datum", run_verify_arnaud},
      {"evolve", "Lax-Oleinik evolution over a window", run_evolve},
      {"critical-time", "bracket the last time the evolved function is C11", run_critical_time},
      {"inf-repr", "evolution vs envelope of evolved touching members", run_inf_repr},
      {"localization", "maximizer distances vs the localization radius", run_localization},
      {"flow", "energy drift and variational Jacobian checks", run_flow},
      {"strata", "stratum census and connectivity over a window", run_strata},
      {"dim", "box-counting dimension of the singular set", run_dim},
      {"path", "broken lines between points avoiding the high strata", run_path},
      {"fundamental", "minimal action by direct descent vs shooting", run_fundamental},
  };
  return table;
}

}  // namespace sconclab
