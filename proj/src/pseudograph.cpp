#include "pseudograph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sconclab {

namespace {

// Lattice sample of a polytope, densified until the spacing target holds.
std::vector<Vec> fiber_sample(const Polytope& poly, const PseudographOptions& opt) {
  if (poly.affine_dim == 0) return poly.vertices;
  int budget = std::max<int>(64, 4 * static_cast<int>(poly.vertices.size()));
  std::vector<Vec> pts;
  for (;;) {
    double spacing = 0;
    pts = polytope_lattice(poly, budget, &spacing);
    // zero spacing means no interior points were placed at all
    bool satisfied = spacing > 0 && spacing <= opt.fiber_spacing;
    if (satisfied || budget >= opt.max_fiber_points) return pts;
    budget = std::min(opt.max_fiber_points, budget * 2);
  }
}

void emit_point(const MarginalFunction& phi, const Vec& x, const PseudographOptions& opt,
                PhaseCloud& cloud) {
  Polytope dplus = phi.superdifferential(x, opt.tie_tol);
  if (dplus.affine_dim == 0) {
    cloud.push_back(x, dplus.vertices[0]);
    return;
  }
  for (const Vec& p : fiber_sample(dplus, opt)) cloud.push_back(x, p);
}

Vec gradient_rep(const MarginalFunction& phi, const Vec& x, double tie_tol) {
  return phi.piece_jet(phi.active_set(x, tie_tol).front(), x).grad;
}

// Subdivides a cell while its corner gradients spread too far for the corner
// samples to cover the pseudograph inside it. Newly created lattice points
// are emitted like regular nodes.
void refine_cell(const MarginalFunction& phi, const Vec& lo, const Vec& hi, int depth,
                 const PseudographOptions& opt, PhaseCloud& cloud) {
  const int d = lo.d;
  const int n_corners = 1 << d;
  std::array<Vec, 8> reps;
  for (int m = 0; m < n_corners; ++m) {
    Vec c(d);
    for (int a = 0; a < d; ++a) c[a] = (m >> a & 1) ? hi[a] : lo[a];
    reps[static_cast<std::size_t>(m)] = gradient_rep(phi, c, opt.tie_tol);
  }
  double spread = 0;
  for (int i = 0; i < n_corners; ++i)
    for (int j = i + 1; j < n_corners; ++j)
      spread = std::max(spread, dist(reps[static_cast<std::size_t>(i)],
                                     reps[static_cast<std::size_t>(j)]));
  double half_diag = 0.5 * dist(lo, hi);
  double est = std::sqrt(half_diag * half_diag + 0.25 * spread * spread);
  if (est <= 0.7 * opt.fiber_spacing) return;
  if (depth >= opt.max_refine_depth) {
    // an interface with a large gradient jump survived every subdivision;
    // the hull of the corner gradients approximates its fiber to within the
    // (tiny) cell size
    if (spread > 0.7 * opt.fiber_spacing) {
      std::vector<Vec> pts(reps.begin(), reps.begin() + n_corners);
      Polytope hull = polytope_from_points(pts);
      Vec center = 0.5 * (lo + hi);
      if (hull.affine_dim == 0) {
        cloud.push_back(center, hull.vertices[0]);
      } else {
        for (const Vec& p : fiber_sample(hull, opt)) cloud.push_back(center, p);
      }
    }
    return;
  }

  Vec mid = 0.5 * (lo + hi);
  // emit the sub-lattice points introduced by the split (any axis at mid)
  int n_lattice = 1;
  for (int a = 0; a < d; ++a) n_lattice *= 3;
  for (int m = 0; m < n_lattice; ++m) {
    int f = m;
    bool has_mid = false;
    Vec c(d);
    for (int a = 0; a < d; ++a) {
      int ternary = f % 3;
      f /= 3;
      c[a] = ternary == 0 ? lo[a] : (ternary == 1 ? mid[a] : hi[a]);
      if (ternary == 1) has_mid = true;
    }
    if (has_mid) emit_point(phi, c, opt, cloud);
  }
  for (int m = 0; m < n_corners; ++m) {
    Vec sub_lo(d), sub_hi(d);
    for (int a = 0; a < d; ++a) {
      sub_lo[a] = (m >> a & 1) ? mid[a] : lo[a];
      sub_hi[a] = (m >> a & 1) ? hi[a] : mid[a];
    }
    refine_cell(phi, sub_lo, sub_hi, depth + 1, opt, cloud);
  }
}

}  // namespace

PhaseCloud sample_pseudograph(const MarginalFunction& phi, const GridSpec& window,
                              const PseudographOptions& opt) {
  PhaseCloud cloud;
  cloud.dim = window.dim;
  for (std::size_t i = 0; i < window.size(); ++i) emit_point(phi, window.coord(i), opt, cloud);

  // walk the cells between nodes and subdivide where the gradient field
  // varies too fast for node samples alone
  std::array<int, 3> cells{1, 1, 1};
  for (int a = 0; a < window.dim; ++a)
    cells[static_cast<std::size_t>(a)] =
        std::max(1, window.n[static_cast<std::size_t>(a)] - 1);
  std::array<int, 3> idx{0, 0, 0};
  for (idx[0] = 0; idx[0] < cells[0]; ++idx[0])
    for (idx[1] = 0; idx[1] < cells[1]; ++idx[1])
      for (idx[2] = 0; idx[2] < cells[2]; ++idx[2]) {
        Vec lo(window.dim), hi(window.dim);
        bool degenerate = false;
        for (int a = 0; a < window.dim; ++a) {
          if (window.n[static_cast<std::size_t>(a)] < 2) degenerate = true;
          lo[a] = window.lo[a] + window.h * idx[static_cast<std::size_t>(a)];
          hi[a] = lo[a] + window.h;
        }
        if (!degenerate) refine_cell(phi, lo, hi, 0, opt, cloud);
      }
  return cloud;
}

PhaseCloud graph_gradient(const GridFn& fn, const Vec* crop_lo, const Vec* crop_hi) {
  const GridSpec& g = fn.grid;
  PhaseCloud cloud;
  cloud.dim = g.dim;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.unflatten(i);
    bool interior = true;
    for (int a = 0; a < g.dim && interior; ++a)
      if (idx[static_cast<std::size_t>(a)] == 0 ||
          idx[static_cast<std::size_t>(a)] == g.n[static_cast<std::size_t>(a)] - 1)
        interior = false;
    if (!interior) continue;
    Vec x = g.coord(i);
    if (crop_lo && crop_hi) {
      bool inside = true;
      for (int a = 0; a < g.dim; ++a)
        if (x[a] < (*crop_lo)[a] - 1e-12 || x[a] > (*crop_hi)[a] + 1e-12) inside = false;
      if (!inside) continue;
    }
    Vec p(g.dim);
    for (int a = 0; a < g.dim; ++a) {
      auto ip = idx, im = idx;
      ip[static_cast<std::size_t>(a)] += 1;
      im[static_cast<std::size_t>(a)] -= 1;
      p[a] = (fn.at(g.flatten(ip)) - fn.at(g.flatten(im))) / (2.0 * g.h);
    }
    cloud.push_back(x, p);
  }
  return cloud;
}

PhaseCloud flow_cloud(const TonelliSystem& sys, double t1, double t2, const PhaseCloud& cloud,
                      int steps) {
  PhaseCloud out;
  out.dim = cloud.dim;
  out.x.resize(cloud.size());
  out.p.resize(cloud.size());
  FlowOptions fopt;
  fopt.steps = steps;
  parallel_for(cloud.size(), [&](std::size_t a, std::size_t b) {
    for (std::size_t i = a; i < b; ++i) {
      FlowResult r = hamiltonian_flow(sys, t1, t2, cloud.x[i], cloud.p[i], fopt);
      out.x[i] = r.end.x;
      out.p[i] = r.end.p;
    }
  });
  return out;
}

namespace {

KdTree::Point embed(const Vec& x, const Vec& p, int dim) {
  KdTree::Point q{};
  for (int a = 0; a < dim; ++a) {
    q[static_cast<std::size_t>(a)] = x[a];
    q[static_cast<std::size_t>(dim + a)] = p[a];
  }
  return q;
}

// sup over points of `from` of the distance to `to`
double directed_hausdorff(const PhaseCloud& from, const PhaseCloud& to, const Domain& dom) {
  if (from.size() == 0) return 0;
  if (to.size() == 0) fail(Err::EmptyCloud, "hausdorff target cloud is empty");
  const int d = from.dim;

  // torus base coordinates enter the tree wrapped plus one period shift each
  // way, so wrapped queries always see the shortest lift
  std::vector<KdTree::Point> pts;
  std::vector<Vec> shifts;
  if (dom.kind == Domain::Kind::Torus) {
    std::array<int, 3> c{1, 1, 1};
    for (int a = 0; a < d; ++a) c[static_cast<std::size_t>(a)] = 3;
    for (int i = 0; i < c[0]; ++i)
      for (int j = 0; j < c[1]; ++j)
        for (int k = 0; k < c[2]; ++k) {
          Vec s(d);
          int off[3] = {i - 1, j - 1, k - 1};
          for (int a = 0; a < d; ++a) s[a] = off[a] * dom.period[a];
          shifts.push_back(s);
        }
  } else {
    shifts.push_back(Vec(d));
  }
  pts.reserve(to.size() * shifts.size());
  for (std::size_t i = 0; i < to.size(); ++i) {
    Vec base = dom.kind == Domain::Kind::Torus ? dom.wrap(to.x[i]) : to.x[i];
    for (const Vec& s : shifts) pts.push_back(embed(base + s, to.p[i], d));
  }
  KdTree tree(std::move(pts), 2 * d);

  std::vector<double> dist2(from.size());
  parallel_for(from.size(), [&](std::size_t a, std::size_t b) {
    for (std::size_t i = a; i < b; ++i) {
      Vec base = dom.kind == Domain::Kind::Torus ? dom.wrap(from.x[i]) : from.x[i];
      dist2[i] = tree.nearest_dist2(embed(base, from.p[i], d));
    }
  });
  double worst = 0;
  for (double v : dist2) worst = std::max(worst, v);
  return std::sqrt(worst);
}

}  // namespace

HausdorffReport hausdorff_distance(const PhaseCloud& a, const PhaseCloud& b, const Domain& dom) {
  if (a.dim != b.dim) fail(Err::InvalidArgument, "hausdorff clouds have different dimensions");
  HausdorffReport rep;
  rep.ab = directed_hausdorff(a, b, dom);
  rep.ba = directed_hausdorff(b, a, dom);
  rep.sym = std::max(rep.ab, rep.ba);
  return rep;
}

PseudographMatch verify_pseudograph_identity(const TonelliSystem& sys,
                                             const MarginalFunction& phi, double t1, double t2,
                                             const GridSpec& window,
                                             const PseudographMatchOptions& opt) {
  double dt = t2 - t1;
  if (!(dt > 0)) fail(Err::InvalidArgument, "pseudograph comparison needs t2 > t1");
  double c = phi.hessian_bound();
  if (c > 0 && dt >= 1.0 / c)
    fail(Err::CriticalTimeExceeded,
         "gap %g reaches the breakdown time %g of a datum with curvature bound %g", dt, 1.0 / c,
         c);

  double margin = opt.inflate;
  if (margin < 0) {
    LocalizationBound lb = maximizer_radius(sys, datum_lipschitz(phi), t1, t2);
    margin = lb.lambda * dt + 5.0 * window.h;
  }
  GridSpec evolve_window = window.inflated(margin);
  if (phi.domain().kind == Domain::Kind::Box) {
    // trim the inflated grid to the domain, keeping node alignment
    GridSpec g = evolve_window;
    for (int a = 0; a < g.dim; ++a) {
      int i_lo = std::max(
          0, static_cast<int>(std::ceil((phi.domain().lower[a] - g.lo[a]) / g.h - 1e-9)));
      int i_hi = std::min(g.n[static_cast<std::size_t>(a)] - 1,
                          static_cast<int>(std::floor(
                              (phi.domain().upper[a] - g.lo[a]) / g.h + 1e-9)));
      if (i_hi < i_lo) fail(Err::OutOfDomain, "evolution window left the domain");
      g.lo[a] = g.lo[a] + i_lo * g.h;
      g.n[static_cast<std::size_t>(a)] = i_hi - i_lo + 1;
    }
    evolve_window = g;
  }

  EvolvedGrid evolved = evolve_grid(sys, phi, t1, t2, evolve_window, true, opt.evolve);
  C11Certificate cert = c11_certificate(evolved.fn, opt.c11_cap);
  if (!cert.pass)
    fail(Err::CriticalTimeExceeded,
         "evolved function failed the curvature certificate (%g outside +-%g)",
         std::max(cert.upper, -cert.lower), opt.c11_cap);

  PhaseCloud graph = graph_gradient(evolved.fn);
  int steps = opt.flow_steps > 0
                  ? opt.flow_steps
                  : std::max(8, static_cast<int>(std::ceil(dt / 0.01 - 1e-9)));
  PhaseCloud flowed_all = flow_cloud(sys, t1, t2, graph, steps);

  // keep flowed points over the comparison window (half-cell slack)
  PhaseCloud flowed;
  flowed.dim = flowed_all.dim;
  Vec w_lo = window.lo, w_hi = window.upper();
  double slack = 0.5 * window.h;
  for (std::size_t i = 0; i < flowed_all.size(); ++i) {
    Vec base = phi.domain().kind == Domain::Kind::Torus ? phi.domain().wrap(flowed_all.x[i])
                                                        : flowed_all.x[i];
    bool inside = true;
    for (int a = 0; a < window.dim; ++a)
      if (base[a] < w_lo[a] - slack || base[a] > w_hi[a] + slack) inside = false;
    if (inside) flowed.push_back(flowed_all.x[i], flowed_all.p[i]);
  }

  PhaseCloud pseudo = sample_pseudograph(phi, window, opt.fiber);
  HausdorffReport rep = hausdorff_distance(flowed, pseudo, phi.domain());

  PseudographMatch match;
  match.t1 = t1;
  match.t2 = t2;
  match.grid_h = window.h;
  match.directed_flowed = rep.ab;
  match.directed_pseudo = rep.ba;
  match.hausdorff = rep.sym;
  match.cloud_flowed = flowed.size();
  match.cloud_pseudo = pseudo.size();
  match.tol = opt.tol;
  match.symmetric_required = opt.require_symmetric;
  match.pass = rep.ab <= opt.tol && (!opt.require_symmetric || rep.ba <= opt.tol);
  return match;
}

FiberSeparation fiber_separation(const TonelliSystem& sys, const MarginalFunction& phi, double t1,
                                 double t2, const Vec& x, int max_samples) {
  if (!(t2 > t1)) fail(Err::InvalidArgument, "fiber_separation needs t2 > t1");
  Polytope dplus = phi.superdifferential(x);
  std::vector<Vec> momenta =
      dplus.affine_dim == 0 ? dplus.vertices : polytope_lattice(dplus, max_samples, nullptr);

  FiberSeparation sep;
  sep.samples = static_cast<int>(momenta.size());
  if (momenta.size() < 2) {
    sep.min_ratio = std::numeric_limits<double>::infinity();
    return sep;
  }
  std::vector<Vec> bases(momenta.size());
  for (std::size_t i = 0; i < momenta.size(); ++i) {
    FlowResult r = hamiltonian_flow(sys, t2, t1, x, momenta[i]);
    bases[i] = r.end.x;
  }
  double dt = t2 - t1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < momenta.size(); ++i)
    for (std::size_t j = i + 1; j < momenta.size(); ++j) {
      double dp = dist(momenta[i], momenta[j]);
      if (dp < 1e-12) continue;
      best = std::min(best, phi.domain().distance(bases[i], bases[j]) / (dt * dp));
    }
  sep.min_ratio = best;
  return sep;
}

}  // namespace sconclab
