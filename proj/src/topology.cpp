#include "topology.hpp"

#include <algorithm>
#include <cmath>

namespace sconclab {

namespace {

// Bisects [xa, xb] on the predicate "active set equals the one at xa" and
// returns a point on the boundary of xa's region. The result lies within
// 2^-45 edge lengths of an actual active-set change.
Vec locate_crossing(const MarginalFunction& phi, Vec xa, Vec xb,
                    const std::vector<std::size_t>& act_a, double tie_tol) {
  for (int it = 0; it < 45; ++it) {
    Vec mid = 0.5 * (xa + xb);
    if (phi.active_set(mid, tie_tol) == act_a)
      xa = mid;
    else
      xb = mid;
  }
  return 0.5 * (xa + xb);
}

struct NodeScan {
  std::vector<int> labels;
  std::vector<std::vector<std::size_t>> acts;
};

NodeScan scan_nodes(const MarginalFunction& phi, const GridSpec& window, double tie_tol,
                    bool want_labels) {
  NodeScan scan;
  scan.acts.resize(window.size());
  if (want_labels) scan.labels.assign(window.size(), 0);
  parallel_for(window.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Vec x = window.coord(i);
      scan.acts[i] = phi.active_set(x, tie_tol);
      if (want_labels) scan.labels[i] = phi.stratum_dimension(x, tie_tol);
    }
  });
  return scan;
}

// Grid edges whose endpoints have different active sets, in flat-index order.
std::vector<std::pair<std::size_t, std::size_t>> crossing_edges(const GridSpec& window,
                                                                const NodeScan& scan) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < window.size(); ++i) {
    auto idx = window.unflatten(i);
    for (int ax = 0; ax < window.dim; ++ax) {
      auto nb = idx;
      ++nb[static_cast<std::size_t>(ax)];
      if (!window.in_bounds(nb)) continue;
      std::size_t j = window.flatten(nb);
      if (scan.acts[i] != scan.acts[j]) edges.emplace_back(i, j);
    }
  }
  return edges;
}

void check_window(const MarginalFunction& phi, const GridSpec& window) {
  if (window.dim != phi.dim())
    fail(Err::InvalidArgument, "window dimension %d does not match function dimension %d",
         window.dim, phi.dim());
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
  }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

StrataGrid classify_grid(const MarginalFunction& phi, const GridSpec& window,
                         double tie_tol) {
  check_window(phi, window);
  NodeScan scan = scan_nodes(phi, window, tie_tol, true);

  StrataGrid out;
  out.grid = window;
  out.labels = std::move(scan.labels);
  out.near_interface.assign(window.size(), 0);
  for (int label : out.labels) {
    if (label < 0 || label > 3) fail(Err::Internal, "stratum label %d out of range", label);
    ++out.counts[static_cast<std::size_t>(label)];
  }

  auto edges = crossing_edges(window, scan);
  std::vector<int> cross_dim(edges.size());
  parallel_for(edges.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t e = lo; e < hi; ++e) {
      auto [i, j] = edges[e];
      Vec cross =
          locate_crossing(phi, window.coord(i), window.coord(j), scan.acts[i], tie_tol);
      cross_dim[e] = phi.stratum_dimension(cross, tie_tol);
    }
  });
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [i, j] = edges[e];
    out.near_interface[i] = std::max(out.near_interface[i], cross_dim[e]);
    out.near_interface[j] = std::max(out.near_interface[j], cross_dim[e]);
  }
  return out;
}

std::vector<Vec> singular_samples(const MarginalFunction& phi, const GridSpec& window,
                                  double tie_tol) {
  check_window(phi, window);
  NodeScan scan = scan_nodes(phi, window, tie_tol, false);

  // Only nodes with a tie can be singular, so the stratum test runs there.
  std::vector<Vec> pts;
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (scan.acts[i].size() < 2) continue;
    Vec x = window.coord(i);
    if (phi.stratum_dimension(x, tie_tol) > 0) pts.push_back(x);
  }

  auto edges = crossing_edges(window, scan);
  std::vector<Vec> crossings(edges.size());
  parallel_for(edges.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t e = lo; e < hi; ++e) {
      auto [i, j] = edges[e];
      crossings[e] =
          locate_crossing(phi, window.coord(i), window.coord(j), scan.acts[i], tie_tol);
    }
  });
  pts.insert(pts.end(), crossings.begin(), crossings.end());
  return pts;
}

DimensionEstimate box_counting_dimension(const std::vector<Vec>& pts, double min_eps,
                                         int max_levels, int fit_levels) {
  if (min_eps <= 0) fail(Err::InvalidArgument, "min_eps must be positive, got %g", min_eps);
  if (fit_levels < 2)
    fail(Err::InvalidArgument, "fit_levels must be at least 2, got %d", fit_levels);
  if (pts.size() < 2)
    fail(Err::DegenerateScales, "box counting needs at least 2 points, got %zu", pts.size());

  int d = pts.front().d;
  Vec lo = pts.front(), hi = pts.front();
  for (const Vec& p : pts)
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  double extent = 0;
  for (int k = 0; k < d; ++k) extent = std::max(extent, hi[k] - lo[k]);
  if (extent <= 0)
    fail(Err::DegenerateScales, "point set has zero extent, cannot form scales");

  DimensionEstimate est;
  est.points = pts.size();
  std::vector<std::uint64_t> keys;
  keys.reserve(pts.size());
  for (int level = 1; level <= max_levels; ++level) {
    double eps = extent / static_cast<double>(std::uint64_t{1} << level);
    if (eps < min_eps) break;
    std::uint64_t cells = (std::uint64_t{1} << level) + 1;
    keys.clear();
    for (const Vec& p : pts) {
      std::uint64_t key = 0;
      for (int k = 0; k < d; ++k) {
        auto ix = static_cast<std::uint64_t>(std::floor((p[k] - lo[k]) / eps));
        if (ix >= cells) ix = cells - 1;
        key = key * cells + ix;
      }
      keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    auto boxes = static_cast<std::size_t>(
        std::distance(keys.begin(), std::unique(keys.begin(), keys.end())));
    est.eps.push_back(eps);
    est.counts.push_back(boxes);
  }
  if (est.eps.size() < 3)
    fail(Err::DegenerateScales, "only %zu scales at or above eps=%g, need 3", est.eps.size(),
         min_eps);

  // Least squares slope of log N against log(1/eps), finest scales only.
  std::size_t first = est.eps.size() > static_cast<std::size_t>(fit_levels)
                          ? est.eps.size() - static_cast<std::size_t>(fit_levels)
                          : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  auto n = static_cast<double>(est.eps.size() - first);
  for (std::size_t i = first; i < est.eps.size(); ++i) {
    double x = -std::log(est.eps[i]);
    double y = std::log(static_cast<double>(est.counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  est.dimension = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return est;
}

ConnectivityReport connectivity_report(const StrataGrid& strata, int max_dim) {
  if (max_dim < 0 || max_dim > 3)
    fail(Err::InvalidArgument, "max_dim must lie in [0,3], got %d", max_dim);
  const GridSpec& window = strata.grid;
  if (strata.labels.size() != window.size() || strata.near_interface.size() != window.size())
    fail(Err::InvalidArgument, "strata grid labels do not match the grid size");

  std::vector<char> mask(window.size());
  for (std::size_t i = 0; i < window.size(); ++i)
    mask[i] = strata.labels[i] <= max_dim && strata.near_interface[i] <= max_dim;

  UnionFind uf(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (!mask[i]) continue;
    auto idx = window.unflatten(i);
    for (int ax = 0; ax < window.dim; ++ax) {
      auto nb = idx;
      ++nb[static_cast<std::size_t>(ax)];
      if (!window.in_bounds(nb)) continue;
      std::size_t j = window.flatten(nb);
      if (mask[j]) uf.unite(i, j);
    }
  }

  ConnectivityReport rep;
  rep.max_dim = max_dim;
  std::vector<std::size_t> root_count(window.size(), 0);
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (!mask[i]) continue;
    ++rep.nodes;
    ++root_count[uf.find(i)];
  }
  for (std::size_t c : root_count)
    if (c > 0) rep.sizes.push_back(c);
  std::sort(rep.sizes.rbegin(), rep.sizes.rend());
  rep.components = rep.sizes.size();
  return rep;
}

BrokenLine broken_line_path(const MarginalFunction& phi, const Vec& a, const Vec& b,
                            const PathOptions& opt) {
  int d = phi.dim();
  if (d < 2) fail(Err::InvalidArgument, "bend sampling needs dimension >= 2, got %d", d);
  if (a.d != d || b.d != d)
    fail(Err::InvalidArgument, "endpoint dimension does not match function dimension %d", d);
  if (opt.tol <= 0) fail(Err::InvalidArgument, "tol must be positive, got %g", opt.tol);
  double len = dist(a, b);
  if (len <= 0) fail(Err::InvalidArgument, "endpoints coincide");

  auto in_high_stratum = [&](const Vec& x) {
    return phi.stratum_dimension(x, opt.tie_tol) >= 2;
  };
  if (in_high_stratum(a) || in_high_stratum(b))
    fail(Err::EndpointsSingular, "an endpoint lies on a stratum of dimension >= 2");

  double spacing = 0.5 * opt.tol;
  int checked = 0;
  auto segment_clear = [&](const Vec& p, const Vec& q) {
    int n = std::max(1, static_cast<int>(std::ceil(dist(p, q) / spacing)));
    for (int i = 1; i < n; ++i) {
      double t = static_cast<double>(i) / n;
      ++checked;
      if (in_high_stratum(p + t * (q - p))) return false;
    }
    return true;
  };

  Vec mid = 0.5 * (a + b);
  double radius = opt.radius > 0 ? opt.radius : 0.25 * len;
  const Domain& dom = phi.domain();
  if (dom.kind == Domain::Kind::Box) {
    for (int k = 0; k < d; ++k) {
      radius = std::min(radius, mid[k] - dom.lower[k]);
      radius = std::min(radius, dom.upper[k] - mid[k]);
    }
    if (radius <= 0) fail(Err::InvalidArgument, "bisector disk collapses at the boundary");
  }
  Vec dir = (1.0 / len) * (b - a);

  // Orthonormal basis of the bisector hyperplane, from the coordinate axes
  // least aligned with dir.
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.begin() + d,
            [&](int i, int j) { return std::fabs(dir[i]) < std::fabs(dir[j]); });
  std::vector<Vec> basis;
  for (int k = 0; k < d - 1; ++k) {
    Vec v(d);
    v[order[static_cast<std::size_t>(k)]] = 1.0;
    v = v - dot(v, dir) * dir;
    for (const Vec& u : basis) v = v - dot(v, u) * u;
    basis.push_back(normalized(v));
  }

  Rng rng(opt.seed);
  for (int t = 1; t <= opt.max_samples; ++t) {
    Vec u(d - 1);
    do {
      for (int k = 0; k < d - 1; ++k) u[k] = rng.uniform(-radius, radius);
    } while (norm2(u) > radius * radius);
    Vec z = mid;
    for (int k = 0; k < d - 1; ++k) z = z + u[k] * basis[static_cast<std::size_t>(k)];

    checked = 0;
    ++checked;
    if (in_high_stratum(z)) continue;
    if (segment_clear(a, z) && segment_clear(z, b)) {
      BrokenLine path;
      path.a = a;
      path.bend = z;
      path.b = b;
      path.tried = t;
      path.samples_checked = checked;
      return path;
    }
  }
  fail(Err::NoPathFound, "no clear bend in %d draws at resolution %g", opt.max_samples,
       opt.tol);
}

}  // namespace sconclab
