#include "geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace sconclab {

Vec operator+(const Vec& a, const Vec& b) {
  Vec r(a.d);
  for (int i = 0; i < a.d; ++i) r[i] = a[i] + b[i];
  return r;
}
Vec operator-(const Vec& a, const Vec& b) {
  Vec r(a.d);
  for (int i = 0; i < a.d; ++i) r[i] = a[i] - b[i];
  return r;
}
Vec operator*(double s, const Vec& a) {
  Vec r(a.d);
  for (int i = 0; i < a.d; ++i) r[i] = s * a[i];
  return r;
}
Vec operator-(const Vec& a) { return -1.0 * a; }
double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (int i = 0; i < a.d; ++i) s += a[i] * b[i];
  return s;
}
double norm2(const Vec& a) { return dot(a, a); }
double norm(const Vec& a) { return std::sqrt(norm2(a)); }
double dist(const Vec& a, const Vec& b) { return norm(a - b); }
Vec normalized(const Vec& a) {
  double n = norm(a);
  if (n == 0.0) fail(Err::InvalidArgument, "cannot normalize a zero vector");
  return (1.0 / n) * a;
}
bool approx_eq(const Vec& a, const Vec& b, double tol) {
  if (a.d != b.d) return false;
  return dist(a, b) <= tol;
}

Mat operator+(const Mat& a, const Mat& b) {
  Mat r(a.d);
  for (int i = 0; i < a.d * a.d; ++i) r.m[i] = a.m[i] + b.m[i];
  return r;
}
Mat operator-(const Mat& a, const Mat& b) {
  Mat r(a.d);
  for (int i = 0; i < a.d * a.d; ++i) r.m[i] = a.m[i] - b.m[i];
  return r;
}
Mat operator*(double s, const Mat& a) {
  Mat r(a.d);
  for (int i = 0; i < a.d * a.d; ++i) r.m[i] = s * a.m[i];
  return r;
}
Mat operator*(const Mat& a, const Mat& b) {
  Mat r(a.d);
  for (int i = 0; i < a.d; ++i)
    for (int j = 0; j < a.d; ++j) {
      double s = 0;
      for (int k = 0; k < a.d; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}
Vec operator*(const Mat& a, const Vec& x) {
  Vec r(a.d);
  for (int i = 0; i < a.d; ++i) {
    double s = 0;
    for (int k = 0; k < a.d; ++k) s += a(i, k) * x[k];
    r[i] = s;
  }
  return r;
}
Mat transpose(const Mat& a) {
  Mat r(a.d);
  for (int i = 0; i < a.d; ++i)
    for (int j = 0; j < a.d; ++j) r(i, j) = a(j, i);
  return r;
}
double frob_norm(const Mat& a) {
  double s = 0;
  for (int i = 0; i < a.d * a.d; ++i) s += a.m[i] * a.m[i];
  return std::sqrt(s);
}

Vec solve(const Mat& a, const Vec& b) {
  int n = a.d;
  Mat w = a;
  Vec x = b;
  std::array<int, 3> perm{0, 1, 2};
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(w(r, col)) > std::fabs(w(piv, col))) piv = r;
    if (std::fabs(w(piv, col)) < 1e-300)
      fail(Err::NoConvergence, "singular linear system (pivot %g)", w(piv, col));
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(w(piv, j), w(col, j));
      std::swap(x[piv], x[col]);
      std::swap(perm[piv], perm[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      double f = w(r, col) / w(col, col);
      for (int j = col; j < n; ++j) w(r, j) -= f * w(col, j);
      x[r] -= f * x[col];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < n; ++j) s -= w(i, j) * x[j];
    x[i] = s / w(i, i);
  }
  return x;
}

bool is_spd(const Mat& a, double tol) {
  int n = a.d;
  Mat l(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= tol) return false;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return true;
}

std::array<double, 3> sym_eigenvalues(const Mat& a) {
  int n = a.d;
  Mat w = a;
  // symmetrize to absorb round-off in callers
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = 0.5 * (w(i, j) + w(j, i));
      w(i, j) = w(j, i) = v;
    }
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += w(i, j) * w(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::fabs(w(p, q)) < 1e-300) continue;
        double theta = (w(q, q) - w(p, p)) / (2.0 * w(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          double wkp = w(k, p), wkq = w(k, q);
          w(k, p) = c * wkp - s * wkq;
          w(k, q) = s * wkp + c * wkq;
        }
        for (int k = 0; k < n; ++k) {
          double wpk = w(p, k), wqk = w(q, k);
          w(p, k) = c * wpk - s * wqk;
          w(q, k) = s * wpk + c * wqk;
        }
      }
  }
  std::array<double, 3> ev{0, 0, 0};
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = w(i, i);
  std::sort(ev.begin(), ev.begin() + n);
  return ev;
}

double min_eigenvalue_sym(const Mat& a) { return sym_eigenvalues(a)[0]; }

AffineSpan affine_span(const std::vector<Vec>& pts, double rel_tol) {
  if (pts.empty()) fail(Err::InvalidArgument, "affine_span of empty point set");
  AffineSpan out;
  out.origin = pts[0];
  int d = pts[0].d;
  std::vector<Vec> res;
  res.reserve(pts.size());
  double max0 = 0;
  for (const Vec& p : pts) {
    res.push_back(p - out.origin);
    max0 = std::max(max0, norm(res.back()));
  }
  if (max0 == 0.0) return out;
  // pivoted Gram-Schmidt; pivot norms play the role of singular values
  double floor_tol = std::max(rel_tol * max0, 1e-14 * (1.0 + max0));
  for (int k = 0; k < d; ++k) {
    std::size_t best = 0;
    double bestn = -1;
    for (std::size_t i = 0; i < res.size(); ++i) {
      double n = norm(res[i]);
      if (n > bestn) {
        bestn = n;
        best = i;
      }
    }
    if (bestn <= floor_tol) break;
    Vec e = (1.0 / bestn) * res[best];
    out.basis[static_cast<std::size_t>(out.rank++)] = e;
    for (Vec& r : res) r = r - dot(r, e) * e;
  }
  return out;
}

namespace {

double cross2(const std::array<double, 3>& o, const std::array<double, 3>& a,
              const std::array<double, 3>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Monotone chain over 2d local coordinates; returns indices in ccw order.
std::vector<std::size_t> hull2d(const std::vector<std::array<double, 3>>& pts, double eps) {
  std::vector<std::size_t> idx(pts.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a][0] != pts[b][0]) return pts[a][0] < pts[b][0];
    return pts[a][1] < pts[b][1];
  });
  std::vector<std::size_t> h(2 * idx.size());
  std::size_t k = 0;
  for (std::size_t ii = 0; ii < idx.size(); ++ii) {
    std::size_t i = idx[ii];
    while (k >= 2 && cross2(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= eps) --k;
    h[k++] = i;
  }
  std::size_t lower = k + 1;
  for (std::size_t ii = idx.size(); ii-- > 0;) {
    std::size_t i = idx[ii];
    while (k >= lower && cross2(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= eps) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  return h;
}

struct Tri {
  int a, b, c;
  std::array<double, 3> n;  // outward normal, not normalized
  double off;               // n . vertex
};

std::array<double, 3> sub3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
std::array<double, 3> cross3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Tri make_tri(const std::vector<std::array<double, 3>>& p, int a, int b, int c,
             const std::array<double, 3>& interior) {
  Tri t{a, b, c, {}, 0};
  t.n = cross3(sub3(p[static_cast<std::size_t>(b)], p[static_cast<std::size_t>(a)]),
               sub3(p[static_cast<std::size_t>(c)], p[static_cast<std::size_t>(a)]));
  t.off = dot3(t.n, p[static_cast<std::size_t>(a)]);
  if (dot3(t.n, interior) > t.off) {
    std::swap(t.b, t.c);
    t.n = {-t.n[0], -t.n[1], -t.n[2]};
    t.off = -t.off;
  }
  return t;
}

// Incremental convex hull in 3d. Assumes the point set has affine rank 3.
std::vector<Tri> hull3d(const std::vector<std::array<double, 3>>& p, double eps) {
  const std::size_t n = p.size();
  // initial tetrahedron from extreme points
  std::size_t i0 = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (p[i] < p[i0]) i0 = i;
  std::size_t i1 = i0;
  double best = -1;
  for (std::size_t i = 0; i < n; ++i) {
    auto d3 = sub3(p[i], p[i0]);
    double v = dot3(d3, d3);
    if (v > best) { best = v; i1 = i; }
  }
  std::size_t i2 = i0;
  best = -1;
  auto e01 = sub3(p[i1], p[i0]);
  for (std::size_t i = 0; i < n; ++i) {
    auto c = cross3(e01, sub3(p[i], p[i0]));
    double v = dot3(c, c);
    if (v > best) { best = v; i2 = i; }
  }
  std::size_t i3 = i0;
  best = -1;
  auto nrm = cross3(e01, sub3(p[i2], p[i0]));
  for (std::size_t i = 0; i < n; ++i) {
    double v = std::fabs(dot3(nrm, sub3(p[i], p[i0])));
    if (v > best) { best = v; i3 = i; }
  }
  std::array<double, 3> interior{
      (p[i0][0] + p[i1][0] + p[i2][0] + p[i3][0]) / 4.0,
      (p[i0][1] + p[i1][1] + p[i2][1] + p[i3][1]) / 4.0,
      (p[i0][2] + p[i1][2] + p[i2][2] + p[i3][2]) / 4.0};
  std::vector<Tri> faces;
  int a = static_cast<int>(i0), b = static_cast<int>(i1), c = static_cast<int>(i2),
      dd = static_cast<int>(i3);
  faces.push_back(make_tri(p, a, b, c, interior));
  faces.push_back(make_tri(p, a, b, dd, interior));
  faces.push_back(make_tri(p, a, c, dd, interior));
  faces.push_back(make_tri(p, b, c, dd, interior));

  for (std::size_t i = 0; i < n; ++i) {
    if (i == i0 || i == i1 || i == i2 || i == i3) continue;
    std::vector<std::size_t> visible;
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (dot3(faces[f].n, p[i]) - faces[f].off > eps) visible.push_back(f);
    if (visible.empty()) continue;
    // horizon = undirected edges used exactly once among visible faces
    std::map<std::pair<int, int>, std::pair<int, int>> edges;  // sorted -> directed
    for (std::size_t f : visible) {
      const Tri& t = faces[f];
      const std::array<std::pair<int, int>, 3> es{{{t.a, t.b}, {t.b, t.c}, {t.c, t.a}}};
      for (auto [u, v] : es) {
        auto key = std::minmax(u, v);
        auto it = edges.find(key);
        if (it == edges.end()) edges.emplace(key, std::make_pair(u, v));
        else edges.erase(it);
      }
    }
    std::vector<Tri> next;
    next.reserve(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (std::find(visible.begin(), visible.end(), f) == visible.end())
        next.push_back(faces[f]);
    for (const auto& [key, e] : edges)
      next.push_back(make_tri(p, e.first, e.second, static_cast<int>(i), interior));
    faces = std::move(next);
  }
  return faces;
}

double point_segment_dist2_2d(const std::array<double, 3>& q, const std::array<double, 3>& a,
                              const std::array<double, 3>& b) {
  double ux = b[0] - a[0], uy = b[1] - a[1];
  double wx = q[0] - a[0], wy = q[1] - a[1];
  double len2 = ux * ux + uy * uy;
  double t = len2 > 0 ? std::clamp((wx * ux + wy * uy) / len2, 0.0, 1.0) : 0.0;
  double dx = wx - t * ux, dy = wy - t * uy;
  return dx * dx + dy * dy;
}

// Closest-point distance from q to triangle abc in 3d (region classification).
double point_triangle_dist(const std::array<double, 3>& q, const std::array<double, 3>& a,
                           const std::array<double, 3>& b, const std::array<double, 3>& c) {
  auto ab = sub3(b, a), ac = sub3(c, a), aq = sub3(q, a);
  double d1 = dot3(ab, aq), d2 = dot3(ac, aq);
  if (d1 <= 0 && d2 <= 0) return std::sqrt(dot3(aq, aq));
  auto bq = sub3(q, b);
  double d3 = dot3(ab, bq), d4 = dot3(ac, bq);
  if (d3 >= 0 && d4 <= d3) return std::sqrt(dot3(bq, bq));
  double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    double v = d1 / (d1 - d3);
    std::array<double, 3> pt{a[0] + v * ab[0], a[1] + v * ab[1], a[2] + v * ab[2]};
    auto dq = sub3(q, pt);
    return std::sqrt(dot3(dq, dq));
  }
  auto cq = sub3(q, c);
  double d5 = dot3(ab, cq), d6 = dot3(ac, cq);
  if (d6 >= 0 && d5 <= d6) return std::sqrt(dot3(cq, cq));
  double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    double w = d2 / (d2 - d6);
    std::array<double, 3> pt{a[0] + w * ac[0], a[1] + w * ac[1], a[2] + w * ac[2]};
    auto dq = sub3(q, pt);
    return std::sqrt(dot3(dq, dq));
  }
  double va = d3 * d6 - d5 * d4;
  if (va <= 0 && d4 - d3 >= 0 && d5 - d6 >= 0) {
    double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    std::array<double, 3> pt{b[0] + w * (c[0] - b[0]), b[1] + w * (c[1] - b[1]),
                             b[2] + w * (c[2] - b[2])};
    auto dq = sub3(q, pt);
    return std::sqrt(dot3(dq, dq));
  }
  double denom = 1.0 / (va + vb + vc);
  double v = vb * denom, w = vc * denom;
  std::array<double, 3> pt{a[0] + v * ab[0] + w * ac[0], a[1] + v * ab[1] + w * ac[1],
                           a[2] + v * ab[2] + w * ac[2]};
  auto dq = sub3(q, pt);
  return std::sqrt(dot3(dq, dq));
}

}  // namespace

Polytope polytope_from_points(const std::vector<Vec>& pts, double rank_rel_tol) {
  if (pts.empty()) fail(Err::InvalidArgument, "polytope_from_points: empty point set");
  int d = pts[0].d;
  double scale = 0;
  for (const Vec& p : pts) scale = std::max(scale, norm(p));
  double dedupe_tol = 1e-12 * (1.0 + scale);
  std::vector<Vec> uniq;
  uniq.reserve(pts.size());
  for (const Vec& p : pts) {
    bool seen = false;
    for (const Vec& u : uniq)
      if (approx_eq(p, u, dedupe_tol)) { seen = true; break; }
    if (!seen) uniq.push_back(p);
  }

  Polytope out;
  out.ambient_dim = d;
  out.span = affine_span(uniq, rank_rel_tol);
  out.affine_dim = out.span.rank;

  auto to_local = [&](const Vec& p) {
    std::array<double, 3> u{0, 0, 0};
    Vec r = p - out.span.origin;
    for (int k = 0; k < out.span.rank; ++k)
      u[static_cast<std::size_t>(k)] = dot(r, out.span.basis[static_cast<std::size_t>(k)]);
    return u;
  };

  if (out.affine_dim == 0) {
    out.vertices = {uniq[0]};
    out.local = {{0, 0, 0}};
    return out;
  }

  std::vector<std::array<double, 3>> loc;
  loc.reserve(uniq.size());
  for (const Vec& p : uniq) loc.push_back(to_local(p));

  if (out.affine_dim == 1) {
    std::size_t imin = 0, imax = 0;
    for (std::size_t i = 1; i < loc.size(); ++i) {
      if (loc[i][0] < loc[imin][0]) imin = i;
      if (loc[i][0] > loc[imax][0]) imax = i;
    }
    out.vertices = {uniq[imin], uniq[imax]};
    out.local = {loc[imin], loc[imax]};
    return out;
  }

  double span_scale = 0;
  for (const auto& u : loc)
    span_scale = std::max({span_scale, std::fabs(u[0]), std::fabs(u[1]), std::fabs(u[2])});

  if (out.affine_dim == 2) {
    double eps = 1e-12 * span_scale * span_scale;
    auto hull = hull2d(loc, eps);
    for (std::size_t i : hull) {
      out.vertices.push_back(uniq[i]);
      out.local.push_back(loc[i]);
    }
    return out;
  }

  // affine_dim == 3
  double eps = 1e-10 * span_scale;
  auto faces = hull3d(loc, eps);
  std::vector<int> remap(uniq.size(), -1);
  for (const Tri& t : faces)
    for (int v : {t.a, t.b, t.c})
      if (remap[static_cast<std::size_t>(v)] < 0) {
        remap[static_cast<std::size_t>(v)] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(uniq[static_cast<std::size_t>(v)]);
        out.local.push_back(loc[static_cast<std::size_t>(v)]);
      }
  for (const Tri& t : faces)
    out.faces.push_back({remap[static_cast<std::size_t>(t.a)], remap[static_cast<std::size_t>(t.b)],
                         remap[static_cast<std::size_t>(t.c)]});
  return out;
}

double Polytope::distance(const Vec& q) const {
  if (vertices.empty()) fail(Err::InvalidArgument, "distance to empty polytope");
  Vec r = q - span.origin;
  std::array<double, 3> u{0, 0, 0};
  Vec inplane(q.d, 0.0);
  for (int k = 0; k < span.rank; ++k) {
    u[static_cast<std::size_t>(k)] = dot(r, span.basis[static_cast<std::size_t>(k)]);
    inplane = inplane + u[static_cast<std::size_t>(k)] * span.basis[static_cast<std::size_t>(k)];
  }
  double w2 = norm2(r - inplane);

  if (affine_dim == 0) return std::sqrt(norm2(r));
  if (affine_dim == 1) {
    double lo = std::min(local[0][0], local[1][0]);
    double hi = std::max(local[0][0], local[1][0]);
    double t = std::clamp(u[0], lo, hi);
    double dx = u[0] - t;
    return std::sqrt(dx * dx + w2);
  }
  if (affine_dim == 2) {
    // vertices are in ccw order: inside iff left of every edge
    bool inside = true;
    double edge2 = std::numeric_limits<double>::infinity();
    const std::size_t n = local.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = local[i];
      const auto& b = local[(i + 1) % n];
      if (cross2(a, b, u) < 0) inside = false;
      edge2 = std::min(edge2, point_segment_dist2_2d(u, a, b));
    }
    double in2 = inside ? 0.0 : edge2;
    return std::sqrt(in2 + w2);
  }
  // affine_dim == 3 (ambient is 3, so w2 == 0)
  bool inside = true;
  for (const auto& f : faces) {
    const auto& a = local[static_cast<std::size_t>(f[0])];
    const auto& b = local[static_cast<std::size_t>(f[1])];
    const auto& c = local[static_cast<std::size_t>(f[2])];
    auto nn = cross3(sub3(b, a), sub3(c, a));
    if (dot3(nn, sub3(u, a)) > 0) inside = false;
  }
  if (inside) return std::sqrt(w2);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : faces)
    best = std::min(best, point_triangle_dist(u, local[static_cast<std::size_t>(f[0])],
                                              local[static_cast<std::size_t>(f[1])],
                                              local[static_cast<std::size_t>(f[2])]));
  return std::sqrt(best * best + w2);
}

bool Polytope::contains(const Vec& q, double tol) const { return distance(q) <= tol; }

std::vector<Vec> polytope_lattice(const Polytope& p, int max_points, double* spacing_out) {
  if (max_points < 1) fail(Err::InvalidArgument, "polytope_lattice: max_points must be positive");
  std::vector<Vec> out = p.vertices;
  double spacing = 0.0;
  int budget = max_points - static_cast<int>(out.size());

  if (p.affine_dim == 1 && budget > 0) {
    Vec a = p.vertices[0], b = p.vertices[1];
    int n = budget;
    spacing = dist(a, b) / (n + 1);
    for (int i = 1; i <= n; ++i) out.push_back(a + (static_cast<double>(i) / (n + 1)) * (b - a));
  } else if (p.affine_dim >= 2 && budget > 0) {
    std::array<double, 3> lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (const auto& u : p.local)
      for (int k = 0; k < p.affine_dim; ++k) {
        lo[static_cast<std::size_t>(k)] = std::min(lo[static_cast<std::size_t>(k)], u[static_cast<std::size_t>(k)]);
        hi[static_cast<std::size_t>(k)] = std::max(hi[static_cast<std::size_t>(k)], u[static_cast<std::size_t>(k)]);
      }
    double vol = 1;
    for (int k = 0; k < p.affine_dim; ++k)
      vol *= std::max(hi[static_cast<std::size_t>(k)] - lo[static_cast<std::size_t>(k)], 1e-300);
    double s = std::pow(vol / budget, 1.0 / p.affine_dim);
    for (int attempt = 0; attempt < 64; ++attempt) {
      std::vector<Vec> lattice;
      std::array<int, 3> counts{1, 1, 1};
      bool overflow = false;
      for (int k = 0; k < p.affine_dim; ++k) {
        double len = hi[static_cast<std::size_t>(k)] - lo[static_cast<std::size_t>(k)];
        counts[static_cast<std::size_t>(k)] = static_cast<int>(std::floor(len / s)) + 1;
        if (counts[static_cast<std::size_t>(k)] > 4 * max_points) overflow = true;
      }
      if (!overflow) {
        double tol = 1e-9 * (1.0 + s);
        for (int i = 0; i < counts[0]; ++i)
          for (int j = 0; j < counts[1]; ++j)
            for (int k = 0; k < counts[2]; ++k) {
              std::array<double, 3> u{lo[0] + i * s, lo[1] + j * s, lo[2] + k * s};
              Vec q = p.span.origin;
              for (int m = 0; m < p.affine_dim; ++m)
                q = q + u[static_cast<std::size_t>(m)] * p.span.basis[static_cast<std::size_t>(m)];
              if (p.contains(q, tol)) lattice.push_back(q);
              if (static_cast<int>(lattice.size()) > budget) goto grow;
            }
        spacing = s;
        for (const Vec& q : lattice) out.push_back(q);
        break;
      }
    grow:
      s *= 1.25;
    }
  }
  if (spacing_out) *spacing_out = spacing;
  return out;
}

KdTree::KdTree(std::vector<Point> pts, int dim) : pts_(std::move(pts)), dim_(dim) {
  if (pts_.empty()) fail(Err::EmptyCloud, "kd-tree over empty point set");
  nodes_.reserve(2 * pts_.size() / 8 + 4);
  nodes_.push_back({});
  build(0, pts_.size(), 0, 0);
}

void KdTree::build(std::size_t begin, std::size_t end, int node, int depth) {
  if (end - begin <= 8) {
    nodes_[static_cast<std::size_t>(node)].axis = -1;
    nodes_[static_cast<std::size_t>(node)].begin = begin;
    nodes_[static_cast<std::size_t>(node)].end = end;
    return;
  }
  int axis = depth % dim_;
  std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(pts_.begin() + static_cast<std::ptrdiff_t>(begin),
                   pts_.begin() + static_cast<std::ptrdiff_t>(mid),
                   pts_.begin() + static_cast<std::ptrdiff_t>(end),
                   [axis](const Point& a, const Point& b) {
                     return a[static_cast<std::size_t>(axis)] < b[static_cast<std::size_t>(axis)];
                   });
  // the split plane is frozen here; deeper recursion reorders pts_ again, and
  // push_back below may reallocate nodes_, so index rather than hold references
  nodes_[static_cast<std::size_t>(node)].axis = axis;
  nodes_[static_cast<std::size_t>(node)].split =
      pts_[mid][static_cast<std::size_t>(axis)];
  int left = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  nodes_[static_cast<std::size_t>(node)].left = left;
  build(begin, mid, left, depth + 1);
  int right = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  nodes_[static_cast<std::size_t>(node)].right = right;
  build(mid, end, right, depth + 1);
}

void KdTree::query(int node, const Point& q, double& best) const {
  const Node& nd = nodes_[static_cast<std::size_t>(node)];
  if (nd.axis < 0) {
    for (std::size_t i = nd.begin; i < nd.end; ++i) {
      double s = 0;
      for (int k = 0; k < dim_; ++k) {
        double dx = q[static_cast<std::size_t>(k)] - pts_[i][static_cast<std::size_t>(k)];
        s += dx * dx;
      }
      best = std::min(best, s);
    }
    return;
  }
  double dq = q[static_cast<std::size_t>(nd.axis)] - nd.split;
  int first = dq < 0 ? nd.left : nd.right;
  int second = dq < 0 ? nd.right : nd.left;
  query(first, q, best);
  if (dq * dq < best) query(second, q, best);
}

double KdTree::nearest_dist2(const Point& q) const {
  double best = std::numeric_limits<double>::infinity();
  query(0, q, best);
  return best;
}

}  // namespace sconclab
