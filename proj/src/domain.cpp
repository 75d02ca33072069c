#include "domain.hpp"

#include <cmath>

namespace sconclab {

Domain Domain::box(const Vec& lo, const Vec& hi) {
  if (lo.d != hi.d || lo.d < 1 || lo.d > 3)
    fail(Err::InvalidArgument, "box domain needs matching bounds in dimension 1..3");
  for (int i = 0; i < lo.d; ++i)
    if (!(lo[i] < hi[i]))
      fail(Err::InvalidArgument, "box domain axis %d has empty extent [%g, %g]", i, lo[i], hi[i]);
  Domain d;
  d.kind = Kind::Box;
  d.dim = lo.d;
  d.lower = lo;
  d.upper = hi;
  return d;
}

Domain Domain::cube(int dim, double lo, double hi) {
  return box(Vec(dim, lo), Vec(dim, hi));
}

Domain Domain::torus(const Vec& period) {
  if (period.d < 1 || period.d > 3)
    fail(Err::InvalidArgument, "torus domain needs dimension 1..3");
  for (int i = 0; i < period.d; ++i)
    if (!(period[i] > 0))
      fail(Err::InvalidArgument, "torus period on axis %d must be positive", i);
  Domain d;
  d.kind = Kind::Torus;
  d.dim = period.d;
  d.period = period;
  return d;
}

Domain Domain::torus_cube(int dim, double period) { return torus(Vec(dim, period)); }

bool Domain::contains(const Vec& x, double slack) const {
  if (x.d != dim) return false;
  if (kind == Kind::Torus) return true;
  for (int i = 0; i < dim; ++i) {
    double pad = slack * (1.0 + std::fabs(lower[i]) + std::fabs(upper[i]));
    if (x[i] < lower[i] - pad || x[i] > upper[i] + pad) return false;
  }
  return true;
}

void Domain::require_inside(const Vec& x, const char* what) const {
  if (!contains(x))
    fail(Err::OutOfDomain, "%s: point outside the domain (axis bounds exceeded)", what);
}

Vec Domain::wrap(const Vec& x) const {
  if (kind == Kind::Box) return x;
  Vec out = x;
  for (int i = 0; i < dim; ++i) {
    out[i] = std::fmod(out[i], period[i]);
    if (out[i] < 0) out[i] += period[i];
  }
  return out;
}

Vec Domain::diff(const Vec& a, const Vec& b) const {
  Vec d = b - a;
  if (kind == Kind::Box) return d;
  for (int i = 0; i < dim; ++i) {
    d[i] = std::remainder(d[i], period[i]);
  }
  return d;
}

double Domain::distance(const Vec& a, const Vec& b) const { return norm(diff(a, b)); }

Vec Domain::extent() const {
  Vec e(dim);
  for (int i = 0; i < dim; ++i)
    e[i] = kind == Kind::Box ? upper[i] - lower[i] : period[i];
  return e;
}

GridSpec GridSpec::over(const Vec& lo, const Vec& hi, double h) {
  if (!(h > 0)) fail(Err::InvalidArgument, "grid spacing must be positive, got %g", h);
  GridSpec g;
  g.dim = lo.d;
  g.lo = lo;
  g.h = h;
  for (int i = 0; i < lo.d; ++i) {
    double len = hi[i] - lo[i];
    if (len < 0) fail(Err::InvalidArgument, "grid axis %d has negative extent", i);
    g.n[static_cast<std::size_t>(i)] = static_cast<int>(std::floor(len / h + 1e-9)) + 1;
  }
  return g;
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(n[static_cast<std::size_t>(i)]);
  return s;
}

std::array<int, 3> GridSpec::unflatten(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int i = dim - 1; i >= 0; --i) {
    idx[static_cast<std::size_t>(i)] =
        static_cast<int>(flat % static_cast<std::size_t>(n[static_cast<std::size_t>(i)]));
    flat /= static_cast<std::size_t>(n[static_cast<std::size_t>(i)]);
  }
  return idx;
}

std::size_t GridSpec::flatten(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int i = 0; i < dim; ++i)
    flat = flat * static_cast<std::size_t>(n[static_cast<std::size_t>(i)]) +
           static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
  return flat;
}

bool GridSpec::in_bounds(const std::array<int, 3>& idx) const {
  for (int i = 0; i < dim; ++i)
    if (idx[static_cast<std::size_t>(i)] < 0 ||
        idx[static_cast<std::size_t>(i)] >= n[static_cast<std::size_t>(i)])
      return false;
  return true;
}

Vec GridSpec::coord(std::size_t flat) const {
  auto idx = unflatten(flat);
  Vec x(dim);
  for (int i = 0; i < dim; ++i) x[i] = lo[i] + h * idx[static_cast<std::size_t>(i)];
  return x;
}

Vec GridSpec::upper() const {
  Vec hi(dim);
  for (int i = 0; i < dim; ++i) hi[i] = lo[i] + h * (n[static_cast<std::size_t>(i)] - 1);
  return hi;
}

GridSpec GridSpec::inflated(double margin) const {
  int extra = static_cast<int>(std::ceil(margin / h - 1e-9));
  if (extra < 0) extra = 0;
  GridSpec g = *this;
  for (int i = 0; i < dim; ++i) {
    g.lo[i] = lo[i] - extra * h;
    g.n[static_cast<std::size_t>(i)] = n[static_cast<std::size_t>(i)] + 2 * extra;
  }
  return g;
}

std::array<int, 3> GridSpec::offset_in(const GridSpec& parent) const {
  std::array<int, 3> off{0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    double raw = (lo[i] - parent.lo[i]) / h;
    int o = static_cast<int>(std::lround(raw));
    if (std::fabs(raw - o) > 1e-6)
      fail(Err::Internal, "grids are not node-aligned on axis %d", i);
    off[static_cast<std::size_t>(i)] = o;
  }
  return off;
}

}  // namespace sconclab
