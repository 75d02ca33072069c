#include "semiconcave.hpp"

#include <algorithm>
#include <cmath>

namespace sconclab {

MarginalFunction::MarginalFunction(std::string name, Domain dom, std::vector<Piece> pieces,
                                   double hessian_bound)
    : name_(std::move(name)), dom_(std::move(dom)), pieces_(std::move(pieces)), c_(hessian_bound) {
  if (pieces_.empty()) fail(Err::InvalidArgument, "marginal function needs at least one piece");
  if (c_ < 0) fail(Err::InvalidArgument, "hessian bound must be nonnegative");
}

double MarginalFunction::value(const Vec& x) const {
  dom_.require_inside(x, "evaluate");
  double m = 1e300;
  for (const Piece& p : pieces_) m = std::min(m, p.jet(x).value);
  return m;
}

std::vector<std::size_t> MarginalFunction::active_set(const Vec& x, double tie_tol) const {
  dom_.require_inside(x, "active_set");
  std::vector<double> vals(pieces_.size());
  double m = 1e300;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    vals[i] = pieces_[i].jet(x).value;
    m = std::min(m, vals[i]);
  }
  double tol = tie_tol > 0 ? tie_tol : 1e-9 * (1.0 + std::fabs(m));
  std::vector<std::size_t> act;
  for (std::size_t i = 0; i < pieces_.size(); ++i)
    if (vals[i] <= m + tol) act.push_back(i);
  return act;
}

Polytope MarginalFunction::superdifferential(const Vec& x, double tie_tol,
                                             double rank_rel_tol) const {
  auto act = active_set(x, tie_tol);
  std::vector<Vec> grads;
  grads.reserve(act.size());
  for (std::size_t i : act) grads.push_back(pieces_[i].jet(x).grad);
  return polytope_from_points(grads, rank_rel_tol);
}

std::vector<Vec> MarginalFunction::reachable_gradients(const Vec& x, double radius,
                                                       int samples) const {
  dom_.require_inside(x, "reachable_gradients");
  if (!(radius > 0)) fail(Err::InvalidArgument, "reachable_gradients: radius must be positive");
  const int d = dom_.dim;

  std::vector<Vec> dirs;
  if (d == 1) {
    dirs = {Vec::of({1.0}), Vec::of({-1.0})};
  } else if (d == 2) {
    int n = std::max(8, samples);
    for (int k = 0; k < n; ++k) {
      double a = 2.0 * M_PI * k / n;
      dirs.push_back(Vec::of({std::cos(a), std::sin(a)}));
    }
  } else {
    int n = std::max(32, samples);
    // Fibonacci sphere keeps the direction set deterministic
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / n;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      dirs.push_back(Vec::of({r * std::cos(ga * k), r * std::sin(ga * k), z}));
    }
  }

  std::vector<Vec> grads;
  double scale = 0;
  bool found_differentiable = false;
  for (const Vec& u : dirs) {
    for (int step = 1; step <= 4; ++step) {
      Vec y = x + (radius * step / 4.0) * u;
      if (!dom_.contains(y)) continue;
      auto act = active_set(y);
      if (act.size() != 1) continue;
      found_differentiable = true;
      // the limit of the gradient along y -> x is the piece gradient at x
      Vec g = pieces_[act[0]].jet(x).grad;
      scale = std::max(scale, norm(g));
      bool seen = false;
      for (const Vec& gg : grads)
        if (approx_eq(g, gg, 1e-9 * (1.0 + scale))) { seen = true; break; }
      if (!seen) grads.push_back(g);
    }
  }
  if (!found_differentiable)
    fail(Err::NoDifferentiablePoints,
         "no differentiable sample in a ball of radius %g around the query point", radius);
  return grads;
}

int MarginalFunction::stratum_dimension(const Vec& x, double tie_tol, double rank_rel_tol) const {
  auto act = active_set(x, tie_tol);
  if (act.size() == 1) return 0;
  std::vector<Vec> grads;
  grads.reserve(act.size());
  for (std::size_t i : act) grads.push_back(pieces_[i].jet(x).grad);
  return affine_span(grads, rank_rel_tol).rank;
}

Piece quadratic_piece(std::string label, double c, const Vec& b, const Mat& a) {
  return Piece{std::move(label), [c, b, a](const Vec& x) {
                 PieceJet j;
                 Vec ax = a * x;
                 j.value = c + dot(b, x) + 0.5 * dot(x, ax);
                 j.grad = b + ax;
                 j.hess = a;
                 return j;
               }};
}

Piece linear_piece(std::string label, double c, const Vec& b) {
  return Piece{std::move(label), [c, b](const Vec& x) {
                 PieceJet j;
                 j.value = c + dot(b, x);
                 j.grad = b;
                 j.hess = Mat::zero(x.d);
                 return j;
               }};
}

namespace {

Domain default_domain(int dim, const Domain* dom, double half_width) {
  if (dom) return *dom;
  return Domain::cube(dim, -half_width, half_width);
}

std::vector<Vec> sphere_directions(int dim, int n_dirs) {
  std::vector<Vec> dirs;
  if (dim == 1) {
    dirs = {Vec::of({1.0}), Vec::of({-1.0})};
  } else if (dim == 2) {
    int n = std::max(4, n_dirs);
    for (int k = 0; k < n; ++k) {
      double a = 2.0 * M_PI * k / n;
      dirs.push_back(Vec::of({std::cos(a), std::sin(a)}));
    }
  } else {
    int n = std::max(16, n_dirs);
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / n;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      dirs.push_back(Vec::of({r * std::cos(ga * k), r * std::sin(ga * k), z}));
    }
  }
  return dirs;
}

std::vector<Piece> staircase_pieces(int dim, int n_max) {
  std::vector<Piece> pieces;
  pieces.push_back(linear_piece("flat", 0.0, Vec(dim, 0.0)));
  for (int n = 1; n <= n_max; ++n) {
    double r1 = std::ldexp(1.0, 1 - n);  // 2^{1-n}
    double r2 = std::ldexp(1.0, -n);     // 2^{-n}
    Vec b(dim, 0.0);
    b[0] = r1 + r2;
    Mat a = Mat::zero(dim);
    a(0, 0) = 2.0;
    pieces.push_back(quadratic_piece(strf("step%d", n), r1 * r2, b, a));
  }
  return pieces;
}

}  // namespace

FunctionPtr make_staircase(int dim, int n_max, const Domain* dom) {
  if (n_max < 1) fail(Err::InvalidArgument, "staircase needs n_max >= 1");
  return std::make_shared<MarginalFunction>("phi1", default_domain(dim, dom, 4.0),
                                            staircase_pieces(dim, n_max), 2.0);
}

FunctionPtr make_staircase_edge(int dim, int n_max, const Domain* dom) {
  if (n_max < 1) fail(Err::InvalidArgument, "staircase needs n_max >= 1");
  auto pieces = staircase_pieces(dim, n_max);
  Vec b(dim, 0.0);
  b[0] = -1.0;
  pieces.push_back(linear_piece("edge", 0.0, b));
  return std::make_shared<MarginalFunction>("phi2", default_domain(dim, dom, 4.0),
                                            std::move(pieces), 2.0);
}

FunctionPtr make_neg_norm(int dim, int n_dirs, const Domain* dom) {
  std::vector<Piece> pieces;
  int k = 0;
  for (const Vec& u : sphere_directions(dim, n_dirs))
    pieces.push_back(linear_piece(strf("dir%d", k++), 0.0, u));
  return std::make_shared<MarginalFunction>("neg-norm", default_domain(dim, dom, 8.0),
                                            std::move(pieces), 0.0);
}

FunctionPtr make_min_parabolas(int dim, const Domain* dom) {
  std::vector<Piece> pieces;
  for (double s : {1.0, -1.0}) {
    Vec b(dim, 0.0);
    b[0] = -2.0 * s;
    pieces.push_back(quadratic_piece(s > 0 ? "right" : "left", 1.0, b, 2.0 * Mat::identity(dim)));
  }
  return std::make_shared<MarginalFunction>("min-parabolas", default_domain(dim, dom, 8.0),
                                            std::move(pieces), 2.0);
}

FunctionPtr make_two_cones(int dim, const Vec& a, const Vec& b, double ca, double cb, int n_dirs,
                           const Domain* dom) {
  std::vector<Piece> pieces;
  int k = 0;
  for (const Vec& u : sphere_directions(dim, n_dirs)) {
    pieces.push_back(linear_piece(strf("a%d", k), ca - dot(u, a), u));
    pieces.push_back(linear_piece(strf("b%d", k), cb - dot(u, b), u));
    ++k;
  }
  return std::make_shared<MarginalFunction>("two-cones", default_domain(dim, dom, 8.0),
                                            std::move(pieces), 0.0);
}

FunctionPtr make_custom(int dim, const std::vector<QuadPieceSpec>& specs, const Domain* dom) {
  if (specs.empty()) fail(Err::InvalidArgument, "custom function needs at least one piece");
  std::vector<Piece> pieces;
  double c = 0;
  int k = 0;
  for (const auto& s : specs) {
    if (s.b.d != dim || s.a.d != dim)
      fail(Err::InvalidArgument, "custom piece %d has mismatched dimension", k);
    auto ev = sym_eigenvalues(s.a);
    c = std::max(c, ev[static_cast<std::size_t>(dim - 1)]);
    pieces.push_back(quadratic_piece(strf("q%d", k++), s.c, s.b, s.a));
  }
  return std::make_shared<MarginalFunction>("custom", default_domain(dim, dom, 8.0),
                                            std::move(pieces), std::max(0.0, c));
}

}  // namespace sconclab
