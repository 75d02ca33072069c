#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "domain.hpp"
#include "geom.hpp"

namespace sconclab {

// Second-order data of one smooth piece at a point.
struct PieceJet {
  double value = 0;
  Vec grad;
  Mat hess;
};

// One C^2 member of the family defining a marginal function.
struct Piece {
  std::string label;
  std::function<PieceJet(const Vec&)> jet;
};

// phi(x) = min over pieces, with every piece Hessian bounded above by
// hessian_bound * I on the domain. The minimum of such a family is
// semiconcave with linear modulus and constant hessian_bound.
class MarginalFunction {
 public:
  MarginalFunction(std::string name, Domain dom, std::vector<Piece> pieces, double hessian_bound);

  const std::string& name() const { return name_; }
  const Domain& domain() const { return dom_; }
  int dim() const { return dom_.dim; }
  double hessian_bound() const { return c_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  double value(const Vec& x) const;
  PieceJet piece_jet(std::size_t idx, const Vec& x) const { return pieces_[idx].jet(x); }

  // Indices of pieces within tie_tol of the minimum. A non-positive tol
  // selects the default 1e-9 * (1 + |min|).
  std::vector<std::size_t> active_set(const Vec& x, double tie_tol = 0.0) const;

  // Upper gradient set D+phi(x): convex hull of active-piece gradients.
  Polytope superdifferential(const Vec& x, double tie_tol = 0.0,
                             double rank_rel_tol = 1e-6) const;

  // Gradients reachable as limits from nearby points of differentiability:
  // gradients at x of pieces that are uniquely active somewhere in a small
  // ball around x. Deterministic sphere+radius sampling.
  std::vector<Vec> reachable_gradients(const Vec& x, double radius, int samples = 64) const;

  // dim D+phi(x); 0 on the differentiability set.
  int stratum_dimension(const Vec& x, double tie_tol = 0.0, double rank_rel_tol = 1e-6) const;

 private:
  std::string name_;
  Domain dom_;
  std::vector<Piece> pieces_;
  double c_;
};

using FunctionPtr = std::shared_ptr<const MarginalFunction>;

// Piece builders.
Piece quadratic_piece(std::string label, double c, const Vec& b, const Mat& a);
Piece linear_piece(std::string label, double c, const Vec& b);

// Built-in examples.
//
// staircase(n_max): min(0, q_1, ..., q_n) with q_n(x) = (x1 + 2^{1-n})(x1 + 2^{-n}).
// Singular exactly on the hyperplanes x1 = -2^{1-n}; differentiable at 0.
FunctionPtr make_staircase(int dim, int n_max, const Domain* dom = nullptr);
// staircase_edge(n_max): the same family plus the piece -x1; the extra piece
// makes x1 = 0 singular as well, with D+ = [-1, 0] x {0}^{d-1} there.
FunctionPtr make_staircase_edge(int dim, int n_max, const Domain* dom = nullptr);
// neg_norm(n_dirs): -|x| as a minimum of linear pieces p.x over directions p
// sampled on the unit sphere (all of them for d = 1).
FunctionPtr make_neg_norm(int dim, int n_dirs, const Domain* dom = nullptr);
// min_parabolas: min(|x - e1|^2, |x + e1|^2).
FunctionPtr make_min_parabolas(int dim, const Domain* dom = nullptr);
// two_cones: min(-|x - a| + ca, -|x - b| + cb), sphere-sampled like neg_norm.
FunctionPtr make_two_cones(int dim, const Vec& a, const Vec& b, double ca, double cb, int n_dirs,
                           const Domain* dom = nullptr);
// custom quadratic family; each entry is (c, b, A) for c + b.x + x.A x / 2.
struct QuadPieceSpec {
  double c = 0;
  Vec b;
  Mat a;
};
FunctionPtr make_custom(int dim, const std::vector<QuadPieceSpec>& specs,
                        const Domain* dom = nullptr);

}  // namespace sconclab
