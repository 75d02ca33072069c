#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "util.hpp"

namespace sconclab {

// Dense vector with compile-time capacity 3 and runtime dimension.
// All state-space objects in the library live in dimension 1..3.
struct Vec {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  int d = 0;

  Vec() = default;
  explicit Vec(int dim) : d(dim) {}
  Vec(int dim, double fill) : d(dim) { for (int i = 0; i < dim; ++i) c[i] = fill; }
  static Vec of(std::initializer_list<double> xs) {
    Vec v;
    v.d = static_cast<int>(xs.size());
    int i = 0;
    for (double x : xs) v.c[i++] = x;
    return v;
  }
  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
};

Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);
Vec operator-(const Vec& a);
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double norm(const Vec& a);
double dist(const Vec& a, const Vec& b);
Vec normalized(const Vec& a);
bool approx_eq(const Vec& a, const Vec& b, double tol);

// Row-major square matrix, runtime dimension 1..3.
struct Mat {
  std::array<double, 9> m{};
  int d = 0;

  Mat() = default;
  explicit Mat(int dim) : d(dim) {}
  static Mat identity(int dim) {
    Mat out(dim);
    for (int i = 0; i < dim; ++i) out(i, i) = 1.0;
    return out;
  }
  static Mat zero(int dim) { return Mat(dim); }
  double& operator()(int i, int j) { return m[static_cast<std::size_t>(i * d + j)]; }
  double operator()(int i, int j) const { return m[static_cast<std::size_t>(i * d + j)]; }
};

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);
Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, const Vec& x);
Mat transpose(const Mat& a);
double frob_norm(const Mat& a);

// Solves a*x = b by Gaussian elimination with partial pivoting.
// Raises Err::NoConvergence on a numerically singular system.
Vec solve(const Mat& a, const Vec& b);

// Cholesky test for symmetric positive definiteness.
bool is_spd(const Mat& a, double tol = 0.0);

// Eigenvalues of a symmetric matrix, ascending (cyclic Jacobi).
std::array<double, 3> sym_eigenvalues(const Mat& a);
double min_eigenvalue_sym(const Mat& a);

// Affine rank of a point set with a relative pivot threshold: pivot norms
// below rel_tol * (largest pivot) count as zero. Also returns an orthonormal
// basis of the affine span rooted at `origin`.
struct AffineSpan {
  int rank = 0;
  Vec origin;
  std::array<Vec, 3> basis;  // first `rank` entries valid
};
AffineSpan affine_span(const std::vector<Vec>& pts, double rel_tol = 1e-6);

// Convex polytope given by its extreme points.
// `vertices` are irredundant after construction; `affine_dim` is the
// dimension of the affine hull detected at tolerance rel_tol.
struct Polytope {
  std::vector<Vec> vertices;
  int affine_dim = 0;
  int ambient_dim = 0;

  AffineSpan span;                 // basis of the affine hull
  std::vector<std::array<double, 3>> local;  // vertex coords in span basis
  std::vector<std::array<int, 3>> faces;     // triangles, affine_dim == 3 only

  bool contains(const Vec& q, double tol) const;
  double distance(const Vec& q) const;
};

// Builds a polytope from an arbitrary point cloud: dedupes, finds the affine
// hull, reduces to extreme points (exact hulls for span dimension <= 3).
Polytope polytope_from_points(const std::vector<Vec>& pts, double rank_rel_tol = 1e-6);

// Deterministic lattice sample of a polytope with at most max_points points,
// always including the vertices. Returns achieved lattice spacing through
// *spacing_out when non-null (0 for a single point).
std::vector<Vec> polytope_lattice(const Polytope& p, int max_points, double* spacing_out = nullptr);

// Nearest-neighbour search tree over fixed-dimension points (dim <= 6).
class KdTree {
 public:
  using Point = std::array<double, 6>;
  KdTree(std::vector<Point> pts, int dim);
  // Squared euclidean distance from q to the nearest stored point.
  double nearest_dist2(const Point& q) const;
  std::size_t size() const { return pts_.size(); }

 private:
  struct Node {
    int axis = -1;
    double split = 0;  // splitting coordinate, frozen at build time
    std::size_t begin = 0, end = 0;  // leaf range
    int left = -1, right = -1;
  };
  void build(std::size_t begin, std::size_t end, int node, int depth);
  void query(int node, const Point& q, double& best) const;

  std::vector<Point> pts_;
  std::vector<Node> nodes_;
  int dim_;
};

}  // namespace sconclab
