#pragma once

#include "geom.hpp"

namespace sconclab {

// State space for systems and functions: an axis-aligned box or a flat torus
// (per-axis periods). All metric queries are torus-aware.
struct Domain {
  enum class Kind { Box, Torus };

  Kind kind = Kind::Box;
  int dim = 1;
  Vec lower;   // box only
  Vec upper;   // box only
  Vec period;  // torus only, componentwise > 0

  static Domain box(const Vec& lo, const Vec& hi);
  static Domain cube(int dim, double lo, double hi);
  static Domain torus(const Vec& period);
  static Domain torus_cube(int dim, double period);

  bool contains(const Vec& x, double slack = 1e-12) const;
  void require_inside(const Vec& x, const char* what) const;

  // Canonical representative: identity on a box, wrap into [0, period) on a
  // torus.
  Vec wrap(const Vec& x) const;

  // Shortest displacement from a to b (b - a on a box, minimal lift on a
  // torus).
  Vec diff(const Vec& a, const Vec& b) const;
  double distance(const Vec& a, const Vec& b) const;

  // Longest representable extent per axis, used for sampling windows.
  Vec extent() const;
};

// Uniform node grid over a box window: node(i) = lo + i*h per axis.
struct GridSpec {
  int dim = 1;
  Vec lo;
  std::array<int, 3> n{1, 1, 1};  // nodes per axis
  double h = 0.0;

  static GridSpec over(const Vec& lo, const Vec& hi, double h);

  std::size_t size() const;
  Vec coord(std::size_t flat) const;
  std::array<int, 3> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::array<int, 3>& idx) const;
  bool in_bounds(const std::array<int, 3>& idx) const;
  Vec upper() const;

  // Grid covering this one inflated by `margin` on every side, node-aligned
  // with the parent so shared nodes coincide exactly.
  GridSpec inflated(double margin) const;
  // Flat index of this grid's origin inside the inflated parent.
  std::array<int, 3> offset_in(const GridSpec& parent) const;
};

// Scalar samples on a grid.
struct GridFn {
  GridSpec grid;
  std::vector<double> values;

  double& at(std::size_t i) { return values[i]; }
  double at(std::size_t i) const { return values[i]; }
};

}  // namespace sconclab
