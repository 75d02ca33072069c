#pragma once

#include "evolution.hpp"

namespace sconclab {

// Finite sample of a subset of phase space: paired base points and momenta.
struct PhaseCloud {
  int dim = 1;
  std::vector<Vec> x;
  std::vector<Vec> p;

  std::size_t size() const { return x.size(); }
  void push_back(const Vec& xx, const Vec& pp) {
    x.push_back(xx);
    p.push_back(pp);
  }
};

struct PseudographOptions {
  double fiber_spacing = 0.02;   // target sample spacing inside each fiber
  int max_fiber_points = 20000;  // hard cap per fiber
  double tie_tol = 0.0;          // active-set tolerance (0 = default)
  int max_refine_depth = 7;      // adaptive cell subdivision limit
};

// Samples the pseudograph of D+phi over the window nodes: the graph point
// (x, grad) where phi is differentiable, a lattice filling D+phi(x) where it
// is not. Grid cells whose corner gradients spread wider than the spacing
// target are subdivided, so gradients that are active only between nodes
// still appear in the sample.
PhaseCloud sample_pseudograph(const MarginalFunction& phi, const GridSpec& window,
                              const PseudographOptions& opt = {});

// Graph of the numerical gradient of a grid function, restricted to nodes
// whose full centered-difference stencil exists and whose base point lies in
// [crop_lo, crop_hi] when a crop box is given.
PhaseCloud graph_gradient(const GridFn& fn, const Vec* crop_lo = nullptr,
                          const Vec* crop_hi = nullptr);

// Image of a cloud under the Hamiltonian flow from t1 to t2.
PhaseCloud flow_cloud(const TonelliSystem& sys, double t1, double t2, const PhaseCloud& cloud,
                      int steps = 0);

struct HausdorffReport {
  double ab = 0;   // sup over a of dist(a, B)
  double ba = 0;   // sup over b of dist(b, A)
  double sym = 0;  // max of the two
};

// Hausdorff distances in the product metric sqrt(|dx|^2 + |dp|^2). Base
// displacements are domain-aware (shortest torus lift).
HausdorffReport hausdorff_distance(const PhaseCloud& a, const PhaseCloud& b, const Domain& dom);

struct PseudographMatchOptions {
  double tol = 0.02;             // distance budget for each required direction
  bool require_symmetric = true; // d = 1 default; higher dimensions usually
                                 // check only flowed -> pseudograph
  double inflate = -1;           // evolution window margin (-1 = derive)
  int flow_steps = 0;            // 0 = auto
  double c11_cap = 1e4;          // breakdown guard on the evolved function
  PseudographOptions fiber;
  EvolveOptions evolve;
};

struct PseudographMatch {
  double t1 = 0, t2 = 0;
  double grid_h = 0;
  double directed_flowed = 0;  // flowed graph -> pseudograph
  double directed_pseudo = 0;  // pseudograph -> flowed graph
  double hausdorff = 0;
  std::size_t cloud_flowed = 0;
  std::size_t cloud_pseudo = 0;
  double tol = 0;
  bool symmetric_required = true;
  bool pass = false;
};

// Flows the graph of D(T+phi) forward from t1 to t2 and compares it against
// the pseudograph of D+phi sampled over the same window. The evolution grid
// is inflated so every pseudograph point over the window has its backward
// image represented.
PseudographMatch verify_pseudograph_identity(const TonelliSystem& sys,
                                             const MarginalFunction& phi, double t1, double t2,
                                             const GridSpec& window,
                                             const PseudographMatchOptions& opt = {});

struct FiberSeparation {
  double min_ratio = 0;  // min over pairs of |dy| / (dt |dp|) after backward flow
  int samples = 0;
};

// Distinct momenta in one fiber must flow backward to distinct base points;
// the ratio quantifies how strongly the backward flow separates them.
FiberSeparation fiber_separation(const TonelliSystem& sys, const MarginalFunction& phi, double t1,
                                 double t2, const Vec& x, int max_samples = 16);

}  // namespace sconclab
