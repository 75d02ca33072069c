#pragma once

#include <cstdint>

#include "semiconcave.hpp"

namespace sconclab {

// Per-node stratum labels dim D+phi over a grid window. near_interface[i]
// holds the largest stratum dimension found among interface crossings on
// edges incident to node i (0 when every incident edge stays in one piece),
// so masks can exclude nodes within h of an off-node singular interface.
struct StrataGrid {
  GridSpec grid;
  std::vector<int> labels;
  std::vector<int> near_interface;
  std::array<std::size_t, 4> counts{0, 0, 0, 0};  // nodes per stratum dimension
};

StrataGrid classify_grid(const MarginalFunction& phi, const GridSpec& window,
                         double tie_tol = 0.0);

// Sample of the singular set: singular nodes plus located crossings on grid
// edges whose endpoints have different active pieces.
std::vector<Vec> singular_samples(const MarginalFunction& phi, const GridSpec& window,
                                  double tie_tol = 0.0);

struct DimensionEstimate {
  double dimension = 0;
  std::vector<double> eps;          // box sizes, descending
  std::vector<std::size_t> counts;  // occupied boxes per size
  std::size_t points = 0;
};

// Box-counting dimension over dyadic scales from half the bounding-box
// extent down to min_eps. The slope of log N against log 1/eps is fitted by
// least squares over the finest fit_levels scales; coarser scales, where
// nearby features share boxes, are tabulated but not fitted.
DimensionEstimate box_counting_dimension(const std::vector<Vec>& pts, double min_eps,
                                         int max_levels = 14, int fit_levels = 4);

struct ConnectivityReport {
  int max_dim = 0;           // stratum dimensions admitted into the mask
  std::size_t nodes = 0;     // mask size
  std::size_t components = 0;
  std::vector<std::size_t> sizes;  // component sizes, descending
};

// Connected components, under face adjacency, of the sampled set
// { dim D+phi <= max_dim }: nodes whose own label and near-interface flag
// both stay at or below max_dim.
ConnectivityReport connectivity_report(const StrataGrid& strata, int max_dim);

struct PathOptions {
  double radius = -1;    // bend sampling radius (-1 = |b - a| / 4, clipped to the domain)
  int max_samples = 10;  // bend draws before giving up
  double tol = 0.01;     // path resolution; clearance is checked at spacing tol/2
  double tie_tol = 0.0;  // active-set tolerance for the stratum test
  std::uint64_t seed = 1;
};

// Two-segment path from a to b bending at z, parameterized on [0,1] with the
// bend at s = 1/2.
struct BrokenLine {
  Vec a, bend, b;
  int tried = 0;            // bend samples drawn
  int samples_checked = 0;  // clearance evaluations along the accepted path
  Vec at(double s) const {
    return s <= 0.5 ? a + (2.0 * s) * (bend - a) : bend + (2.0 * s - 1.0) * (b - bend);
  }
};

// Draws bend points uniformly from a disk of the given radius on the
// perpendicular bisector hyperplane of [a, b] and returns the first whose
// open broken line avoids the stratum { dim D+phi >= 2 } at resolution tol.
// Requires dimension >= 2 and endpoints outside that stratum.
BrokenLine broken_line_path(const MarginalFunction& phi, const Vec& a, const Vec& b,
                            const PathOptions& opt = {});

}  // namespace sconclab
