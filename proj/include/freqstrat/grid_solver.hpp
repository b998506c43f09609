#pragma once

#include <Eigen/Dense>

#include "freqstrat/field.hpp"

namespace freqstrat {

// Dirichlet solve on a graph domain (d = 2): flatten (x, x_d) -> (x, x_d - phi(x)),
// i.e. solve div(B grad w) = 0 on the half-box [-L, L] x [0, Lt] with
//   B = [[1, -phi'], [-phi', 1 + phi'^2]],
// w = 0 on the bottom edge and w = trace(unflatten(.)) on the other sides.
// Conservative second-order finite volumes, conjugate gradients to relative
// residual 1e-10. The returned field evaluates by pullback with bilinear
// interpolation; gradients use centered differences (one-sided second order
// at the bottom row).
struct GridSolveReport {
  int iterations = 0;
  double residual = 0.0;
  double trace_violation = 0.0;  // max |trace| sampled on the flattened bottom
};

FieldPtr solve_dirichlet(const GraphDomain& domain, FieldPtr boundary_trace,
                         int resolution, double box_half_width, double box_height,
                         GridSolveReport* report = nullptr);

}  // namespace freqstrat
