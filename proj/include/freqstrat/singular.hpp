#pragma once

#include <optional>
#include <vector>

#include "freqstrat/field.hpp"
#include "freqstrat/frequency.hpp"

namespace freqstrat {

struct AxisBox {
  Vec lo, hi;  // axis-aligned region
};

enum class PointTag { Nodal, Critical, Singular, EffectiveCritical };

struct TaggedPoint {
  Vec X;
  PointTag tag;
  double residual = 0.0;  // |u| + |grad u| after refinement
};

struct PointSampleSet {
  std::vector<TaggedPoint> points;
  double h = 0.0;  // sampling resolution
};

// Grid scan of |u| and |grad u| against thresholds tied to the local field
// scale, hierarchically refined (each round rescans 3h-neighborhoods of hits
// at h/4) until h <= h_target, then damped Gauss-Newton polish on the
// residual (u, grad u); dedup radius h/2. Points are clipped to closure(D).
PointSampleSet locate_singular_set(const GraphDomain& domain, const HarmonicField& f,
                                   const AxisBox& region, double h_target,
                                   double h_start = 0.0);

// Newton-polish a single seed toward {u = 0, grad u = 0}; returns the refined
// point and residual if it converged below tol * scale. The tolerance must
// reach deep enough that zeros of multiplicity 3 (residual ~ |X|^2) land
// within 1e-6 of the true point.
std::optional<TaggedPoint> refine_singular_point(const GraphDomain& domain,
                                                 const HarmonicField& f, const Vec& seed,
                                                 double scale, double tol = 1e-13);

// Order line-like samples along their principal axis and subdivide gaps to
// <= spacing, Newton-polishing each interpolant. Used by covering experiments
// where a blind scan at the target spacing is infeasible.
std::vector<Vec> densify_curve(const GraphDomain& domain, const HarmonicField& f,
                               const std::vector<Vec>& pts, double spacing);

// inf_{B_{beta r}(X) ∩ closure(D)} r^2 |grad u|^2  <=  alpha0^2 (1/r^d) ∫∫_{B_r(X)} |u - u(X)|^2
// (right side with zero-extended u). Grid of ceil((10 beta)^d) points plus
// descent polish for the inf.
bool effective_critical_test(const GraphDomain& domain, const HarmonicField& f, const Vec& X,
                             double r, double alpha0, double beta, const QuadSpec& q);

// Intersection over dyadic s in [r0, r_c] of the scale-s tests.
bool effective_critical_member(const GraphDomain& domain, const HarmonicField& f, const Vec& X,
                               double r0, double r_c, double alpha0, double beta,
                               const QuadSpec& q);

// alpha_d^1: gradient modulus of the linear function with unit L2 average on
// the upper unit half-ball; alpha(d)^2 * omega_{d-1} * int_0^1 t^2 (1-t^2)^{(d-1)/2} dt = 1.
double alpha_d1(int dim);

struct SpanningCertificate {
  bool spans = false;
  std::vector<int> tuple;          // indices of the (k+1)-tuple when spans
  std::vector<double> step_dists;  // per-step distances to the affine span
  // When not spanning: the largest affine subspace found.
  Vec base;
  Mat directions;  // columns orthonormal, may have zero columns
  double max_containment_dist = 0.0;  // max dist of F to the subspace
};

// Greedy farthest-point effective spanning test: succeeds if k+1 points each
// stay > tau * r from the affine span of their predecessors.
SpanningCertificate effective_spanning_test(const std::vector<Vec>& F, int k, double tau,
                                            double r);

struct SpineReport {
  bool applicable = false;   // both profiles constant within tol
  bool linear = false;       // u linear: invariance holds vacuously
  double profile_drop = 0.0;  // max frequency variation over the radii
  double max_deviation = 0.0; // max |u(Y + t(X2-X1)) - u(Y)| over samples
};

SpineReport spine_invariance_check(const GraphDomain& domain, const HarmonicField& f,
                                   const Vec& X1, const Vec& X2,
                                   const std::vector<double>& radii, double C_ledger,
                                   const QuadSpec& q, double tol = 1e-3);

}  // namespace freqstrat
