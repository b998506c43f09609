#pragma once

#include <Eigen/Dense>
#include <vector>

#include "freqstrat/field.hpp"
#include "freqstrat/frequency.hpp"

namespace freqstrat {

// Discrete Radon measure: points with nonnegative weights.
struct WeightedCloud {
  std::vector<Vec> points;
  std::vector<double> weights;  // empty means unit weights
  double weight(int i) const { return weights.empty() ? 1.0 : weights[i]; }
  double mass_in_ball(const Vec& p, double r) const;
};

struct BetaResult {
  Vec center_of_mass;
  Vec lambdas;      // eigenvalues of the moment form, decreasing
  Mat eigvecs;      // columns, matching lambdas
  double beta = 0.0;  // sqrt(lambda_{k+1} + ... + lambda_d)
  int k = 0;
  bool empty = false;  // no mass in the ball
};

// Cyclic Jacobi eigen-decomposition for small symmetric matrices; off-diagonal
// sweep tolerance 1e-14. Returns eigenvalues descending with matching columns.
void jacobi_eigen_sym(const Mat& S, Vec& evals, Mat& evecs, double tol = 1e-14);

// Moment form Q = r^{-(2+k)} sum_i w_i (Y_i - C)(Y_i - C)^t over the closed
// ball B_r(p); beta^2 = trailing d-k eigenvalues.
BetaResult beta_number(const WeightedCloud& mu, const Vec& p, double r, int k);

// Direct minimization of the beta definition over a dense grid of k-planes
// with local refinement; test oracle for beta_number (d <= 3, k <= 2).
double beta_plane_search(const WeightedCloud& mu, const Vec& p, double r, int k);

// sum_{p in supp mu ∩ B_s(p0)} w_p int_0^s beta^2(p, r) dr/r, trapezoid on a
// geometric radial grid (ratio <= 2^{1/4}); beta = 0 below the per-point
// cutoff (r_X/5 for packing measures, else nearest-neighbor distance).
double dini_beta_integral(const WeightedCloud& mu, const Vec& p0, double s, int k,
                          double grid_ratio = 1.189207115002721,
                          const std::vector<double>* ball_radii = nullptr);

struct BetaBoundReport {
  double lhs = 0.0;       // beta^2 at (p, r), k = d-2
  double drop_term = 0.0; // r^{-(d-2)} ∫ (W~_X(r) + delta_in * chi) dmu
  double mass_term = 0.0; // mu(B_r(p)) r^{-(d-2)} (r + theta(24r))
  double rhs = 0.0;       // drop_term + mass_term (without the unknown constant)
  double ratio = 0.0;     // lhs / rhs, empirical constant estimate; 0 if rhs = 0
};

// Evaluates both sides of the beta-vs-frequency-drop inequality; ratio is an
// empirical constant estimate, never asserted.
BetaBoundReport beta_frequency_bound_check(const GraphDomain& domain, const HarmonicField& f,
                                           const WeightedCloud& mu, const Vec& p, double r,
                                           double delta_in, double C_ledger,
                                           const QuadSpec& q);

}  // namespace freqstrat
