#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freqstrat/field.hpp"
#include "freqstrat/frame.hpp"

namespace freqstrat {

// Sentinel for "monotone at all scales of interest" (critical scale solve
// out of range, incl. theta == 0).
inline constexpr double kBeyondRange = std::numeric_limits<double>::infinity();

enum class FreqBranch { Boundary, Interior, BoundaryReplaced };

struct FrequencySample {
  Vec X;
  double r = 0.0;
  double D = 0.0;   // Dirichlet energy
  double H = 0.0;   // boundary L2 mass
  double N = 0.0;   // r D / H
  double N_mod = 0.0;  // N * exp(C * int_0^r theta(4s)/s ds)
  double R_h = 0.0, R_b = 0.0;
  FreqBranch branch = FreqBranch::Boundary;
};

struct FrequencyProfile {
  Vec X;
  double r_cs = kBeyondRange;
  std::vector<FrequencySample> samples;  // radii strictly increasing
  // N_X at the sample radii per the unified definition.
  double value_at(int i) const { return samples[i].N_mod; }
};

// Frequency of v = u ∘ Psi_{X0} at radius r in the reduced domain:
//   D(r) = ∫∫_{B_r ∩ Omega} <A grad v, grad v>,  H(r) = ∫_{∂B_r ∩ Omega} eta_tilde v^2.
// Throws if H < 1e-30 (trivial field near X0).
FrequencySample boundary_frequency(const TransformFrame& frame, const HarmonicField& f,
                                   double r, double C_ledger, const QuadSpec& q);

// Interior frequency with u - u(p):
//   D = ∫∫_{B_r(p) ∩ D} |grad u|^2,  H = ∫_{∂B_r(p) ∩ D} (u - u(p))^2.
FrequencySample interior_frequency(const GraphDomain& domain, const HarmonicField& f,
                                   const Vec& p, double r, const QuadSpec& q);

// Unique r with dist(p, ∂D) = r theta_tilde(r); 0 for boundary points,
// kBeyondRange if dist exceeds the range of r theta_tilde on (0, 16R].
double critical_scale(const GraphDomain& domain, const Vec& p);

// Monotonicity residuals at a boundary center:
//   R_h = (2r/H) ∫_{∂B_r ∩ Omega} eta_tilde (v_rho - N v / r)^2,
//         v_rho = <A grad v, Y/|Y|> / eta_tilde;
//   R_b = (1/H) ∫_{B_r ∩ ∂Omega} (dv/dn)^2 / eta_tilde * <A Y, n> <A n, n>.
// Both expected >= -tolerance.
std::pair<double, double> monotonicity_residuals(const TransformFrame& frame,
                                                 const HarmonicField& f, double r,
                                                 const QuadSpec& q);

// Central-difference dN/dr with one Richardson step, h = r * 1e-3.
double frequency_derivative(const TransformFrame& frame, const HarmonicField& f,
                            double r, const QuadSpec& q);

// Unified N_X(r): boundary branch at boundary points; interior branch for
// r <= r_cs(X); boundary branch at the nearest boundary point beyond.
FrequencySample unified_frequency(const GraphDomain& domain, const HarmonicField& f,
                                  const Vec& X, double r, double C_ledger,
                                  const QuadSpec& q);

FrequencyProfile unified_frequency_profile(const GraphDomain& domain, const HarmonicField& f,
                                           const Vec& X, const std::vector<double>& radii,
                                           double C_ledger, const QuadSpec& q);

// Drops W_X(r) = N_X(3r/2) - N_X(r/2) and W~_X(r) = N_X(6r) - N_X(r).
double frequency_drop(const GraphDomain& domain, const HarmonicField& f, const Vec& X,
                      double r, double C_ledger, const QuadSpec& q);
double frequency_drop_wide(const GraphDomain& domain, const HarmonicField& f, const Vec& X,
                           double r, double C_ledger, const QuadSpec& q);

struct DoublingReport {
  double ratio = 0.0;       // Htil(r2)/Htil(r1), Htil(r) = H(r)/r^{d-1}
  double lower = 0.0, upper = 0.0;
  bool pass = false;
  double slack = 0.0;       // min distance of log ratio to the log bounds
};

// Sandwich from the doubling property with ledger constant C:
//   (r2/r1)^{2 N~(r1) exp(-C I(r2))} e^{-C J} <= ratio <= (r2/r1)^{2 N~(r2) exp(-C I(r1))} e^{C J},
// I(r) = int_0^r theta(4s)/s ds, J = int_{r1}^{r2} theta(4s)/s ds.
DoublingReport doubling_check(const TransformFrame& frame, const HarmonicField& f,
                              double r1, double r2, double C_ledger, const QuadSpec& q);

}  // namespace freqstrat
