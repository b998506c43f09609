#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace freqstrat {

// Modulus of continuity theta with finite Dini integral, plus the derived
// smoothing theta_tilde and the weight alpha = 3 d/dr (r theta_tilde).
// Families:
//   zero       theta = 0
//   power      theta = c r^a, a in [0, 1]; a = 0 is the constant family
//   log        theta = c / (1 + log(1/r))^2, valid on (0, e)
class DiniModulus {
public:
  enum class Family { Zero, Power, Log };

  static DiniModulus zero();
  static DiniModulus power(double c, double a);
  static DiniModulus log_type(double c);

  Family family() const { return family_; }
  double c() const { return c_; }
  double a() const { return a_; }

  // theta(r); nondecreasing, theta(0) = 0 except the constant family.
  double theta(double r) const;

  // theta_tilde(r) = (1/log^2 2) int_r^{2r} (1/t) int_t^{2t} theta(s)/s ds dt.
  // Closed form for zero/power; the log family uses the closed inner integral
  // and Gauss-Legendre in t.
  double theta_tilde(double r) const;

  // alpha(r) = 3 d/dr (r theta_tilde(r)); closed form where available,
  // otherwise central difference with step r * 1e-4.
  double alpha(double r) const;

  // int_0^r theta(s)/s ds; +inf for the constant family.
  double dini_integral(double r) const;

  // int_0^r theta(4s)/s ds = int_0^{4r} theta(t)/t dt.
  double dini_integral4(double r) const { return dini_integral(4.0 * r); }

  bool is_zero() const { return family_ == Family::Zero || c_ == 0.0; }

private:
  DiniModulus(Family f, double c, double a) : family_(f), c_(c), a_(a) {}
  Family family_ = Family::Zero;
  double c_ = 0.0;
  double a_ = 0.0;
};

struct ModulusValues {
  double theta;
  double theta_tilde;
  double alpha;
  double dini_integral;  // may be +inf (constant family)
};

// Bundled evaluation; throws on r <= 0 or r > r_max (pass 16R as r_max).
ModulusValues modulus_values(const DiniModulus& m, double r, double r_max);

}  // namespace freqstrat
