#include "freqstrat/dini.hpp"

#include <cmath>
#include <limits>

#include "freqstrat/quadrature.hpp"

namespace freqstrat {

namespace {
const double kLog2 = std::log(2.0);
const double kLog2Sq = kLog2 * kLog2;
}  // namespace

DiniModulus DiniModulus::zero() { return DiniModulus(Family::Zero, 0.0, 0.0); }

DiniModulus DiniModulus::power(double c, double a) {
  if (c < 0.0 || a < 0.0 || a > 1.0)
    throw std::invalid_argument("DiniModulus::power: need c >= 0, a in [0, 1]");
  return DiniModulus(Family::Power, c, a);
}

DiniModulus DiniModulus::log_type(double c) {
  if (c < 0.0) throw std::invalid_argument("DiniModulus::log_type: need c >= 0");
  return DiniModulus(Family::Log, c, 0.0);
}

double DiniModulus::theta(double r) const {
  if (r <= 0.0) return family_ == Family::Power && a_ == 0.0 ? c_ : 0.0;
  switch (family_) {
    case Family::Zero:
      return 0.0;
    case Family::Power:
      return a_ == 0.0 ? c_ : c_ * std::pow(r, a_);
    case Family::Log: {
      // clamped at r = 1 to stay nondecreasing on all scales
      double w = 1.0 + std::log(1.0 / std::min(r, 1.0));
      return c_ / (w * w);
    }
  }
  return 0.0;
}

double DiniModulus::theta_tilde(double r) const {
  if (r <= 0.0 || is_zero()) return family_ == Family::Power && a_ == 0.0 ? c_ : 0.0;
  switch (family_) {
    case Family::Zero:
      return 0.0;
    case Family::Power:
      if (a_ == 0.0) return c_;
      return c_ * std::pow(r, a_) * std::pow(std::exp2(a_) - 1.0, 2) / (a_ * a_ * kLog2Sq);
    case Family::Log: {
      // (1/log^2 2) int_r^{2r} (I(2t) - I(t)) / t dt with the closed Dini
      // primitive I; Gauss-Legendre in t.
      const auto& gl = gauss_legendre(96);
      double acc = 0.0;
      for (size_t i = 0; i < gl.x.size(); ++i) {
        double t = r * (1.5 + 0.5 * gl.x[i]);
        acc += gl.w[i] * 0.5 * r * (dini_integral(2.0 * t) - dini_integral(t)) / t;
      }
      return acc / kLog2Sq;
    }
  }
  return 0.0;
}

double DiniModulus::alpha(double r) const {
  if (r <= 0.0) return 0.0;
  switch (family_) {
    case Family::Zero:
      return 0.0;
    case Family::Power:
      return 3.0 * (1.0 + a_) * theta_tilde(r);
    case Family::Log: {
      double h = r * 1e-4;
      double gp = (r + h) * theta_tilde(r + h), gm = (r - h) * theta_tilde(r - h);
      return 3.0 * (gp - gm) / (2.0 * h);
    }
  }
  return 0.0;
}

double DiniModulus::dini_integral(double r) const {
  if (r <= 0.0) return 0.0;
  switch (family_) {
    case Family::Zero:
      return 0.0;
    case Family::Power:
      if (a_ == 0.0) return c_ > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
      return c_ * std::pow(r, a_) / a_;
    case Family::Log: {
      // int theta(s)/s ds = c / (1 + log(1/s)) below the clamp, c/s beyond
      if (r <= 1.0) return c_ / (1.0 + std::log(1.0 / r));
      return c_ + c_ * std::log(r);
    }
  }
  return 0.0;
}

ModulusValues modulus_values(const DiniModulus& m, double r, double r_max) {
  if (!(r > 0.0) || r > r_max)
    throw std::domain_error("modulus_values: r out of (0, r_max]");
  return ModulusValues{m.theta(r), m.theta_tilde(r), m.alpha(r), m.dini_integral(r)};
}

}  // namespace freqstrat
