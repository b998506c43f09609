#include "freqstrat/domain.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace freqstrat {

namespace {

// Scan + golden-section minimizer of f over [0, smax].
double minimize_section(const std::function<double(double)>& f, double smax) {
  const int n = 2048;
  double best = f(0.0), sbest = 0.0;
  for (int i = 1; i <= n; ++i) {
    double s = smax * i / n, v = f(s);
    if (v < best) {
      best = v;
      sbest = s;
    }
  }
  double a = std::max(0.0, sbest - smax / n), b = std::min(smax, sbest + smax / n);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-13 * (1.0 + smax)) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

GraphDomain::GraphDomain(int dim, double R, PhiFamily phi_family, double phi_c, double phi_p,
                         DiniModulus modulus, bool relax_scale_checks)
    : d_(dim),
      R_(R),
      phi_family_(phi_family),
      phi_c_(phi_c),
      phi_p_(phi_p),
      modulus_(modulus) {
  if (dim < 2 || dim > 3) throw std::invalid_argument("GraphDomain: dim must be 2 or 3");
  if (!(R > 0.0)) throw std::invalid_argument("GraphDomain: R must be positive");
  if (phi_family == PhiFamily::Power && !(phi_p > 1.0 && phi_p <= 2.0))
    throw std::invalid_argument("GraphDomain: power graph exponent must lie in (1, 2]");
  if (!relax_scale_checks) {
    double I = modulus_.dini_integral(16.0 * R);
    if (!(I <= 1.0))
      throw std::invalid_argument("GraphDomain: Dini integral over (0, 16R] exceeds 1");
    if (!(modulus_.theta(8.0 * R) < 1.0 / 72.0))
      throw std::invalid_argument("GraphDomain: theta(8R) >= 1/72");
  }
  C0_ = phi_family_ == PhiFamily::Flat
            ? 0.0
            : phi_c_ * phi_p_ * std::pow(5.0 * R_, phi_p_ - 1.0);
}

double GraphDomain::phi(const Vec& x) const {
  if (phi_family_ == PhiFamily::Flat) return 0.0;
  return phi_c_ * std::pow(x.norm(), phi_p_);
}

Vec GraphDomain::grad_phi(const Vec& x) const {
  if (phi_family_ == PhiFamily::Flat) return Vec::Zero(x.size());
  double n = x.norm();
  if (n == 0.0) return Vec::Zero(x.size());
  return (phi_c_ * phi_p_ * std::pow(n, phi_p_ - 2.0)) * x;
}

bool GraphDomain::inside(const Vec& X) const { return signed_height(X) > 0.0; }

double GraphDomain::signed_height(const Vec& X) const {
  return X(d_ - 1) - phi(X.head(d_ - 1));
}

double GraphDomain::dist_to_boundary(const Vec& X) const {
  if (phi_family_ == PhiFamily::Flat) return std::abs(X(d_ - 1));
  return (X - nearest_boundary_point(X)).norm();
}

Vec GraphDomain::nearest_boundary_point(const Vec& X) const {
  Vec nb(d_);
  if (phi_family_ == PhiFamily::Flat) {
    nb.head(d_ - 1) = X.head(d_ - 1);
    nb(d_ - 1) = 0.0;
    return nb;
  }
  // Radial symmetry of phi: the nearest graph point lies in the vertical
  // plane through X, at (s, phi_c s^p) along the horizontal direction of X.
  double rx = X.head(d_ - 1).norm(), xd = X(d_ - 1);
  double s = minimize_section(
      [&](double t) {
        double dv = phi_c_ * std::pow(t, phi_p_) - xd;
        return (t - rx) * (t - rx) + dv * dv;
      },
      5.0 * R_);
  Vec dir = rx > 0.0 ? Vec(X.head(d_ - 1) / rx) : Vec(Vec::Unit(d_ - 1, 0));
  nb.head(d_ - 1) = s * dir;
  nb(d_ - 1) = phi_c_ * std::pow(s, phi_p_);
  return nb;
}

double GraphDomain::modulus_fit_ratio(int samples_per_axis) const {
  if (phi_family_ == PhiFamily::Flat) return 0.0;
  // Horizontal sample grid in B_{5R}; worst pairwise gradient ratio.
  std::vector<Vec> pts;
  double span = 5.0 * R_;
  if (d_ == 2) {
    for (int i = 0; i < samples_per_axis; ++i)
      pts.push_back(Vec::Constant(1, -span + 2.0 * span * i / (samples_per_axis - 1)));
  } else {
    int m = samples_per_axis;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        Vec x(2);
        x << -span + 2.0 * span * i / (m - 1), -span + 2.0 * span * j / (m - 1);
        if (x.norm() <= span) pts.push_back(x);
      }
  }
  double worst = 0.0;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      double dist = (pts[i] - pts[j]).norm();
      double th = modulus_.theta(dist);
      if (th <= 0.0) continue;
      double lhs = (grad_phi(pts[i]) - grad_phi(pts[j])).norm();
      worst = std::max(worst, lhs / th);
    }
  return worst;
}

}  // namespace freqstrat
