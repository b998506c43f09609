#include "freqstrat/frequency.hpp"

#include <cmath>
#include <stdexcept>

namespace freqstrat {

namespace {

double modified_factor(const GraphDomain& domain, double r, double C_ledger) {
  if (domain.modulus().is_zero() || C_ledger == 0.0) return 1.0;
  return std::exp(C_ledger * domain.modulus().dini_integral4(r));
}

}  // namespace

FrequencySample boundary_frequency(const TransformFrame& frame, const HarmonicField& f,
                                   double r, double C_ledger, const QuadSpec& q) {
  if (!(r > 0.0)) throw std::invalid_argument("boundary_frequency: r must be positive");
  const int d = frame.dim();
  auto inside = [&](const Vec& Y) { return frame.omega_inside(Y); };
  auto energy = [&](const Vec& Y) {
    EllipticData el = frame.elliptic(Y);
    Vec gv = frame.jacobian(Y).transpose() * f.gradient(frame.map_psi(Y));
    return gv.dot(el.A * gv);
  };
  auto mass = [&](const Vec& Y) {
    double v = f.value(frame.map_psi(Y));
    return frame.elliptic(Y).eta_tilde * v * v;
  };
  Vec zero = Vec::Zero(d);
  FrequencySample s;
  s.X = frame.base();
  s.r = r;
  s.D = ball_integrate(energy, inside, zero, r, q);
  s.H = sphere_integrate(mass, inside, zero, r, q);
  // H scales like r^{d-1} times the field's local squared size, so any
  // absolute cutoff misfires at small radii; only an exact zero (no inside
  // nodes, or u vanishing at every node) or a NaN is an error.
  if (!(s.H >= 1e-300)) throw std::runtime_error("boundary_frequency: vanishing boundary mass");
  s.N = r * s.D / s.H;
  s.N_mod = s.N * modified_factor(frame.domain(), r, C_ledger);
  s.branch = FreqBranch::Boundary;
  return s;
}

FrequencySample interior_frequency(const GraphDomain& domain, const HarmonicField& f,
                                   const Vec& p, double r, const QuadSpec& q) {
  if (!(r > 0.0)) throw std::invalid_argument("interior_frequency: r must be positive");
  auto inside = [&](const Vec& X) { return domain.inside(X); };
  auto energy = [&](const Vec& X) { return f.gradient(X).squaredNorm(); };
  const double up = f.value(p);
  auto mass = [&](const Vec& X) {
    double dv = f.value(X) - up;
    return dv * dv;
  };
  FrequencySample s;
  s.X = p;
  s.r = r;
  s.D = ball_integrate(energy, inside, p, r, q);
  s.H = sphere_integrate(mass, inside, p, r, q);
  if (!(s.H >= 1e-300)) throw std::runtime_error("interior_frequency: vanishing boundary mass");
  s.N = r * s.D / s.H;
  s.N_mod = s.N;
  s.branch = FreqBranch::Interior;
  return s;
}

double critical_scale(const GraphDomain& domain, const Vec& p) {
  double dist = domain.dist_to_boundary(p);
  if (dist <= 1e-11 * (1.0 + p.norm())) return 0.0;
  const DiniModulus& m = domain.modulus();
  if (m.is_zero()) return kBeyondRange;
  const double rmax = 16.0 * domain.R();
  auto g = [&](double r) { return r * m.theta_tilde(r) - dist; };
  if (g(rmax) < 0.0) return kBeyondRange;
  double lo = 0.0, hi = rmax;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * rmax; ++it) {
    double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> monotonicity_residuals(const TransformFrame& frame,
                                                 const HarmonicField& f, double r,
                                                 const QuadSpec& q) {
  FrequencySample s = boundary_frequency(frame, f, r, 0.0, q);
  const int d = frame.dim();
  auto inside = [&](const Vec& Y) { return frame.omega_inside(Y); };
  auto rellich = [&](const Vec& Y) {
    EllipticData el = frame.elliptic(Y);
    Vec gv = frame.jacobian(Y).transpose() * f.gradient(frame.map_psi(Y));
    double v = f.value(frame.map_psi(Y));
    double vr = gv.dot(el.A * Y) / Y.norm() / el.eta_tilde;
    double dev = vr - s.N * v / s.r;
    return el.eta_tilde * dev * dev;
  };
  Vec zero = Vec::Zero(d);
  double Rh = (2.0 * r / s.H) * sphere_integrate(rellich, inside, zero, r, q);
  auto height = [&](const Vec& y) { return frame.omega_boundary_height(y); };
  auto edge = [&](const Vec& Y) {
    EllipticData el = frame.elliptic(Y);
    Vec gv = frame.jacobian(Y).transpose() * f.gradient(frame.map_psi(Y));
    Vec n = frame.omega_outer_normal(Y);
    double dvn = gv.dot(n);
    return dvn * dvn / el.eta_tilde * Y.dot(el.A * n) * n.dot(el.A * n);
  };
  double Rb = graph_patch_integrate(edge, height, zero, r, q) / s.H;
  return {Rh, Rb};
}

double frequency_derivative(const TransformFrame& frame, const HarmonicField& f,
                            double r, const QuadSpec& q) {
  auto N = [&](double rr) { return boundary_frequency(frame, f, rr, 0.0, q).N; };
  auto central = [&](double h) { return (N(r + h) - N(r - h)) / (2.0 * h); };
  double h = r * 1e-3;
  double d1 = central(h), d2 = central(0.5 * h);
  return (4.0 * d2 - d1) / 3.0;
}

FrequencySample unified_frequency(const GraphDomain& domain, const HarmonicField& f,
                                  const Vec& X, double r, double C_ledger,
                                  const QuadSpec& q) {
  double dist = domain.dist_to_boundary(X);
  FrequencySample s;
  if (dist <= 1e-11 * (1.0 + X.norm())) {
    s = boundary_frequency(TransformFrame(domain, X), f, r, C_ledger, q);
  } else if (r <= critical_scale(domain, X)) {
    s = interior_frequency(domain, f, X, r, q);
    s.N_mod = s.N * modified_factor(domain, r, C_ledger);
  } else {
    TransformFrame fr(domain, domain.nearest_boundary_point(X));
    s = boundary_frequency(fr, f, r, C_ledger, q);
    s.branch = FreqBranch::BoundaryReplaced;
  }
  return s;
}

FrequencyProfile unified_frequency_profile(const GraphDomain& domain,
                                           const HarmonicField& f, const Vec& X,
                                           const std::vector<double>& radii,
                                           double C_ledger, const QuadSpec& q) {
  if (radii.empty()) throw std::invalid_argument("frequency profile: no radii");
  for (size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw std::invalid_argument("frequency profile: radii must increase strictly");
  FrequencyProfile prof;
  prof.X = X;
  prof.r_cs = critical_scale(domain, X);
  prof.samples.reserve(radii.size());
  for (double r : radii) prof.samples.push_back(unified_frequency(domain, f, X, r, C_ledger, q));
  return prof;
}

double frequency_drop(const GraphDomain& domain, const HarmonicField& f, const Vec& X,
                      double r, double C_ledger, const QuadSpec& q) {
  return unified_frequency(domain, f, X, 1.5 * r, C_ledger, q).N_mod -
         unified_frequency(domain, f, X, 0.5 * r, C_ledger, q).N_mod;
}

double frequency_drop_wide(const GraphDomain& domain, const HarmonicField& f, const Vec& X,
                           double r, double C_ledger, const QuadSpec& q) {
  return unified_frequency(domain, f, X, 6.0 * r, C_ledger, q).N_mod -
         unified_frequency(domain, f, X, r, C_ledger, q).N_mod;
}

DoublingReport doubling_check(const TransformFrame& frame, const HarmonicField& f,
                              double r1, double r2, double C_ledger, const QuadSpec& q) {
  if (!(0.0 < r1 && r1 < r2)) throw std::invalid_argument("doubling_check: need 0 < r1 < r2");
  FrequencySample s1 = boundary_frequency(frame, f, r1, C_ledger, q);
  FrequencySample s2 = boundary_frequency(frame, f, r2, C_ledger, q);
  const int d = frame.dim();
  const DiniModulus& m = frame.domain().modulus();
  double I1 = m.is_zero() ? 0.0 : m.dini_integral4(r1);
  double I2 = m.is_zero() ? 0.0 : m.dini_integral4(r2);
  double J = I2 - I1;
  DoublingReport rep;
  rep.ratio = (s2.H / std::pow(r2, d - 1)) / (s1.H / std::pow(r1, d - 1));
  double lg = std::log(r2 / r1);
  double loglo = 2.0 * s1.N_mod * std::exp(-C_ledger * I2) * lg - C_ledger * J;
  double loghi = 2.0 * s2.N_mod * std::exp(-C_ledger * I1) * lg + C_ledger * J;
  rep.lower = std::exp(loglo);
  rep.upper = std::exp(loghi);
  double logr = std::log(rep.ratio);
  rep.slack = std::min(logr - loglo, loghi - logr);
  rep.pass = rep.slack >= -std::log(1.05);
  return rep;
}

}  // namespace freqstrat
