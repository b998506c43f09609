#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace freqstrat {

using Vec = Eigen::VectorXd;

// Gauss-Legendre nodes/weights on [-1, 1]; cached per n.
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n);
};
const GaussLegendre& gauss_legendre(int n);

// Node counts for ball/sphere quadrature. Defaults: 64 radial x 128 angular
// in d = 2; 48 x 32 x 64 (radial, polar, azimuth) in d = 3. Angular
// discontinuities (region boundary through the ball) are resolved by
// splitting the angle range at membership transitions located to `tol`
// (relative); rays are clipped to inside-segments radially.
struct QuadSpec {
  int radial = 0, polar = 0, azimuth = 0;
  int ray_scan = 32;   // membership scans per ray / per angular sweep
  double tol = 1e-13;  // relative bisection tolerance for clipping
  static QuadSpec dflt(int dim);
  static QuadSpec light(int dim);  // coarse preset for covering loops
};

// Inside-segments of t -> center + t dir, t in [0, tmax], under a membership
// predicate: scan + bisection, endpoints resolved to ~tol * tmax.
std::vector<std::pair<double, double>> ray_inside_segments(
    const std::function<bool(const Vec&)>& inside, const Vec& center, const Vec& dir,
    double tmax, int scan, double tol = 1e-13);

// int_{B_r(center) ∩ {inside}} f dX: angular Gauss-Legendre split at
// membership transitions, per-ray clipped radial Gauss-Legendre.
double ball_integrate(const std::function<double(const Vec&)>& f,
                      const std::function<bool(const Vec&)>& inside, const Vec& center,
                      double r, const QuadSpec& q);

// int_{∂B_r(center) ∩ {inside}} f dH^{d-1}, same angular splitting.
double sphere_integrate(const std::function<double(const Vec&)>& f,
                        const std::function<bool(const Vec&)>& inside, const Vec& center,
                        double r, const QuadSpec& q);

// int over the graph patch {(y, h(y)) : |(y, h(y)) - center| < r} of
// f((y, h(y))) dH^{d-1}; height h over the d-1 horizontal coordinates, area
// element from central differences of h.
double graph_patch_integrate(const std::function<double(const Vec&)>& f,
                             const std::function<double(const Vec&)>& height,
                             const Vec& center, double r, const QuadSpec& q);

}  // namespace freqstrat
