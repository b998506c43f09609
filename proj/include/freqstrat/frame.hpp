#pragma once

#include <Eigen/Dense>

#include "freqstrat/domain.hpp"

namespace freqstrat {

struct EllipticData {
  Mat A;           // symmetric, det DPsi * (DPsi)^-1 (DPsi)^-t
  double eta_tilde;  // <A(Y)Y, Y>/|Y|^2, limit 1 at Y = 0
  double mu;       // (det DPsi / eta_tilde)^{(d-2)/2}
  Mat g;           // eta_tilde * A^{-1}
};

// Frame at a boundary base point X0: the vertical-shift map
//   Psi(Y) = (y, y_d + 3|Y| theta_tilde(|Y|)),   Psi_{X0}(Y) = X0 + Psi(Y),
// its Jacobian, the induced elliptic matrix A, and the reduced domain
//   Omega_{X0} = {Y : y_d > phi(y + x0) - phi(x0) - 3|Y| theta_tilde(|Y|)}.
class TransformFrame {
public:
  TransformFrame(const GraphDomain& domain, Vec X0);

  const GraphDomain& domain() const { return *domain_; }
  const Vec& base() const { return X0_; }
  int dim() const { return domain_->dim(); }

  Vec map_psi(const Vec& Y) const;           // absolute: X0 + Psi(Y)
  Vec psi_shift(const Vec& Y) const;         // Psi(Y) itself
  // Damped fixed-point solve of Psi(Y) = Z - X0; throws on non-convergence.
  Vec inverse_psi(const Vec& Z, double tol = 1e-12) const;

  Mat jacobian(const Vec& Y) const;          // DPsi
  double det_jacobian(const Vec& Y) const;   // 1 + alpha(|Y|) y_d / |Y|
  EllipticData elliptic(const Vec& Y) const;

  bool omega_inside(const Vec& Y) const;
  // Level function G(Y) = y_d - phi(y+x0) + phi(x0) + 3|Y| theta_tilde(|Y|);
  // G > 0 inside Omega_{X0}.
  double omega_level(const Vec& Y) const;
  Vec omega_level_grad(const Vec& Y) const;  // points into Omega_{X0}
  // Boundary height over horizontal position y: solves G((y, t)) = 0 in t by
  // bisection, tolerance 1e-12.
  double omega_boundary_height(const Vec& y) const;
  Vec omega_outer_normal(const Vec& Y) const;

  // <A(Y)Y, n_out(Y)> at a boundary point of Omega_{X0}; throws if Y is not
  // on the boundary within tolerance.
  double convexity_defect(const Vec& Y, double tol = 1e-8) const;

private:
  const GraphDomain* domain_;
  Vec X0_;
  Vec x0_;  // horizontal part of X0
};

}  // namespace freqstrat
