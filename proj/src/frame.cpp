#include "freqstrat/frame.hpp"

#include <cmath>
#include <stdexcept>

namespace freqstrat {

TransformFrame::TransformFrame(const GraphDomain& domain, Vec X0)
    : domain_(&domain), X0_(std::move(X0)) {
  if (X0_.size() != domain.dim())
    throw std::invalid_argument("TransformFrame: base point dimension mismatch");
  x0_ = X0_.head(domain.dim() - 1);
}

Vec TransformFrame::psi_shift(const Vec& Y) const {
  Vec Z = Y;
  double rho = Y.norm();
  if (rho > 0.0)
    Z(dim() - 1) += 3.0 * rho * domain_->modulus().theta_tilde(rho);
  return Z;
}

Vec TransformFrame::map_psi(const Vec& Y) const { return X0_ + psi_shift(Y); }

Vec TransformFrame::inverse_psi(const Vec& Z, double tol) const {
  // Psi(Y) = Y + g(|Y|) e_d with g(rho) = 3 rho theta_tilde(rho), a small
  // Lipschitz perturbation of the identity: damped fixed point on
  // Y <- Z - X0 - g(|Y|) e_d.
  Vec rhs = Z - X0_;
  Vec Y = rhs;
  for (int it = 0; it < 200; ++it) {
    Vec next = rhs;
    double rho = Y.norm();
    if (rho > 0.0)
      next(dim() - 1) -= 3.0 * rho * domain_->modulus().theta_tilde(rho);
    next = 0.5 * (Y + next);  // damping keeps the constant family contractive
    if ((next - Y).norm() <= tol * (1.0 + rhs.norm())) {
      // one undamped sweep tightens the limit
      Vec out = rhs;
      double rn = next.norm();
      if (rn > 0.0)
        out(dim() - 1) -= 3.0 * rn * domain_->modulus().theta_tilde(rn);
      return out;
    }
    Y = next;
  }
  throw std::runtime_error("inverse_psi: fixed point iteration did not converge");
}

Mat TransformFrame::jacobian(const Vec& Y) const {
  int d = dim();
  Mat J = Mat::Identity(d, d);
  double rho = Y.norm();
  if (rho == 0.0 || domain_->modulus().is_zero()) return J;
  double al = domain_->modulus().alpha(rho);
  J.row(d - 1) += (al / rho) * Y.transpose();
  return J;
}

double TransformFrame::det_jacobian(const Vec& Y) const {
  double rho = Y.norm();
  if (rho == 0.0 || domain_->modulus().is_zero()) return 1.0;
  return 1.0 + domain_->modulus().alpha(rho) * Y(dim() - 1) / rho;
}

EllipticData TransformFrame::elliptic(const Vec& Y) const {
  int d = dim();
  EllipticData e;
  double rho = Y.norm();
  if (rho == 0.0 || domain_->modulus().is_zero()) {
    e.A = Mat::Identity(d, d);
    e.eta_tilde = 1.0;
    e.mu = 1.0;
    e.g = Mat::Identity(d, d);
    return e;
  }
  // DPsi = I + e_d w^t with w = alpha(|Y|) Y / |Y|; Sherman-Morrison inverse.
  Vec w = (domain_->modulus().alpha(rho) / rho) * Y;
  double J = 1.0 + w(d - 1);
  Mat inv = Mat::Identity(d, d);
  inv.row(d - 1) -= (w / J).transpose();
  Mat A = J * (inv * inv.transpose());
  e.A = 0.5 * (A + A.transpose());  // exact symmetry
  e.eta_tilde = Y.dot(e.A * Y) / (rho * rho);
  e.mu = d == 2 ? 1.0 : std::pow(J / e.eta_tilde, 0.5 * (d - 2));
  e.g = e.eta_tilde * e.A.inverse();
  return e;
}

bool TransformFrame::omega_inside(const Vec& Y) const { return omega_level(Y) > 0.0; }

double TransformFrame::omega_level(const Vec& Y) const {
  int d = dim();
  double rho = Y.norm();
  double lift = rho > 0.0 ? 3.0 * rho * domain_->modulus().theta_tilde(rho) : 0.0;
  return Y(d - 1) + lift - domain_->phi(x0_ + Y.head(d - 1)) + domain_->phi(x0_);
}

Vec TransformFrame::omega_level_grad(const Vec& Y) const {
  int d = dim();
  Vec g = Vec::Zero(d);
  g(d - 1) = 1.0;
  double rho = Y.norm();
  if (rho > 0.0) g += (domain_->modulus().alpha(rho) / rho) * Y;
  g.head(d - 1) -= domain_->grad_phi(x0_ + Y.head(d - 1));
  return g;
}

double TransformFrame::omega_boundary_height(const Vec& y) const {
  // G((y, t)) is strictly increasing in t (dG/dt >= 1 - alpha > 0); bisect.
  double lo = -5.0 * domain_->R(), hi = 5.0 * domain_->R();
  Vec Y(dim());
  Y.head(dim() - 1) = y;
  Y(dim() - 1) = lo;
  if (omega_level(Y) > 0.0) return lo;
  Y(dim() - 1) = hi;
  if (omega_level(Y) < 0.0) return hi;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    Y(dim() - 1) = mid;
    (omega_level(Y) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

Vec TransformFrame::omega_outer_normal(const Vec& Y) const {
  Vec g = omega_level_grad(Y);
  return -g / g.norm();
}

double TransformFrame::convexity_defect(const Vec& Y, double tol) const {
  if (std::abs(omega_level(Y)) > tol * (1.0 + Y.norm()))
    throw std::invalid_argument("convexity_defect: point is not on the reduced boundary");
  return Y.dot(elliptic(Y).A * omega_outer_normal(Y));
}

}  // namespace freqstrat
