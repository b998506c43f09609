#pragma once

#include <Eigen/Dense>

#include "freqstrat/dini.hpp"

namespace freqstrat {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Domain above a C^1 graph: D = {(x, x_d) : x_d > phi(x)} inside B_{5R}(0),
// with phi(0) = 0, grad phi(0) = 0 and grad phi Dini-continuous with modulus
// theta. Graph families:
//   flat    phi = 0
//   power   phi(x) = c |x|^p, p in (1, 2]; grad phi = c p |x|^{p-2} x
class GraphDomain {
public:
  enum class PhiFamily { Flat, Power };

  // Validates the scale conditions (Dini integral over (0,16R] <= 1 and
  // theta(8R) < 1/72) unless relax_scale_checks skips them.
  GraphDomain(int dim, double R, PhiFamily phi_family, double phi_c, double phi_p,
              DiniModulus modulus, bool relax_scale_checks = false);

  int dim() const { return d_; }
  double R() const { return R_; }
  const DiniModulus& modulus() const { return modulus_; }
  PhiFamily phi_family() const { return phi_family_; }

  // phi and its gradient; x has d-1 components.
  double phi(const Vec& x) const;
  Vec grad_phi(const Vec& x) const;

  bool inside(const Vec& X) const;            // x_d > phi(x)
  double signed_height(const Vec& X) const;   // x_d - phi(x)

  // Euclidean distance to the graph and the nearest boundary point.
  // Exact for flat phi; 1-D minimization along the radial section otherwise.
  double dist_to_boundary(const Vec& X) const;
  Vec nearest_boundary_point(const Vec& X) const;

  // Worst ratio |grad phi(x)-grad phi(y)| / theta(|x-y|) over sampled pairs
  // in B_{5R}; diagnostic only (1.0 means the modulus bound is sharp).
  double modulus_fit_ratio(int samples_per_axis = 24) const;

  double lipschitz_bound() const { return C0_; }

private:
  int d_;
  double R_;
  PhiFamily phi_family_;
  double phi_c_, phi_p_;
  DiniModulus modulus_;
  double C0_;
};

}  // namespace freqstrat
