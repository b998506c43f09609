#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "freqstrat/domain.hpp"
#include "freqstrat/quadrature.hpp"

namespace freqstrat {

// Harmonic function on closure(D), vanishing on the boundary surface ball,
// extended by zero outside D. Evaluation is pure and thread-safe.
class HarmonicField {
public:
  virtual ~HarmonicField() = default;
  virtual int dim() const = 0;
  // Raw evaluators on closure(D); callers clip to D via the domain.
  virtual double value(const Vec& X) const = 0;
  virtual Vec gradient(const Vec& X) const = 0;
  virtual std::string describe() const = 0;
};

using FieldPtr = std::shared_ptr<const HarmonicField>;

// Im((x1 + i x_d)^N), harmonic, vanishes on {x_d = 0}; depends only on the
// (x1, x_d) plane coordinates in any ambient dimension.
FieldPtr halfspace_poly(int dim, int N);
// Im((x1' + i xd')^N) in coordinates rotated by angle atan(slope) in the
// (x1, x_d) plane; vanishes on the tilted hyperplane.
FieldPtr tilted_halfspace_poly(int dim, int N, double slope);
// sum_k coeff[k] * halfspace_poly(deg[k])
FieldPtr sum_of_polys(int dim, const std::vector<int>& degs, const std::vector<double>& coeffs);
// halfspace_poly(N) + eps * halfspace_poly(M)
FieldPtr perturbed_poly(int dim, int N, double eps, int M);

// Factory from a config-style name; throws on unknown name or bad degree.
FieldPtr make_model_field(int dim, const std::string& name, const std::vector<double>& params);

// T_{X,r}u(Y) = (u(X + rY) - u(X)) / ||u - u(X)||_{L2-avg, B_r(X) ∩ D}.
class RescaledField {
public:
  RescaledField(FieldPtr base, const GraphDomain& domain, Vec X, double r,
                const QuadSpec& q);
  double value(const Vec& Y) const;
  Vec gradient(const Vec& Y) const;
  double normalizer() const { return norm_; }
  const Vec& center() const { return X_; }
  double scale() const { return r_; }

private:
  FieldPtr base_;
  const GraphDomain* domain_;
  Vec X_;
  double r_, uX_, norm_;
};

}  // namespace freqstrat
