#include "freqstrat/field.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace freqstrat {

namespace {

// coeff-free building block: Im((x1' + i xd')^N) with (x1', xd') the
// (x1, xd)-plane coordinates rotated by atan(slope).
class PlanePoly : public HarmonicField {
public:
  PlanePoly(int dim, int N, double slope) : dim_(dim), N_(N) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("model field: dim must be 2 or 3");
    if (N < 1) throw std::invalid_argument("model field: degree must be >= 1");
    double a = std::atan(slope);
    c_ = std::cos(a);
    s_ = std::sin(a);
    slope_ = slope;
  }

  int dim() const override { return dim_; }

  double value(const Vec& X) const override {
    std::complex<double> z = plane(X), zp(1.0, 0.0);
    for (int k = 0; k < N_; ++k) zp *= z;
    return zp.imag();
  }

  Vec gradient(const Vec& X) const override {
    std::complex<double> z = plane(X), zp(1.0, 0.0);
    for (int k = 0; k < N_ - 1; ++k) zp *= z;
    zp *= double(N_);
    Vec g = Vec::Zero(dim_);
    g(0) = c_ * zp.imag() - s_ * zp.real();
    g(dim_ - 1) = s_ * zp.imag() + c_ * zp.real();
    return g;
  }

  std::string describe() const override {
    std::ostringstream os;
    if (slope_ == 0.0)
      os << "halfspace_poly(" << N_ << ")";
    else
      os << "tilted_halfspace_poly(" << N_ << ", " << slope_ << ")";
    return os.str();
  }

private:
  std::complex<double> plane(const Vec& X) const {
    double x1 = X(0), xd = X(dim_ - 1);
    return {c_ * x1 + s_ * xd, -s_ * x1 + c_ * xd};
  }

  int dim_, N_;
  double c_, s_, slope_;
};

class SumField : public HarmonicField {
public:
  SumField(int dim, std::vector<double> coeffs, std::vector<FieldPtr> terms)
      : dim_(dim), coeffs_(std::move(coeffs)), terms_(std::move(terms)) {}

  int dim() const override { return dim_; }

  double value(const Vec& X) const override {
    double v = 0.0;
    for (size_t k = 0; k < terms_.size(); ++k) v += coeffs_[k] * terms_[k]->value(X);
    return v;
  }

  Vec gradient(const Vec& X) const override {
    Vec g = Vec::Zero(dim_);
    for (size_t k = 0; k < terms_.size(); ++k) g += coeffs_[k] * terms_[k]->gradient(X);
    return g;
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "sum(";
    for (size_t k = 0; k < terms_.size(); ++k) {
      if (k) os << " + ";
      os << coeffs_[k] << "*" << terms_[k]->describe();
    }
    os << ")";
    return os.str();
  }

private:
  int dim_;
  std::vector<double> coeffs_;
  std::vector<FieldPtr> terms_;
};

}  // namespace

FieldPtr halfspace_poly(int dim, int N) { return std::make_shared<PlanePoly>(dim, N, 0.0); }

FieldPtr tilted_halfspace_poly(int dim, int N, double slope) {
  return std::make_shared<PlanePoly>(dim, N, slope);
}

FieldPtr sum_of_polys(int dim, const std::vector<int>& degs,
                      const std::vector<double>& coeffs) {
  if (degs.empty() || degs.size() != coeffs.size())
    throw std::invalid_argument("sum_of_polys: need matching nonempty degree/coeff lists");
  std::vector<FieldPtr> terms;
  terms.reserve(degs.size());
  for (int d : degs) terms.push_back(halfspace_poly(dim, d));
  return std::make_shared<SumField>(dim, coeffs, std::move(terms));
}

FieldPtr perturbed_poly(int dim, int N, double eps, int M) {
  return std::make_shared<SumField>(
      dim, std::vector<double>{1.0, eps},
      std::vector<FieldPtr>{halfspace_poly(dim, N), halfspace_poly(dim, M)});
}

FieldPtr make_model_field(int dim, const std::string& name,
                          const std::vector<double>& params) {
  auto as_deg = [&](double p) {
    int n = int(std::lround(p));
    if (n < 1) throw std::invalid_argument("model field: degree must be >= 1");
    return n;
  };
  if (name == "halfspace_poly") {
    if (params.size() != 1) throw std::invalid_argument("halfspace_poly: params = {N}");
    return halfspace_poly(dim, as_deg(params[0]));
  }
  if (name == "tilted_halfspace_poly") {
    if (params.size() != 2)
      throw std::invalid_argument("tilted_halfspace_poly: params = {N, slope}");
    return tilted_halfspace_poly(dim, as_deg(params[0]), params[1]);
  }
  if (name == "sum_of_polys") {
    if (params.size() < 2 || params.size() % 2 != 0)
      throw std::invalid_argument("sum_of_polys: params = {deg, coeff, ...}");
    std::vector<int> degs;
    std::vector<double> coeffs;
    for (size_t k = 0; k < params.size(); k += 2) {
      degs.push_back(as_deg(params[k]));
      coeffs.push_back(params[k + 1]);
    }
    return sum_of_polys(dim, degs, coeffs);
  }
  if (name == "perturbed_poly") {
    if (params.size() != 3)
      throw std::invalid_argument("perturbed_poly: params = {N, eps, M}");
    return perturbed_poly(dim, as_deg(params[0]), params[1], as_deg(params[2]));
  }
  throw std::invalid_argument("unknown model field: " + name);
}

RescaledField::RescaledField(FieldPtr base, const GraphDomain& domain, Vec X, double r,
                             const QuadSpec& q)
    : base_(std::move(base)), domain_(&domain), X_(std::move(X)), r_(r) {
  if (!(r > 0.0)) throw std::invalid_argument("rescaled field: r must be positive");
  uX_ = base_->value(X_);
  auto dev2 = [&](const Vec& Z) {
    double dv = base_->value(Z) - uX_;
    return dv * dv;
  };
  auto ins = [&](const Vec& Z) { return domain_->inside(Z); };
  double mass = ball_integrate(dev2, ins, X_, r_, q) / std::pow(r_, base_->dim());
  if (!(mass > 1e-30))
    throw std::invalid_argument("rescaled field: degenerate L2 normalizer");
  norm_ = std::sqrt(mass);
}

double RescaledField::value(const Vec& Y) const {
  return (base_->value(X_ + r_ * Y) - uX_) / norm_;
}

Vec RescaledField::gradient(const Vec& Y) const {
  return (r_ / norm_) * base_->gradient(X_ + r_ * Y);
}

}  // namespace freqstrat
