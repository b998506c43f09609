#include <cmath>

#include "doctest.h"
#include "freqstrat/field.hpp"
#include "freqstrat/frequency.hpp"

using namespace freqstrat;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

GraphDomain flat2() {
  return GraphDomain(2, 0.25, GraphDomain::PhiFamily::Flat, 0.0, 0.0, DiniModulus::zero());
}

// Oracle for the mixed field u = x_d + 2 x1 x_d on the flat half-plane:
//   D(r) = (pi r^2/2)(1 + 2r^2),  H(r) = (pi r^3/2)(1 + r^2),
//   N(r) = (1 + 2r^2)/(1 + r^2),  N'(r) = 2r/(1 + r^2)^2.
double mixed_N(double r) { return (1 + 2 * r * r) / (1 + r * r); }

// Adapter so a rescaled field can feed the frequency integrals.
struct RescaledAsField : HarmonicField {
  RescaledField T;
  explicit RescaledAsField(RescaledField t) : T(std::move(t)) {}
  int dim() const override { return T.center().size(); }
  double value(const Vec& X) const override { return T.value(X); }
  Vec gradient(const Vec& X) const override { return T.gradient(X); }
  std::string describe() const override { return "rescaled"; }
};

}  // namespace

TEST_CASE("homogeneous fields have constant frequency N") {
  QuadSpec q2 = QuadSpec::dflt(2), q3 = QuadSpec::dflt(3);
  auto dom2 = flat2();
  GraphDomain dom3(3, 0.25, GraphDomain::PhiFamily::Flat, 0.0, 0.0, DiniModulus::zero());
  TransformFrame fr2(dom2, vec2(0, 0)), fr3(dom3, vec3(0, 0, 0));
  for (int N = 1; N <= 3; ++N) {
    auto u2 = halfspace_poly(2, N);
    auto u3 = halfspace_poly(3, N);
    for (double r : {1.0 / 128, 1.0 / 16, 0.25, 0.5}) {
      CAPTURE(N);
      CAPTURE(r);
      auto s2 = boundary_frequency(fr2, *u2, r, 20.0, q2);
      CHECK(s2.N == doctest::Approx(double(N)).epsilon(1e-8));
      CHECK(s2.N_mod == doctest::Approx(double(N)).epsilon(1e-8));  // theta == 0
      auto s3 = boundary_frequency(fr3, *u3, r, 20.0, q3);
      CHECK(s3.N == doctest::Approx(double(N)).epsilon(1e-7));
    }
  }
}

TEST_CASE("mixed field frequency and derivative at r = 1/4") {
  auto dom = flat2();
  TransformFrame fr(dom, vec2(0, 0));
  auto u = sum_of_polys(2, {1, 2}, {1.0, 1.0});
  QuadSpec q = QuadSpec::dflt(2);
  auto s = boundary_frequency(fr, *u, 0.25, 20.0, q);
  CHECK(s.N == doctest::Approx(1.0588235294117647).epsilon(1e-8));  // 18/17
  CHECK(s.D == doctest::Approx(0.5 * M_PI * 0.0625 * 1.125).epsilon(1e-8));
  CHECK(s.H == doctest::Approx(0.5 * M_PI * 0.015625 * 1.0625).epsilon(1e-8));
  // exact identity on the flat half-plane: dN/dr = R_h, R_b = 0
  auto [Rh, Rb] = monotonicity_residuals(fr, *u, 0.25, q);
  CHECK(Rh == doctest::Approx(0.44290657439446367).epsilon(1e-6));  // 128/289
  CHECK(std::abs(Rb) <= 1e-10);
  CHECK(frequency_derivative(fr, *u, 0.25, q) ==
        doctest::Approx(0.44290657439446367).epsilon(1e-5));
}

TEST_CASE("rigidity: homogeneous residuals vanish") {
  auto dom = flat2();
  TransformFrame fr(dom, vec2(0, 0));
  QuadSpec q = QuadSpec::dflt(2);
  for (int N = 1; N <= 3; ++N) {
    auto u = halfspace_poly(2, N);
    auto [Rh, Rb] = monotonicity_residuals(fr, *u, 0.25, q);
    CHECK(std::abs(Rh) <= 1e-8);
    CHECK(std::abs(Rb) <= 1e-8);
  }
}

TEST_CASE("interior frequency of x_d about an interior point") {
  auto dom = flat2();
  auto u = halfspace_poly(2, 1);
  QuadSpec q = QuadSpec::dflt(2);
  auto s = interior_frequency(dom, *u, vec2(0, 1.0), 0.5, q);
  CHECK(s.D == doctest::Approx(M_PI / 4).epsilon(1e-10));
  CHECK(s.H == doctest::Approx(M_PI / 8).epsilon(1e-10));
  CHECK(s.N == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.branch == FreqBranch::Interior);
}

TEST_CASE("scale invariance of the frequency under rescaling") {
  auto dom = flat2();
  GraphDomain dom_scaled(2, 0.5, GraphDomain::PhiFamily::Flat, 0.0, 0.0, DiniModulus::zero());
  auto u = sum_of_polys(2, {1, 2}, {1.0, 1.0});
  QuadSpec q = QuadSpec::dflt(2);
  const double r = 0.5;
  RescaledAsField T(RescaledField(u, dom, vec2(0, 0), r, q));
  TransformFrame fr(dom_scaled, vec2(0, 0)), fr_base(dom, vec2(0, 0));
  for (double s : {0.25, 0.5}) {
    double NT = boundary_frequency(fr, T, s, 20.0, q).N;
    double Nu = boundary_frequency(fr_base, *u, r * s, 20.0, q).N;
    CHECK(NT == doctest::Approx(Nu).epsilon(1e-8));
    CHECK(NT == doctest::Approx(mixed_N(r * s)).epsilon(1e-8));
  }
}

TEST_CASE("critical scale solve") {
  GraphDomain dom(2, 0.25, GraphDomain::PhiFamily::Flat, 0.0, 0.0,
                  DiniModulus::power(1.0, 1.0), true);
  // theta = r: r theta~(r) = r^2 / log^2 2 = dist  =>  r = log 2 sqrt(dist)
  CHECK(critical_scale(dom, vec2(0, 0.04)) ==
        doctest::Approx(0.13862943611198906).epsilon(1e-10));
  CHECK(critical_scale(dom, vec2(0.1, 0.0)) == 0.0);
  auto flat = flat2();
  CHECK(critical_scale(flat, vec2(0, 0.04)) == kBeyondRange);
}

TEST_CASE("unified frequency branches") {
  GraphDomain dom(2, 0.25, GraphDomain::PhiFamily::Flat, 0.0, 0.0,
                  DiniModulus::power(1.0, 1.0), true);
  auto u = sum_of_polys(2, {1, 2}, {1.0, 1.0});
  QuadSpec q = QuadSpec::dflt(2);
  Vec X = vec2(0, 0.04);
  double rcs = critical_scale(dom, X);
  auto si = unified_frequency(dom, *u, X, 0.5 * rcs, 20.0, q);
  CHECK(si.branch == FreqBranch::Interior);
  auto sb = unified_frequency(dom, *u, X, 2.0 * rcs, 20.0, q);
  CHECK(sb.branch == FreqBranch::BoundaryReplaced);
  // the replaced value equals the boundary frequency at the nearest boundary point
  TransformFrame fr(dom, dom.nearest_boundary_point(X));
  CHECK(sb.N == doctest::Approx(boundary_frequency(fr, *u, 2.0 * rcs, 20.0, q).N)
                    .epsilon(1e-12));
  auto s0 = unified_frequency(dom, *u, vec2(0, 0), 0.1, 20.0, q);
  CHECK(s0.branch == FreqBranch::Boundary);
  // profile: radii increasing, r_cs recorded, N_mod = N e^{C I(r)}, I(r) = 4r
  auto prof = unified_frequency_profile(dom, *u, X, {0.05, 0.1, 0.3}, 2.0, q);
  CHECK(prof.r_cs == doctest::Approx(rcs).epsilon(1e-12));
  REQUIRE(prof.samples.size() == 3);
  for (const auto& s : prof.samples)
    CHECK(s.N_mod == doctest::Approx(s.N * std::exp(2.0 * 4.0 * s.r)).epsilon(1e-12));
}

TEST_CASE("modified frequency nondecreasing on a Dini half-plane") {
  GraphDomain dom(2, 0.25, GraphDomain::PhiFamily::Flat, 0.0, 0.0,
                  DiniModulus::power(0.02, 1.0), true);
  auto u = sum_of_polys(2, {1, 2}, {1.0, 1.0});
  QuadSpec q = QuadSpec::dflt(2);
  TransformFrame fr(dom, vec2(0, 0));
  double prev = 0.0;
  for (double r : {0.0625, 0.125, 0.25, 0.5}) {
    double nm = boundary_frequency(fr, *u, r, 20.0, q).N_mod;
    CHECK(nm >= prev - 1e-9);
    prev = nm;
  }
}

TEST_CASE("frequency drops of the mixed field") {
  auto dom = flat2();
  auto u = sum_of_polys(2, {1, 2}, {1.0, 1.0});
  QuadSpec q = QuadSpec::dflt(2);
  // W(r) = N(3r/2) - N(r/2) at r = 0.2; W~(r) = N(6r) - N(r) at r = 0.05
  CHECK(frequency_drop(dom, *u, vec2(0, 0), 0.2, 20.0, q) ==
        doctest::Approx(0.0726678172404396).epsilon(1e-7));
  CHECK(frequency_drop_wide(dom, *u, vec2(0, 0), 0.05, 20.0, q) ==
        doctest::Approx(0.0800750417534146).epsilon(1e-7));
  auto h = halfspace_poly(2, 2);
  CHECK(std::abs(frequency_drop(dom, *h, vec2(0, 0), 0.2, 20.0, q)) <= 1e-8);
}

TEST_CASE("doubling sandwich") {
  auto dom = flat2();
  QuadSpec q = QuadSpec::dflt(2);
  TransformFrame fr(dom, vec2(0, 0));
  // exact homogeneous: ratio = (r2/r1)^{2N}
  auto h2 = halfspace_poly(2, 2);
  auto rep = doubling_check(fr, *h2, 0.125, 0.5, 20.0, q);
  CHECK(rep.ratio == doctest::Approx(256.0).epsilon(1e-6));
  CHECK(rep.pass);
  CHECK(rep.lower <= rep.ratio * (1 + 1e-9));
  CHECK(rep.upper >= rep.ratio * (1 - 1e-9));
  // mixed field on a Dini domain: sandwich with slack
  GraphDomain domd(2, 0.25, GraphDomain::PhiFamily::Flat, 0.0, 0.0,
                   DiniModulus::power(0.02, 1.0), true);
  TransformFrame frd(domd, vec2(0, 0));
  auto u = sum_of_polys(2, {1, 2}, {1.0, 1.0});
  CHECK(doubling_check(frd, *u, 0.125, 0.5, 20.0, q).pass);
}

TEST_CASE("trivial field is rejected") {
  auto dom = flat2();
  TransformFrame fr(dom, vec2(0, 0));
  auto z = sum_of_polys(2, {1}, {0.0});
  CHECK_THROWS(boundary_frequency(fr, *z, 0.25, 20.0, QuadSpec::dflt(2)));
}
