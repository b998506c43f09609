#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "freqstrat/field.hpp"
#include "freqstrat/singular.hpp"

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

GraphDomain flat(int d) {
  return GraphDomain(d, 0.25, GraphDomain::PhiFamily::Flat, 0.0, 0.0, DiniModulus::zero());
}

AxisBox box3() { return AxisBox{vec3(-0.5, -0.5, 0.0), vec3(0.5, 0.5, 0.5)}; }

}  // namespace

TEST_CASE("singular set of x_d is empty") {
  auto dom = flat(3);
  auto u = halfspace_poly(3, 1);
  auto set = locate_singular_set(dom, *u, box3(), 0.05);
  CHECK(set.points.empty());
}

TEST_CASE("singular set of 2 x1 x_d is the x2-axis") {
  auto dom = flat(3);
  auto u = halfspace_poly(3, 2);
  auto set = locate_singular_set(dom, *u, box3(), 0.02);
  REQUIRE(!set.points.empty());
  std::vector<double> along;
  for (const auto& p : set.points) {
    CHECK(std::abs(p.X(0)) <= 1e-8);
    CHECK(std::abs(p.X(2)) <= 1e-8);
    CHECK(p.residual <= 1e-8);
    CHECK(p.tag == PointTag::Singular);
    along.push_back(p.X(1));
  }
  std::sort(along.begin(), along.end());
  // axis coverage within the scan resolution
  for (double t = -0.4; t <= 0.4001; t += 0.1) {
    double best = 1e9;
    for (double a : along) best = std::min(best, std::abs(a - t));
    CHECK(best <= 0.02);
  }
  // dedup radius h/2
  for (size_t i = 1; i < along.size(); ++i) CHECK(along[i] - along[i - 1] >= 0.01 - 1e-12);
}

TEST_CASE("degree-3 singular point at the origin") {
  auto dom = flat(2);
  auto u = halfspace_poly(2, 3);
  auto set = locate_singular_set(dom, *u, AxisBox{vec2(-0.5, 0.0), vec2(0.5, 0.5)}, 0.02);
  REQUIRE(!set.points.empty());
  for (const auto& p : set.points) CHECK(p.X.norm() <= 1e-6);
}

TEST_CASE("newton refinement of a singular seed") {
  auto dom = flat(3);
  auto u = halfspace_poly(3, 2);
  auto ref = refine_singular_point(dom, *u, vec3(0.02, 0.2, 0.03), 1.0);
  REQUIRE(ref.has_value());
  CHECK(std::abs(ref->X(0)) <= 1e-9);
  CHECK(std::abs(ref->X(2)) <= 1e-9);
  CHECK(ref->X(1) == doctest::Approx(0.2).epsilon(0.25));
  CHECK(ref->residual <= 1e-10);
  auto lin = halfspace_poly(3, 1);
  CHECK(!refine_singular_point(dom, *lin, vec3(0.1, 0.1, 0.2), 1.0).has_value());
}

TEST_CASE("densify curve fills axis gaps") {
  auto dom = flat(3);
  auto u = halfspace_poly(3, 2);
  std::vector<Vec> sparse;
  for (double t = -0.4; t <= 0.4001; t += 0.1) sparse.push_back(vec3(0, t, 0));
  auto dense = densify_curve(dom, *u, sparse, 0.01);
  CHECK(dense.size() >= 75);
  std::vector<double> ts;
  for (const auto& p : dense) {
    CHECK(std::abs(p(0)) <= 1e-8);
    CHECK(std::abs(p(2)) <= 1e-8);
    ts.push_back(p(1));
  }
  std::sort(ts.begin(), ts.end());
  for (size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] - ts[i - 1] <= 0.012);
}

TEST_CASE("alpha_d1 frozen values") {
  CHECK(alpha_d1(2) == doctest::Approx(1.5957691216057307).epsilon(1e-12));  // sqrt(8/pi)
  CHECK(alpha_d1(3) == doctest::Approx(1.5450968080927583).epsilon(1e-12));  // sqrt(15/(2pi))
}

TEST_CASE("effective critical test") {
  QuadSpec q = QuadSpec::dflt(2);
  auto dom2 = flat(2);
  auto lin = halfspace_poly(2, 1);
  double a0 = 0.25 * alpha_d1(2);
  // unit gradient: never effectively critical
  for (double r : {0.05, 0.2}) {
    CHECK(!effective_critical_test(dom2, *lin, vec2(0.0, 0.3), r, a0, 0.3, q));
    CHECK(!effective_critical_test(dom2, *lin, vec2(0.1, 0.0), r, a0, 0.3, q));
  }
  // exact critical point: always a member
  auto u2 = halfspace_poly(2, 2);
  for (double r : {0.05, 0.2}) CHECK(effective_critical_test(dom2, *u2, vec2(0, 0), r, a0, 0.3, q));
  // nodal but noncritical point in d = 3
  auto dom3 = flat(3);
  auto u3 = halfspace_poly(3, 2);
  QuadSpec q3 = QuadSpec::dflt(3);
  CHECK(!effective_critical_test(dom3, *u3, vec3(0.5, 0, 0), 0.1, 0.2, 0.3, q3));
  CHECK(effective_critical_test(dom3, *u3, vec3(0, 0.2, 0), 0.1, 0.2, 0.3, q3));
}

TEST_CASE("effective critical membership is dyadic intersection") {
  auto dom = flat(2);
  auto u = halfspace_poly(2, 2);
  QuadSpec q = QuadSpec::dflt(2);
  double a0 = 0.25 * alpha_d1(2);
  CHECK(effective_critical_member(dom, *u, vec2(0, 0), 0.05, 0.4, a0, 0.3, q));
  CHECK(!effective_critical_member(dom, *u, vec2(0.45, 0.0), 0.05, 0.4, a0, 0.3, q));
}

TEST_CASE("effective spanning: spread points span") {
  std::vector<Vec> F = {vec3(0, 0, 0), vec3(1, 0, 0), vec3(0, 1, 0)};
  auto cert = effective_spanning_test(F, 2, 0.5, 1.0);
  CHECK(cert.spans);
  REQUIRE(cert.tuple.size() == 3);
  for (double d : cert.step_dists) CHECK(d > 0.5);
  // soundness: recompute step distances against the affine span of predecessors
  for (size_t i = 1; i < cert.tuple.size(); ++i) {
    const Vec& y = F[cert.tuple[i]];
    Vec base = F[cert.tuple[0]];
    Mat B(3, i - 0);
    for (size_t j = 1; j <= i; ++j) B.col(j - 1) = F[cert.tuple[j]] - base;
    Vec rel = y - base;
    Mat Bprev = B.leftCols(i - 1);
    Vec proj = Bprev.cols() > 0
                   ? Vec(Bprev * (Bprev.transpose() * Bprev)
                                     .ldlt()
                                     .solve(Bprev.transpose() * rel))
                   : Vec(Vec::Zero(3));
    CHECK((rel - proj).norm() == doctest::Approx(cert.step_dists[i - 1]).epsilon(1e-10));
  }
}

TEST_CASE("effective spanning: collinear points yield a line certificate") {
  std::vector<Vec> F;
  for (double t = 0; t <= 1.0001; t += 0.1) F.push_back(vec3(t, 2 * t, 0));
  auto cert = effective_spanning_test(F, 2, 0.01, 1.0);
  CHECK(!cert.spans);
  CHECK(cert.directions.cols() == 1);
  CHECK(cert.max_containment_dist <= 1e-12);
  Vec dir = cert.directions.col(0);
  Vec expect = vec3(1, 2, 0).normalized();
  CHECK(std::abs(std::abs(dir.dot(expect)) - 1.0) <= 1e-12);
}

TEST_CASE("effective spanning: slab cloud yields the plane") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<Vec> F;
  // slab thin enough that the fitted normal is geometry- not noise-limited
  for (int i = 0; i < 40; ++i) F.push_back(vec3(U(rng), U(rng), 0.005 * U(rng)));
  auto cert = effective_spanning_test(F, 3, 0.1, 1.0);
  CHECK(!cert.spans);
  REQUIRE(cert.directions.cols() == 2);
  // recovered plane normal close to e3
  Vec a = cert.directions.col(0), b = cert.directions.col(1);
  Vec n = vec3(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2),
               a(0) * b(1) - a(1) * b(0));
  n.normalize();
  CHECK(std::abs(std::abs(n(2)) - 1.0) <= 5e-5);  // angle <= 1e-2
  CHECK(cert.max_containment_dist <= 0.1);
  for (const auto& p : F)
    CHECK((p - cert.base - cert.directions * (cert.directions.transpose() * (p - cert.base)))
              .norm() <= cert.max_containment_dist + 1e-12);
  CHECK_THROWS(effective_spanning_test({}, 2, 0.1, 1.0));
}

TEST_CASE("spine invariance along the x2-axis") {
  auto dom = flat(3);
  auto u = halfspace_poly(3, 2);
  QuadSpec q = QuadSpec::dflt(3);
  auto rep = spine_invariance_check(dom, *u, vec3(0, 0, 0), vec3(0, 0.3, 0),
                                    {0.05, 0.1, 0.2}, 20.0, q);
  CHECK(rep.applicable);
  CHECK(!rep.linear);
  CHECK(rep.profile_drop <= 1e-8);
  CHECK(rep.max_deviation <= 1e-10);
}

TEST_CASE("spine invariance: linear field triggers the linear alternative") {
  auto dom = flat(3);
  auto u = halfspace_poly(3, 1);
  QuadSpec q = QuadSpec::dflt(3);
  auto rep = spine_invariance_check(dom, *u, vec3(0, 0, 0), vec3(0.2, 0.1, 0),
                                    {0.05, 0.1, 0.2}, 20.0, q);
  CHECK(rep.applicable);
  CHECK(rep.linear);
}

TEST_CASE("spine invariance: non-constant profile is not applicable") {
  auto dom = flat(3);
  auto u = halfspace_poly(3, 2);
  QuadSpec q = QuadSpec::dflt(3);
  auto rep = spine_invariance_check(dom, *u, vec3(0, 0, 0), vec3(0.3, 0, 0),
                                    {0.05, 0.1, 0.2, 0.4}, 20.0, q);
  CHECK(!rep.applicable);
  CHECK(rep.profile_drop > 1e-3);
}
