#include <cmath>
#include <random>

#include "doctest.h"
#include "freqstrat/beta.hpp"
#include "freqstrat/field.hpp"

using namespace freqstrat;

namespace {

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

WeightedCloud three_atoms() {
  WeightedCloud mu;
  mu.points = {vec3(0, 0, 0), vec3(1, 0, 0), vec3(0, 1, 0)};
  return mu;
}

Mat random_rotation(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> G(0.0, 1.0);
  Mat A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = G(rng);
  Eigen::HouseholderQR<Mat> qr(A);
  Mat Q = qr.householderQ();
  if (Q.determinant() < 0) Q.col(0) *= -1.0;
  return Q;
}

WeightedCloud random_cloud(int d, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  WeightedCloud mu;
  std::uniform_real_distribution<double> W(0.1, 2.0);
  for (int i = 0; i < n; ++i) {
    Vec p(d);
    for (int j = 0; j < d; ++j) p(j) = U(rng);
    mu.points.push_back(p);
    mu.weights.push_back(W(rng));
  }
  return mu;
}

}  // namespace

TEST_CASE("jacobi eigenvalues match the library solver") {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> G(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    int d = 2 + trial % 3;
    Mat A(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) A(i, j) = G(rng);
    Mat S = 0.5 * (A + A.transpose());
    Vec evals;
    Mat evecs;
    jacobi_eigen_sym(S, evals, evecs);
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    for (int i = 0; i < d; ++i) {
      CHECK(evals(i) == doctest::Approx(es.eigenvalues()(d - 1 - i)).epsilon(1e-12).scale(1.0));
      CHECK(evals(i) >= (i + 1 < d ? evals(i + 1) : evals(i)) - 1e-14);
      CHECK((S * evecs.col(i) - evals(i) * evecs.col(i)).norm() <= 1e-11);
    }
    CHECK((evecs.transpose() * evecs - Mat::Identity(d, d)).norm() <= 1e-12);
  }
}

TEST_CASE("three-atom moment oracle") {
  auto mu = three_atoms();
  auto b = beta_number(mu, vec3(0, 0, 0), 2.0, 1);
  CHECK(!b.empty);
  CHECK(b.center_of_mass(0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(b.center_of_mass(1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  // Q eigenvalues: {1, 1/3, 0} / r^{2+k} = {1/8, 1/24, 0}
  CHECK(b.lambdas(0) == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(b.lambdas(1) == doctest::Approx(0.041666666666666667).epsilon(1e-13));
  CHECK(b.lambdas(2) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(b.beta == doctest::Approx(0.20412414523193151).epsilon(1e-12));
  // optimal line direction (1, -1, 0)/sqrt(2)
  Vec dir = b.eigvecs.col(0);
  CHECK(std::abs(std::abs(dir.dot(vec3(1, -1, 0).normalized())) - 1.0) <= 1e-12);
}

TEST_CASE("degenerate clouds") {
  WeightedCloud single;
  single.points = {vec3(0.3, 0.1, -0.2)};
  auto b = beta_number(single, vec3(0, 0, 0), 1.0, 1);
  CHECK(!b.empty);
  CHECK(b.beta == 0.0);
  CHECK((b.center_of_mass - single.points[0]).norm() <= 1e-15);
  CHECK(b.lambdas.norm() <= 1e-15);
  auto e = beta_number(single, vec3(5, 5, 5), 1.0, 1);
  CHECK(e.empty);
  CHECK(e.beta == 0.0);
  // planar cloud: beta^2 = 0 for the plane dimension
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  WeightedCloud planar;
  for (int i = 0; i < 20; ++i) planar.points.push_back(vec3(U(rng), U(rng), 0.0));
  CHECK(beta_number(planar, vec3(0, 0, 0), 2.0, 2).beta <= 1e-12);
}

TEST_CASE("closed-ball membership at the boundary radius") {
  WeightedCloud mu;
  mu.points = {vec3(0, 0, 0), vec3(1, 0, 0)};
  CHECK(mu.mass_in_ball(vec3(0, 0, 0), 1.0) == doctest::Approx(2.0));
  auto b = beta_number(mu, vec3(0, 0, 0), 1.0, 1);
  CHECK(b.center_of_mass(0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("oracle equivalence on random clouds") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    int d = 2 + trial % 2;
    int n = 2 + trial % 5;
    auto mu = random_cloud(d, n, rng);
    Vec p = Vec::Zero(d);
    double r = 2.0;
    for (int k = 1; k <= d - 1; ++k) {
      double be = beta_number(mu, p, r, k).beta;
      double bs = beta_plane_search(mu, p, r, k);
      CAPTURE(trial);
      CAPTURE(k);
      CHECK(be == doctest::Approx(bs).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("beta invariances") {
  std::mt19937_64 rng(99);
  auto mu = random_cloud(3, 6, rng);
  Vec p = vec3(0.1, -0.2, 0.05);
  double r = 1.5;
  double b0 = beta_number(mu, p, r, 1).beta;
  // rigid motion
  Mat Q = random_rotation(3, rng);
  Vec t = vec3(0.4, -1.0, 2.0);
  WeightedCloud moved = mu;
  for (auto& x : moved.points) x = Q * x + t;
  CHECK(beta_number(moved, Q * p + t, r, 1).beta == doctest::Approx(b0).epsilon(1e-10));
  // joint scaling of a k-dimensional measure: weights carry s^k
  WeightedCloud scaled = mu;
  for (auto& x : scaled.points) x = 3.7 * x;
  for (auto& w : scaled.weights) w *= 3.7;
  CHECK(beta_number(scaled, 3.7 * p, 3.7 * r, 1).beta == doctest::Approx(b0).epsilon(1e-10));
  // monotonicity in k
  CHECK(beta_number(mu, p, r, 1).beta >= beta_number(mu, p, r, 2).beta - 1e-14);
}

TEST_CASE("dini beta integral") {
  // collinear or single-atom measures have vanishing integrals
  WeightedCloud line;
  for (double t = 0; t <= 1.0001; t += 0.125) line.points.push_back(vec3(t, 0, 0));
  CHECK(dini_beta_integral(line, vec3(0.5, 0, 0), 1.0, 1) <= 1e-13);
  WeightedCloud single;
  single.points = {vec3(0, 0, 0)};
  CHECK(dini_beta_integral(single, vec3(0, 0, 0), 1.0, 1) == 0.0);
  // 3-atom cloud: positive, matching a 10x finer radial grid within 2%
  auto mu = three_atoms();
  double coarse = dini_beta_integral(mu, vec3(0, 0, 0), 2.0, 1);
  double fine = dini_beta_integral(mu, vec3(0, 0, 0), 2.0, 1, std::pow(2.0, 1.0 / 40));
  CHECK(coarse > 0.0);
  CHECK(coarse == doctest::Approx(fine).epsilon(0.02));
  // packing cutoff: radii with r_X/5 below the nearest-neighbor distance agree
  std::vector<double> radii(mu.points.size(), 0.5);
  double with_radii = dini_beta_integral(mu, vec3(0, 0, 0), 2.0, 1, 1.189207115002721, &radii);
  CHECK(with_radii > 0.0);
  CHECK(with_radii <= coarse + 1e-12);
}

TEST_CASE("beta-frequency bound report trivial cases") {
  GraphDomain dom(3, 0.25, GraphDomain::PhiFamily::Flat, 0.0, 0.0, DiniModulus::zero());
  auto u = halfspace_poly(3, 2);
  QuadSpec q = QuadSpec::light(3);
  // measure on the exact singular line: lhs = 0, rhs >= 0, ratio 0
  WeightedCloud axis;
  for (double t = -0.2; t <= 0.2001; t += 0.05) axis.points.push_back(vec3(0, t, 0));
  auto rep = beta_frequency_bound_check(dom, *u, axis, vec3(0, 0, 0), 0.25, 0.1, 20.0, q);
  CHECK(rep.lhs <= 1e-12);
  CHECK(rep.rhs >= 0.0);
  CHECK(rep.ratio == 0.0);
  // theta == 0: mass term reduces to mu(B_r(p)) in d = 3
  CHECK(rep.mass_term == doctest::Approx(axis.mass_in_ball(vec3(0, 0, 0), 0.25)).epsilon(1e-12));
  // single atom
  WeightedCloud single;
  single.points = {vec3(0, 0.1, 0)};
  auto rs = beta_frequency_bound_check(dom, *u, single, vec3(0, 0.1, 0), 0.25, 0.1, 20.0, q);
  CHECK(rs.lhs == 0.0);
  CHECK(rs.ratio == 0.0);
}
