// End-to-end acceptance suite. Each criterion prints exactly one PASS/FAIL
// line; the process exits nonzero iff any criterion failed. Tolerances and
// runtime caps are fixed here, not configurable.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "freqstrat/beta.hpp"
#include "freqstrat/config.hpp"
#include "freqstrat/cover.hpp"
#include "freqstrat/experiments.hpp"
#include "freqstrat/field.hpp"
#include "freqstrat/frequency.hpp"
#include "freqstrat/grid_solver.hpp"
#include "freqstrat/io_util.hpp"
#include "freqstrat/singular.hpp"

using namespace freqstrat;

namespace {

double now_s() {
  using clk = std::chrono::steady_clock;
  static const clk::time_point t0 = clk::now();
  return std::chrono::duration<double>(clk::now() - t0).count();
}

GraphDomain flat_domain(int dim, double R) {
  return GraphDomain(dim, R, GraphDomain::PhiFamily::Flat, 0.0, 2.0, DiniModulus::zero());
}

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

// Samples of the singular line of 2 x1 x3 inside B_{1/2}, found by a blind
// grid scan and densified to `spacing`.
std::vector<Vec> singular_line_samples(const GraphDomain& dom, const HarmonicField& f,
                                       double spacing) {
  AxisBox box{vec3(-0.52, -0.52, 0.0), vec3(0.52, 0.52, 0.52)};
  auto located = locate_singular_set(dom, f, box, 0.02);
  std::vector<Vec> seeds;
  for (const auto& tp : located.points) seeds.push_back(tp.X);
  auto dense = densify_curve(dom, f, seeds, spacing);
  std::vector<Vec> kept;
  for (const auto& X : dense)
    if (X.norm() <= 0.5) kept.push_back(X);
  return kept;
}

// ---------------------------------------------------------------------------
// 1. Homogeneous fields have constant frequency equal to their degree.
bool crit_homogeneous_frequency(std::string& note) {
  double t0 = now_s(), worst = 0.0;
  for (int d : {2, 3}) {
    GraphDomain dom = flat_domain(d, 0.5);
    TransformFrame frame(dom, Vec::Zero(d));
    QuadSpec q = QuadSpec::dflt(d);
    for (int deg : {1, 2, 3}) {
      auto f = halfspace_poly(d, deg);
      for (int k = 0; k < 10; ++k) {
        double r = std::pow(2.0, -7.0 + 6.0 * k / 9.0);
        FrequencySample s = boundary_frequency(frame, *f, r, 20.0, q);
        double err = std::abs(s.N - deg);
        worst = std::max(worst, err);
        if (err > 2e-3) {
          note = "d=" + std::to_string(d) + " deg=" + std::to_string(deg) +
                 " r=" + fmt17(r) + " err=" + fmt17(err);
          return false;
        }
      }
    }
  }
  double dt = now_s() - t0;
  note = "max |N - deg| = " + fmt17(worst) + ", " + fmt17(dt) + "s";
  return dt < 30.0;
}

// ---------------------------------------------------------------------------
// 2. Modified frequency of a grid-solved field on a curved domain is
//    nondecreasing within eps = 1e-4 (1 + Ntil); interior profiles monotone
//    up to the critical scale.
bool crit_monotonicity(std::string& note) {
  double t0 = now_s();
  GraphDomain dom(2, 0.25, GraphDomain::PhiFamily::Power, 0.05, 1.5,
                  DiniModulus::power(0.075, 0.5), /*relax_scale_checks=*/true);
  GridSolveReport rep;
  FieldPtr u = solve_dirichlet(dom, halfspace_poly(2, 1), 256, 0.5, 0.5, &rep);
  if (rep.residual > 1e-8) {
    note = "solver residual " + fmt17(rep.residual);
    return false;
  }
  QuadSpec q = QuadSpec::dflt(2);
  const std::vector<double> radii = {0.03125, 0.0625, 0.125, 0.25};
  double prev = -1e300;
  for (double r : radii) {
    FrequencySample s = unified_frequency(dom, *u, Vec::Zero(2), r, 20.0, q);
    double eps = 1e-4 * (1.0 + s.N_mod);
    if (s.N_mod < prev - eps) {
      note = "boundary profile drops at r=" + fmt17(r) + ": " + fmt17(prev) + " -> " +
             fmt17(s.N_mod);
      return false;
    }
    prev = s.N_mod;
  }
  Vec p(2);
  p << 0.0, 0.25;
  double r_cs = critical_scale(dom, p);
  prev = -1e300;
  for (double r : {0.03125, 0.0625, 0.125}) {
    if (r > r_cs) break;
    FrequencySample s = unified_frequency(dom, *u, p, r, 20.0, q);
    double eps = 1e-4 * (1.0 + s.N_mod);
    if (s.N_mod < prev - eps) {
      note = "interior profile drops at r=" + fmt17(r) + ": " + fmt17(prev) + " -> " +
             fmt17(s.N_mod);
      return false;
    }
    prev = s.N_mod;
  }
  double dt = now_s() - t0;
  note = "grid 256^2, r_cs(p)=" + fmt17(r_cs) + ", " + fmt17(dt) + "s";
  return dt < 300.0;
}

// ---------------------------------------------------------------------------
// 3. Rigidity: both monotonicity residuals vanish for exact homogeneous
//    fields; R_h is genuinely positive for a mixed field and matches dN/dr.
bool crit_rigidity(std::string& note) {
  for (int d : {2, 3}) {
    GraphDomain dom = flat_domain(d, 0.5);
    TransformFrame frame(dom, Vec::Zero(d));
    QuadSpec q = QuadSpec::dflt(d);
    for (int deg : {1, 2, 3}) {
      auto f = halfspace_poly(d, deg);
      auto [Rh, Rb] = monotonicity_residuals(frame, *f, 0.25, q);
      if (std::abs(Rh) > 1e-8 || std::abs(Rb) > 1e-8) {
        note = "homogeneous residuals d=" + std::to_string(d) + " deg=" +
               std::to_string(deg) + ": R_h=" + fmt17(Rh) + " R_b=" + fmt17(Rb);
        return false;
      }
    }
  }
  GraphDomain dom = flat_domain(2, 0.5);
  TransformFrame frame(dom, Vec::Zero(2));
  QuadSpec q = QuadSpec::dflt(2);
  auto mixed = sum_of_polys(2, {1, 2}, {1.0, 1.0});
  auto [Rh, Rb] = monotonicity_residuals(frame, *mixed, 0.25, q);
  double dNdr = frequency_derivative(frame, *mixed, 0.25, q);
  note = "mixed R_h=" + fmt17(Rh) + " dN/dr=" + fmt17(dNdr);
  if (Rh <= 1e-3) return false;
  return std::abs(Rh - dNdr) <= 0.10 * std::abs(dNdr) && std::abs(Rb) < 1e-8;
}

// ---------------------------------------------------------------------------
// 4. Doubling sandwich with 5% slack on the suite fields; exact (r2/r1)^{2N}
//    for homogeneous ones.
bool crit_doubling(std::string& note) {
  for (int d : {2, 3}) {
    GraphDomain dom = flat_domain(d, 0.5);
    TransformFrame frame(dom, Vec::Zero(d));
    QuadSpec q = QuadSpec::dflt(d);
    for (int deg : {1, 2, 3}) {
      auto f = halfspace_poly(d, deg);
      DoublingReport rep = doubling_check(frame, *f, 0.125, 0.25, 20.0, q);
      double exact = std::pow(2.0, 2.0 * deg);
      if (!rep.pass || std::abs(rep.ratio - exact) > 1e-6 * exact) {
        note = "homogeneous d=" + std::to_string(d) + " deg=" + std::to_string(deg) +
               " ratio=" + fmt17(rep.ratio) + " expected " + fmt17(exact);
        return false;
      }
    }
  }
  GraphDomain dom2 = flat_domain(2, 0.5);
  TransformFrame frame2(dom2, Vec::Zero(2));
  auto mixed = sum_of_polys(2, {1, 2}, {1.0, 1.0});
  DoublingReport rm = doubling_check(frame2, *mixed, 0.125, 0.25, 20.0, QuadSpec::dflt(2));
  if (!rm.pass) {
    note = "mixed field sandwich violated, ratio=" + fmt17(rm.ratio);
    return false;
  }
  GraphDomain domc(2, 0.25, GraphDomain::PhiFamily::Power, 0.05, 1.5,
                   DiniModulus::power(0.075, 0.5), true);
  FieldPtr u = solve_dirichlet(domc, halfspace_poly(2, 1), 256, 0.5, 0.5);
  TransformFrame framec(domc, Vec::Zero(2));
  DoublingReport rc = doubling_check(framec, *u, 0.125, 0.25, 20.0, QuadSpec::dflt(2));
  note = "curved-domain ratio=" + fmt17(rc.ratio) + " in [" + fmt17(rc.lower) + ", " +
         fmt17(rc.upper) + "]";
  return rc.pass;
}

// ---------------------------------------------------------------------------
// 5. Eigen-based beta numbers match the dense plane search; planar clouds and
//    invariances behave exactly.
bool crit_beta_oracle(std::string& note) {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> U(-1.0, 1.0), W(0.2, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    int d = 2 + trial % 2;
    int n = 2 + int(rng() % 5);
    WeightedCloud mu;
    for (int i = 0; i < n; ++i) {
      Vec X(d);
      for (int j = 0; j < d; ++j) X[j] = U(rng);
      mu.points.push_back(X);
      mu.weights.push_back(W(rng));
    }
    int k = 1 + int(rng() % (d - 1));
    double r = 1.5;
    double fast = beta_number(mu, Vec::Zero(d), r, k).beta;
    double slow = beta_plane_search(mu, Vec::Zero(d), r, k);
    worst = std::max(worst, std::abs(fast - slow));
    if (std::abs(fast - slow) > 1e-6) {
      note = "trial " + std::to_string(trial) + ": eigen " + fmt17(fast) + " vs search " +
             fmt17(slow);
      return false;
    }
  }
  // exactly planar clouds
  for (int trial = 0; trial < 10; ++trial) {
    int d = 2 + trial % 2;
    Vec normal(d);
    for (int j = 0; j < d; ++j) normal[j] = U(rng);
    normal.normalize();
    WeightedCloud mu;
    for (int i = 0; i < 6; ++i) {
      Vec X(d);
      for (int j = 0; j < d; ++j) X[j] = U(rng);
      X -= normal.dot(X) * normal;
      mu.points.push_back(X);
      mu.weights.push_back(1.0);
    }
    double b = beta_number(mu, Vec::Zero(d), 2.0, d - 1).beta;
    if (b > 1e-12) {
      note = "planar cloud beta=" + fmt17(b);
      return false;
    }
  }
  // rigid motion + joint scaling invariance
  {
    int d = 3;
    WeightedCloud mu;
    std::vector<Vec> pts;
    for (int i = 0; i < 6; ++i) {
      Vec X(d);
      for (int j = 0; j < d; ++j) X[j] = U(rng);
      mu.points.push_back(X);
      mu.weights.push_back(W(rng));
    }
    Vec p = Vec::Zero(d);
    double r = 1.5, b0 = beta_number(mu, p, r, 1).beta;
    Mat G(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) G(i, j) = U(rng);
    Mat Q = Eigen::HouseholderQR<Mat>(G).householderQ();
    Vec shift(d);
    for (int j = 0; j < d; ++j) shift[j] = U(rng);
    WeightedCloud moved = mu;
    for (auto& X : moved.points) X = Q * X + shift;
    double b1 = beta_number(moved, Q * p + shift, r, 1).beta;
    WeightedCloud scaled = mu;
    for (auto& X : scaled.points) X = 3.7 * X;
    for (auto& w : scaled.weights) w *= 3.7;  // k-dimensional measure, k = 1
    double b2 = beta_number(scaled, 3.7 * p, 3.7 * r, 1).beta;
    note = "max |eigen - search| = " + fmt17(worst);
    if (std::abs(b1 - b0) > 1e-10 || std::abs(b2 - b0) > 1e-10) {
      note = "invariance drift: " + fmt17(b1 - b0) + ", " + fmt17(b2 - b0);
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 6. Beta-vs-frequency-drop bound: empirical ratio finite and stable within
//    a factor 2 under sample doubling.
bool crit_beta_frequency_bound(std::string& note) {
  GraphDomain dom = flat_domain(3, 0.5);
  auto f = halfspace_poly(3, 2);  // 2 x1 x3, singular along the x2 axis
  QuadSpec q = QuadSpec::light(3);
  auto make_cloud = [](int n) {
    WeightedCloud mu;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> T(-0.45, 0.45), S(0.005, 0.05);
    for (int i = 0; i < n; ++i) {
      double t = T(rng), s = S(rng);
      mu.points.push_back(i % 2 ? vec3(s, t, 0.0) : vec3(0.0, t, s));
      mu.weights.push_back(1.0);
    }
    return mu;
  };
  WeightedCloud mu100 = make_cloud(100), mu200 = make_cloud(200);
  for (double r : {0.125, 0.25}) {
    BetaBoundReport a =
        beta_frequency_bound_check(dom, *f, mu100, Vec::Zero(3), r, 0.1, 20.0, q);
    BetaBoundReport b =
        beta_frequency_bound_check(dom, *f, mu200, Vec::Zero(3), r, 0.1, 20.0, q);
    if (!std::isfinite(a.ratio) || !std::isfinite(b.ratio)) {
      note = "ratio not finite at r=" + fmt17(r);
      return false;
    }
    double lo = std::min(a.ratio, b.ratio), hi = std::max(a.ratio, b.ratio);
    if (hi > 0 && (lo <= 0 || hi / lo > 2.0)) {
      note = "unstable ratio at r=" + fmt17(r) + ": " + fmt17(a.ratio) + " vs " +
             fmt17(b.ratio);
      return false;
    }
    if (r == 0.25)
      note = "r=1/4 ratio " + fmt17(a.ratio) + " (n=100) vs " + fmt17(b.ratio) + " (n=200)";
  }
  return true;
}

// ---------------------------------------------------------------------------
// 7. Covering/packing along a singular line: packing constant stable in r0,
//    leaf count scales like (r*/r0)^{d-2}.
bool crit_cover_packing(std::string& note) {
  double t0 = now_s();
  GraphDomain dom = flat_domain(3, 0.5);
  auto f = halfspace_poly(3, 2);
  ConstantLedger ledger;
  ledger.validate();
  QuadSpec q = QuadSpec::light(3);
  std::vector<double> cps, logc, logr;
  for (double r0 : {1e-4, 1e-5, 1e-6}) {
    auto samples = singular_line_samples(dom, *f, r0);
    auto [tree, rep] = iterate_cover(dom, f, samples, r0, 0.5, ledger, q);
    if (!tree.covers(samples)) {
      note = "cover misses samples at r0=" + fmt17(r0);
      return false;
    }
    if (!tree.fifth_ball_disjoint()) {
      note = "fifth-ball overlap at r0=" + fmt17(r0);
      return false;
    }
    cps.push_back(rep.C_p);
    logc.push_back(std::log(double(rep.leaf_count)));
    logr.push_back(std::log(0.5 / r0));
  }
  double cmin = *std::min_element(cps.begin(), cps.end());
  double cmax = *std::max_element(cps.begin(), cps.end());
  if (!(cmin > 0) || cmax / cmin > 2.0) {
    note = "C_p unstable: " + fmt17(cps[0]) + ", " + fmt17(cps[1]) + ", " + fmt17(cps[2]);
    return false;
  }
  // least squares slope of log(count) vs log(r*/r0)
  double mx = (logr[0] + logr[1] + logr[2]) / 3, my = (logc[0] + logc[1] + logc[2]) / 3;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < 3; ++i) {
    sxx += (logr[i] - mx) * (logr[i] - mx);
    sxy += (logr[i] - mx) * (logc[i] - my);
  }
  double slope = sxy / sxx, dt = now_s() - t0;
  note = "C_p in [" + fmt17(cmin) + ", " + fmt17(cmax) + "], count exponent " + fmt17(slope) +
         ", " + fmt17(dt) + "s";
  return slope > 0.8 && slope < 1.2 && dt < 600.0;
}

// ---------------------------------------------------------------------------
// 8. Minkowski content of the singular line segment via Monte Carlo tube
//    volume: within 10% of (pi/4) x length, stderr under 2%.
bool crit_minkowski(std::string& note) {
  GraphDomain dom = flat_domain(3, 0.5);
  auto f = halfspace_poly(3, 2);
  auto samples = singular_line_samples(dom, *f, 1e-3);
  MinkowskiEstimate est = minkowski_estimate(samples, 0.015625, 200000, 11, 1);
  double expected = M_PI / 4.0;  // unit segment
  note = "content " + fmt17(est.content) + " vs " + fmt17(expected) + ", rel stderr " +
         fmt17(est.stderr_rel);
  return std::abs(est.content - expected) <= 0.10 * expected && est.stderr_rel < 0.02;
}

// ---------------------------------------------------------------------------
// 9. Spine invariance: frequency profiles along the singular axis agree and
//    the field is translation-invariant along it.
bool crit_spine(std::string& note) {
  GraphDomain dom = flat_domain(3, 0.5);
  auto f = halfspace_poly(3, 2);
  QuadSpec q = QuadSpec::dflt(3);
  const std::vector<double> radii = {0.0625, 0.125, 0.25};
  std::vector<FrequencyProfile> profiles;
  for (double t : {-0.2, -0.1, 0.0, 0.1, 0.2})
    profiles.push_back(unified_frequency_profile(dom, *f, vec3(0.0, t, 0.0), radii, 20.0, q));
  double worst = 0.0;
  for (const auto& pr : profiles)
    for (size_t i = 0; i < radii.size(); ++i)
      worst = std::max(worst, std::abs(pr.value_at(int(i)) - profiles[0].value_at(int(i))));
  if (worst > 1e-6) {
    note = "profiles disagree by " + fmt17(worst);
    return false;
  }
  SpineReport rep = spine_invariance_check(dom, *f, vec3(0.0, -0.2, 0.0), vec3(0.0, 0.2, 0.0),
                                           radii, 20.0, q);
  note = "profile spread " + fmt17(worst) + ", translation deviation " +
         fmt17(rep.max_deviation);
  return rep.applicable && rep.max_deviation < 1e-10;
}

// ---------------------------------------------------------------------------
// 10. Determinism: identical config + seed gives byte-identical artifacts
//     across repeated runs and across thread counts 1 and 4.
bool crit_determinism(std::string& note) {
  ExperimentConfig prof = parse_config(R"({
    "experiment": "frequency-profile", "dim": 2,
    "field": {"kind": "closed", "name": "halfspace_poly", "params": [2]},
    "radii": [0.0625, 0.125, 0.25], "centers": [[0.0, 0.0]], "seed": 3
  })");
  ExperimentConfig mink = parse_config(R"({
    "experiment": "minkowski", "dim": 3,
    "field": {"kind": "closed", "name": "halfspace_poly", "params": [2]},
    "r_star": 0.5, "sample_spacing": 0.001, "mink_r": 0.015625,
    "mc_probes": 200000, "seed": 5
  })");
  for (ExperimentConfig* cfg : {&prof, &mink}) {
    ArtifactBundle run1 = run_experiment(*cfg);
    ArtifactBundle run2 = run_experiment(*cfg);
    cfg->threads = 4;
    ArtifactBundle run4 = run_experiment(*cfg);
    if (run1.files != run2.files) {
      note = cfg->experiment + " differs between identical runs";
      return false;
    }
    if (run1.files != run4.files) {
      note = cfg->experiment + " differs across thread counts";
      return false;
    }
  }
  note = "profile + tube-volume artifacts byte-identical over reruns and threads {1,4}";
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    bool (*fn)(std::string&);
  };
  const Criterion table[] = {
      {"homogeneous-constant-frequency", crit_homogeneous_frequency},
      {"curved-domain-monotonicity", crit_monotonicity},
      {"rigidity-residuals", crit_rigidity},
      {"doubling-sandwich", crit_doubling},
      {"beta-oracle-equivalence", crit_beta_oracle},
      {"beta-frequency-bound", crit_beta_frequency_bound},
      {"cover-packing-scaling", crit_cover_packing},
      {"minkowski-content", crit_minkowski},
      {"spine-invariance", crit_spine},
      {"determinism", crit_determinism},
  };
  int failures = 0, idx = 0;
  for (const auto& c : table) {
    ++idx;
    std::string notes;
    bool ok = false;
    try {
      ok = c.fn(notes);
    } catch (const std::exception& e) {
      notes = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("%s %2d %s%s%s\n", ok ? "PASS" : "FAIL", idx, c.name,
                notes.empty() ? "" : " -- ", notes.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
