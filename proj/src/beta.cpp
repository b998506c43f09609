#include "freqstrat/beta.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace freqstrat {

double WeightedCloud::mass_in_ball(const Vec& p, double r) const {
  double m = 0.0;
  for (size_t i = 0; i < points.size(); ++i)
    if ((points[i] - p).norm() <= r) m += weight(int(i));
  return m;
}

void jacobi_eigen_sym(const Mat& S, Vec& evals, Mat& evecs, double tol) {
  const int d = int(S.rows());
  Mat A = S;
  evecs = Mat::Identity(d, d);
  const double scale = S.norm() + 1e-300;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) off += A(p, q) * A(p, q);
    if (std::sqrt(2.0 * off) <= tol * scale) break;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) {
        if (std::abs(A(p, q)) <= 1e-300) continue;
        double th = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        double t = (th >= 0 ? 1.0 : -1.0) / (std::abs(th) + std::sqrt(th * th + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int i = 0; i < d; ++i) {
          double aip = A(i, p), aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < d; ++i) {
          double api = A(p, i), aqi = A(q, i);
          A(p, i) = c * api - s * aqi;
          A(q, i) = s * api + c * aqi;
        }
        for (int i = 0; i < d; ++i) {
          double vip = evecs(i, p), viq = evecs(i, q);
          evecs(i, p) = c * vip - s * viq;
          evecs(i, q) = s * vip + c * viq;
        }
      }
  }
  evals.resize(d);
  for (int i = 0; i < d; ++i) evals(i) = A(i, i);
  // sort descending, carrying columns
  for (int i = 0; i < d; ++i) {
    int top = i;
    for (int j = i + 1; j < d; ++j)
      if (evals(j) > evals(top)) top = j;
    if (top != i) {
      std::swap(evals(i), evals(top));
      evecs.col(i).swap(evecs.col(top));
    }
  }
}

BetaResult beta_number(const WeightedCloud& mu, const Vec& p, double r, int k) {
  const int d = int(p.size());
  if (k < 1 || k > d - 1) throw std::invalid_argument("beta_number: need 1 <= k <= d-1");
  if (!(r > 0.0)) throw std::invalid_argument("beta_number: r must be positive");
  BetaResult out;
  out.k = k;
  double mass = 0.0;
  Vec C = Vec::Zero(d);
  for (size_t i = 0; i < mu.points.size(); ++i) {
    if ((mu.points[i] - p).norm() > r) continue;
    double w = mu.weight(int(i));
    mass += w;
    C += w * mu.points[i];
  }
  if (mass <= 0.0) {
    out.empty = true;
    out.center_of_mass = p;
    out.lambdas = Vec::Zero(d);
    out.eigvecs = Mat::Identity(d, d);
    return out;
  }
  C /= mass;
  Mat Q = Mat::Zero(d, d);
  for (size_t i = 0; i < mu.points.size(); ++i) {
    if ((mu.points[i] - p).norm() > r) continue;
    Vec dev = mu.points[i] - C;
    Q += mu.weight(int(i)) * dev * dev.transpose();
  }
  Q /= std::pow(r, 2 + k);
  Vec evals;
  Mat evecs;
  jacobi_eigen_sym(Q, evals, evecs);
  out.center_of_mass = C;
  out.lambdas = evals;
  out.eigvecs = evecs;
  // beta is the data-space residual of the fitted plane, not the tail
  // eigenvalue sum: forming Q squares the conditioning, so a flat cloud's
  // zero eigenvalue comes back as eps * |Q| and its sqrt pollutes beta.
  // The residual of the (slightly perturbed) top-k plane is stationary in
  // the plane, hence accurate to second order and never below the minimum.
  const Mat V = evecs.leftCols(k);
  double resid = 0.0;
  for (size_t i = 0; i < mu.points.size(); ++i) {
    if ((mu.points[i] - p).norm() > r) continue;
    Vec dev = mu.points[i] - C;
    dev -= V * (V.transpose() * dev);
    resid += mu.weight(int(i)) * dev.squaredNorm();
  }
  out.beta = std::sqrt(resid / std::pow(r, 2 + k));
  return out;
}

namespace {

// minimize (or maximize) v^T M v over unit vectors via coarse scan + pattern
// descent in spherical angles
double sphere_extremum(const Mat& M, bool maximize) {
  auto val = [&](double th, double ph) {
    Vec v(3);
    v << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
    double q = v.dot(M * v);
    return maximize ? -q : q;
  };
  double best = std::numeric_limits<double>::infinity();
  double bt = 0.0, bp = 0.0;
  const int nt = 64, np = 128;
  for (int i = 0; i <= nt; ++i)
    for (int j = 0; j < np; ++j) {
      double th = M_PI * i / nt, ph = 2.0 * M_PI * j / np;
      double v = val(th, ph);
      if (v < best) {
        best = v;
        bt = th;
        bp = ph;
      }
    }
  double step = M_PI / nt;
  while (step > 1e-10) {
    bool moved = false;
    const double dth[4] = {step, -step, 0.0, 0.0};
    const double dph[4] = {0.0, 0.0, step, -step};
    for (int m = 0; m < 4; ++m) {
      double v = val(bt + dth[m], bp + dph[m]);
      if (v < best) {
        best = v;
        bt += dth[m];
        bp += dph[m];
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return maximize ? -best : best;
}

double circle_minimum(const Mat& M) {
  auto val = [&](double a) {
    Vec n(2);
    n << std::cos(a), std::sin(a);
    return n.dot(M * n);
  };
  double best = std::numeric_limits<double>::infinity(), ba = 0.0;
  const int na = 1024;
  for (int i = 0; i < na; ++i) {
    double a = M_PI * i / na;
    double v = val(a);
    if (v < best) {
      best = v;
      ba = a;
    }
  }
  double step = M_PI / na;
  while (step > 1e-11) {
    bool moved = false;
    for (double da : {step, -step}) {
      double v = val(ba + da);
      if (v < best) {
        best = v;
        ba += da;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

}  // namespace

double beta_plane_search(const WeightedCloud& mu, const Vec& p, double r, int k) {
  const int d = int(p.size());
  if (d > 3 || k < 1 || k > d - 1)
    throw std::invalid_argument("beta_plane_search: d <= 3, 1 <= k <= d-1");
  double mass = 0.0;
  Vec C = Vec::Zero(d);
  for (size_t i = 0; i < mu.points.size(); ++i) {
    if ((mu.points[i] - p).norm() > r) continue;
    double w = mu.weight(int(i));
    mass += w;
    C += w * mu.points[i];
  }
  if (mass <= 0.0) return 0.0;
  C /= mass;
  Mat M = Mat::Zero(d, d);
  for (size_t i = 0; i < mu.points.size(); ++i) {
    if ((mu.points[i] - p).norm() > r) continue;
    Vec dev = mu.points[i] - C;
    M += mu.weight(int(i)) * dev * dev.transpose();
  }
  double obj;
  if (d == 2)
    obj = circle_minimum(M);  // k = 1: best line normal
  else if (k == 2)
    obj = sphere_extremum(M, false);  // best plane normal
  else
    obj = M.trace() - sphere_extremum(M, true);  // best line direction
  return std::sqrt(std::max(0.0, obj) / std::pow(r, 2 + k));
}

double dini_beta_integral(const WeightedCloud& mu, const Vec& p0, double s, int k,
                          double grid_ratio, const std::vector<double>* ball_radii) {
  if (!(s > 0.0)) throw std::invalid_argument("dini_beta_integral: s must be positive");
  if (!(grid_ratio > 1.0) || grid_ratio > std::pow(2.0, 0.25) + 1e-12)
    throw std::invalid_argument("dini_beta_integral: grid ratio in (1, 2^(1/4)]");
  if (ball_radii && ball_radii->size() != mu.points.size())
    throw std::invalid_argument("dini_beta_integral: ball_radii size mismatch");
  const double dlog = std::log(grid_ratio);
  double total = 0.0;
  for (size_t i = 0; i < mu.points.size(); ++i) {
    const Vec& X = mu.points[i];
    if ((X - p0).norm() > s) continue;
    // Below the nearest-neighbor distance the closed ball holds X alone and
    // beta vanishes identically, so the nn distance always floors the cutoff;
    // a packing radius can only raise it.
    double nn = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < mu.points.size(); ++j)
      if (j != i) nn = std::min(nn, (mu.points[j] - X).norm());
    double cutoff = ball_radii ? std::max((*ball_radii)[i] / 5.0, nn) : nn;
    if (!(cutoff < s)) continue;  // beta = 0 on the whole range
    double acc = 0.0, rj = s;
    double prev = beta_number(mu, X, rj, k).beta;
    prev *= prev;
    while (rj / grid_ratio >= cutoff * (1.0 - 1e-12)) {
      double rn = rj / grid_ratio;
      double bn = beta_number(mu, X, rn, k).beta;
      bn *= bn;
      acc += 0.5 * (prev + bn) * dlog;
      prev = bn;
      rj = rn;
    }
    total += mu.weight(int(i)) * acc;
  }
  return total;
}

BetaBoundReport beta_frequency_bound_check(const GraphDomain& domain, const HarmonicField& f,
                                           const WeightedCloud& mu, const Vec& p, double r,
                                           double delta_in, double C_ledger,
                                           const QuadSpec& q) {
  const int d = domain.dim();
  BetaBoundReport rep;
  BetaResult b = beta_number(mu, p, r, d - 2);
  rep.lhs = b.beta * b.beta;
  double scale = std::pow(r, -(d - 2));
  double drop = 0.0;
  for (size_t i = 0; i < mu.points.size(); ++i) {
    if ((mu.points[i] - p).norm() > r) continue;
    double w = frequency_drop_wide(domain, f, mu.points[i], r, C_ledger, q);
    drop += mu.weight(int(i)) * (w + delta_in);
  }
  rep.drop_term = scale * drop;
  rep.mass_term =
      mu.mass_in_ball(p, r) * scale * (r + domain.modulus().theta(24.0 * r));
  rep.rhs = rep.drop_term + rep.mass_term;
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

}  // namespace freqstrat
