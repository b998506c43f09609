#include "freqstrat/singular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace freqstrat {

namespace {

double residual_at(const HarmonicField& f, const Vec& X) {
  return std::abs(f.value(X)) + f.gradient(X).norm();
}

// central-difference Hessian of f at X
Mat fd_hessian(const HarmonicField& f, const Vec& X, double h) {
  const int d = int(X.size());
  Mat H(d, d);
  Vec Xp(d), Xm(d);
  for (int j = 0; j < d; ++j) {
    Xp = X;
    Xm = X;
    Xp(j) += h;
    Xm(j) -= h;
    H.col(j) = (f.gradient(Xp) - f.gradient(Xm)) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

void clip_to_closure(const GraphDomain& domain, Vec& X) {
  const int d = int(X.size());
  double ph = domain.phi(X.head(d - 1));
  if (X(d - 1) < ph) X(d - 1) = ph;
}

}  // namespace

std::optional<TaggedPoint> refine_singular_point(const GraphDomain& domain,
                                                 const HarmonicField& f, const Vec& seed,
                                                 double scale, double tol) {
  const int d = int(seed.size());
  Vec X = seed;
  clip_to_closure(domain, X);
  double res = residual_at(f, X);
  const double fd = 1e-5 * scale;
  for (int it = 0; it < 80 && res > tol * scale; ++it) {
    Vec g = f.gradient(X);
    Mat H = fd_hessian(f, X, fd);
    // Gauss-Newton on (u/scale, grad u)
    Mat J(d + 1, d);
    J.row(0) = g.transpose() / scale;
    J.bottomRows(d) = H;
    Vec R(d + 1);
    R(0) = f.value(X) / scale;
    R.tail(d) = g;
    Mat JtJ = J.transpose() * J;
    double lam = 1e-12 * JtJ.trace() / d + 1e-300;
    Vec step = (JtJ + lam * Mat::Identity(d, d)).ldlt().solve(-J.transpose() * R);
    double a = 1.0;
    Vec Xn = X + step;
    clip_to_closure(domain, Xn);
    double rn = residual_at(f, Xn);
    while (rn > res && a > 1e-6) {
      a *= 0.5;
      Xn = X + a * step;
      clip_to_closure(domain, Xn);
      rn = residual_at(f, Xn);
    }
    if (rn >= res && res > tol * scale && a <= 1e-6) return std::nullopt;
    X = Xn;
    res = rn;
    if ((X - seed).norm() > 10.0 * scale + 1.0) return std::nullopt;
  }
  if (res > tol * scale) return std::nullopt;
  return TaggedPoint{X, PointTag::Singular, res};
}

PointSampleSet locate_singular_set(const GraphDomain& domain, const HarmonicField& f,
                                   const AxisBox& region, double h_target,
                                   double h_start) {
  const int d = int(region.lo.size());
  if (!(h_target > 0.0)) throw std::invalid_argument("locate_singular_set: h_target > 0");
  double extent = (region.hi - region.lo).maxCoeff();
  double h0 = h_start;
  if (h0 <= 0.0) {
    h0 = h_target;
    while (h0 * 4.0 <= extent / 10.0) h0 *= 4.0;
  }

  // integer grid nodes at resolution h, as offsets from region.lo
  using Key = std::vector<long long>;
  auto node_of = [&](const Key& k, double h) {
    Vec X(d);
    for (int j = 0; j < d; ++j)
      X(j) = std::min(region.lo(j) + h * double(k[j]), region.hi(j));
    return X;
  };
  auto hit_test = [&](const Vec& X, double h) {
    if (domain.signed_height(X) < -1e-12) return false;
    double v = std::abs(f.value(X));
    double g = f.gradient(X).norm();
    double hess = fd_hessian(f, X, h).norm();
    return g <= 4.0 * hess * h && v <= 4.0 * hess * h * h;
  };

  std::set<Key> level;
  {
    Key k(d, 0);
    std::vector<long long> counts(d);
    for (int j = 0; j < d; ++j)
      counts[j] = (long long)std::floor((region.hi(j) - region.lo(j)) / h0 + 1e-9) + 1;
    // enumerate the full coarse grid
    long long total = 1;
    for (int j = 0; j < d; ++j) total *= counts[j];
    for (long long idx = 0; idx < total; ++idx) {
      long long rem = idx;
      for (int j = 0; j < d; ++j) {
        k[j] = rem % counts[j];
        rem /= counts[j];
      }
      level.insert(k);
    }
  }

  double h = h0;
  std::vector<Vec> hits;
  for (;;) {
    hits.clear();
    for (const auto& k : level) {
      Vec X = node_of(k, h);
      if (hit_test(X, h)) hits.push_back(X);
    }
    if (h <= h_target * (1.0 + 1e-12)) break;
    // refine: rescan 3h-neighborhoods of hits at h/4
    double hn = h / 4.0;
    std::set<Key> next;
    Key k(d, 0);
    for (const auto& X : hits) {
      std::vector<long long> lo(d), hi(d);
      for (int j = 0; j < d; ++j) {
        lo[j] = std::max(0LL, (long long)std::ceil((X(j) - 1.5 * h - region.lo(j)) / hn - 1e-9));
        hi[j] = std::min((long long)std::floor((region.hi(j) - region.lo(j)) / hn + 1e-9),
                         (long long)std::floor((X(j) + 1.5 * h - region.lo(j)) / hn + 1e-9));
      }
      std::function<void(int)> rec = [&](int j) {
        if (j == d) {
          next.insert(k);
          return;
        }
        for (long long v = lo[j]; v <= hi[j]; ++v) {
          k[j] = v;
          rec(j + 1);
        }
      };
      rec(0);
    }
    level.swap(next);
    h = hn;
  }

  PointSampleSet out;
  out.h = h;
  std::vector<TaggedPoint> polished;
  for (const auto& X : hits) {
    auto ref = refine_singular_point(domain, f, X, 1.0);
    if (!ref) continue;
    // locality: the polish must not migrate out of the scan cell's reach
    if ((ref->X - X).norm() > 3.0 * h) continue;
    bool in_region = true;
    for (int j = 0; j < d; ++j)
      if (ref->X(j) < region.lo(j) - h || ref->X(j) > region.hi(j) + h) in_region = false;
    if (!in_region) continue;
    polished.push_back(*ref);
  }
  std::sort(polished.begin(), polished.end(), [](const TaggedPoint& a, const TaggedPoint& b) {
    for (int j = 0; j < a.X.size(); ++j)
      if (a.X(j) != b.X(j)) return a.X(j) < b.X(j);
    return false;
  });
  for (const auto& p : polished) {
    bool dup = false;
    for (const auto& kept : out.points)
      if ((p.X - kept.X).norm() < 0.5 * h) {
        dup = true;
        break;
      }
    if (!dup) out.points.push_back(p);
  }
  return out;
}

std::vector<Vec> densify_curve(const GraphDomain& domain, const HarmonicField& f,
                               const std::vector<Vec>& pts, double spacing) {
  if (pts.size() < 2) return pts;
  if (!(spacing > 0.0)) throw std::invalid_argument("densify_curve: spacing > 0");
  const int d = int(pts[0].size());
  Vec mean = Vec::Zero(d);
  for (const auto& p : pts) mean += p;
  mean /= double(pts.size());
  Mat cov = Mat::Zero(d, d);
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  Vec axis = es.eigenvectors().col(d - 1);  // top eigenvector
  std::vector<std::pair<double, int>> order;
  order.reserve(pts.size());
  for (size_t i = 0; i < pts.size(); ++i)
    order.emplace_back(axis.dot(pts[i] - mean), int(i));
  std::sort(order.begin(), order.end());

  std::vector<Vec> out;
  auto polish = [&](const Vec& seed) -> Vec {
    if (residual_at(f, seed) <= 1e-12) return seed;
    auto ref = refine_singular_point(domain, f, seed, 1.0);
    return ref ? ref->X : seed;
  };
  for (size_t i = 0; i < order.size(); ++i) {
    const Vec& a = pts[order[i].second];
    if (i == 0) out.push_back(a);
    if (i + 1 == order.size()) break;
    const Vec& b = pts[order[i + 1].second];
    double gap = (b - a).norm();
    int m = std::max(1, int(std::ceil(gap / spacing)));
    for (int j = 1; j < m; ++j) out.push_back(polish(a + (double(j) / m) * (b - a)));
    out.push_back(b);
  }
  return out;
}

double alpha_d1(int dim) {
  // alpha^2 * int_{upper unit half ball} x_d^2 = 1
  if (dim == 2) return std::sqrt(8.0 / M_PI);
  if (dim == 3) return std::sqrt(15.0 / (2.0 * M_PI));
  throw std::invalid_argument("alpha_d1: dim must be 2 or 3");
}

bool effective_critical_test(const GraphDomain& domain, const HarmonicField& f, const Vec& X,
                             double r, double alpha0, double beta, const QuadSpec& q) {
  if (!(r > 0.0) || !(beta > 0.0) || !(alpha0 > 0.0))
    throw std::invalid_argument("effective_critical_test: positive r, alpha0, beta");
  const int d = int(X.size());
  const double rb = beta * r;
  // inf of |grad u|^2 over B_{beta r}(X) ∩ closure(D): coarse grid + descent
  int m = std::max(2, int(std::ceil(10.0 * beta)));
  double best = std::numeric_limits<double>::infinity();
  Vec bestY(d), Y(d);
  std::vector<int> idx(d, 0);
  for (;;) {
    for (int j = 0; j < d; ++j) Y(j) = X(j) + rb * (2.0 * idx[j] / (m - 1) - 1.0);
    if ((Y - X).norm() <= rb && domain.signed_height(Y) >= -1e-12) {
      Vec Yc = Y;
      clip_to_closure(domain, Yc);
      double g2 = f.gradient(Yc).squaredNorm();
      if (g2 < best) {
        best = g2;
        bestY = Yc;
      }
    }
    int j = 0;
    while (j < d && ++idx[j] == m) idx[j++] = 0;
    if (j == d) break;
  }
  if (!std::isfinite(best)) {
    best = f.gradient(X).squaredNorm();
    bestY = X;
  }
  // projected descent polish on |grad u|^2
  Vec cur = bestY;
  double val = best;
  double step = 0.5 * rb;
  for (int it = 0; it < 80 && step > 1e-9 * rb; ++it) {
    Mat H = fd_hessian(f, cur, 1e-5 * (1.0 + cur.norm()));
    Vec g = 2.0 * H * f.gradient(cur);
    double gn = g.norm();
    if (gn < 1e-300) break;
    Vec cand = cur - (step / gn) * g;
    Vec off = cand - X;
    if (off.norm() > rb) cand = X + off * (rb / off.norm());
    clip_to_closure(domain, cand);
    if ((cand - X).norm() > rb) {
      step *= 0.5;  // clipping pushed it out of the ball
      continue;
    }
    double v = f.gradient(cand).squaredNorm();
    if (v < val) {
      cur = cand;
      val = v;
    } else {
      step *= 0.5;
    }
  }
  double lhs = r * r * val;
  // zero-extended mass average
  const double uX = f.value(X);
  auto all = [](const Vec&) { return true; };
  auto dev2 = [&](const Vec& Z) {
    double dv = (domain.inside(Z) ? f.value(Z) : 0.0) - uX;
    return dv * dv;
  };
  double rhs = alpha0 * alpha0 * ball_integrate(dev2, all, X, r, q) / std::pow(r, d);
  return lhs <= rhs;
}

bool effective_critical_member(const GraphDomain& domain, const HarmonicField& f, const Vec& X,
                               double r0, double r_c, double alpha0, double beta,
                               const QuadSpec& q) {
  if (!(0.0 < r0 && r0 <= r_c))
    throw std::invalid_argument("effective_critical_member: need 0 < r0 <= r_c");
  for (double s = r_c; s >= r0 * (1.0 - 1e-12); s *= 0.5)
    if (!effective_critical_test(domain, f, X, s, alpha0, beta, q)) return false;
  return true;
}

SpanningCertificate effective_spanning_test(const std::vector<Vec>& F, int k, double tau,
                                            double r) {
  if (F.empty()) throw std::invalid_argument("effective_spanning_test: empty F");
  if (k < 1) throw std::invalid_argument("effective_spanning_test: k >= 1");
  const int d = int(F[0].size());
  const double thresh = tau * r;
  SpanningCertificate cert;
  cert.tuple.push_back(0);
  Mat dirs(d, 0);  // orthonormal step directions of the greedy tuple
  Vec base = F[0];
  auto dist_to_span = [&](const Vec& p) {
    Vec rel = p - base;
    if (dirs.cols() > 0) rel -= dirs * (dirs.transpose() * rel);
    return rel.norm();
  };
  int steps = 0;
  for (int i = 1; i <= k; ++i) {
    int pick = -1;
    double dmax = -1.0;
    for (size_t j = 0; j < F.size(); ++j) {
      double dj = dist_to_span(F[j]);
      if (dj > dmax + 1e-15) {
        dmax = dj;
        pick = int(j);
      }
    }
    if (dmax <= thresh) break;
    cert.tuple.push_back(pick);
    cert.step_dists.push_back(dmax);
    Vec rel = F[pick] - base;
    if (dirs.cols() > 0) rel -= dirs * (dirs.transpose() * rel);
    dirs.conservativeResize(d, dirs.cols() + 1);
    dirs.col(dirs.cols() - 1) = rel / rel.norm();
    ++steps;
  }
  if (steps == k) {
    cert.spans = true;
    cert.base = base;
    cert.directions = dirs;
    return cert;
  }
  // not spanning: report the PCA-refit affine subspace of achieved dimension
  cert.spans = false;
  cert.tuple.clear();
  cert.step_dists.clear();
  Vec mean = Vec::Zero(d);
  for (const auto& p : F) mean += p;
  mean /= double(F.size());
  Mat cov = Mat::Zero(d, d);
  for (const auto& p : F) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  Mat sub(d, steps);
  for (int j = 0; j < steps; ++j) sub.col(j) = es.eigenvectors().col(d - 1 - j);
  cert.base = mean;
  if (steps == d - 1) {
    // Codimension 1: polish the PCA normal to the minimal-width slab, which
    // minimizes exactly the containment distance the certificate reports.
    auto width = [&](const Vec& n) {
      double lo = 0.0, hi = 0.0;
      for (size_t i = 0; i < F.size(); ++i) {
        double t = n.dot(F[i] - mean);
        lo = i ? std::min(lo, t) : t;
        hi = i ? std::max(hi, t) : t;
      }
      return std::pair<double, double>(lo, hi);
    };
    Vec n = es.eigenvectors().col(0);
    auto [lo, hi] = width(n);
    double best = hi - lo;
    double step = 0.05;
    while (step > 1e-10) {
      bool moved = false;
      Eigen::HouseholderQR<Mat> qr{Mat(n)};
      Mat tangents = qr.householderQ();
      for (int j = 1; j < d && !moved; ++j)
        for (double sgn : {1.0, -1.0}) {
          Vec cand = (n + sgn * step * tangents.col(j)).normalized();
          auto [clo, chi] = width(cand);
          if (chi - clo < best) {
            n = cand;
            lo = clo;
            hi = chi;
            best = chi - clo;
            moved = true;
            break;
          }
        }
      if (!moved) step *= 0.5;
    }
    Eigen::HouseholderQR<Mat> qr{Mat(n)};
    Mat q = qr.householderQ();
    for (int j = 0; j < steps; ++j) sub.col(j) = q.col(j + 1);
    cert.base = mean + 0.5 * (lo + hi) * n;
  }
  cert.directions = sub;
  double worst = 0.0;
  for (const auto& p : F) {
    Vec rel = p - cert.base;
    if (steps > 0) rel -= sub * (sub.transpose() * rel);
    worst = std::max(worst, rel.norm());
  }
  cert.max_containment_dist = worst;
  return cert;
}

SpineReport spine_invariance_check(const GraphDomain& domain, const HarmonicField& f,
                                   const Vec& X1, const Vec& X2,
                                   const std::vector<double>& radii, double C_ledger,
                                   const QuadSpec& q, double tol) {
  if (radii.empty()) throw std::invalid_argument("spine_invariance_check: no radii");
  SpineReport rep;
  auto p1 = unified_frequency_profile(domain, f, X1, radii, C_ledger, q);
  auto p2 = unified_frequency_profile(domain, f, X2, radii, C_ledger, q);
  auto drop = [](const FrequencyProfile& p) {
    double lo = p.samples[0].N_mod, hi = lo;
    for (const auto& s : p.samples) {
      lo = std::min(lo, s.N_mod);
      hi = std::max(hi, s.N_mod);
    }
    return hi - lo;
  };
  rep.profile_drop = std::max(drop(p1), drop(p2));
  rep.applicable = rep.profile_drop <= tol;
  if (!rep.applicable) return rep;
  double off1 = 0.0;
  for (const auto& s : p1.samples) off1 = std::max(off1, std::abs(s.N_mod - 1.0));
  for (const auto& s : p2.samples) off1 = std::max(off1, std::abs(s.N_mod - 1.0));
  if (off1 <= tol) {
    rep.linear = true;
    return rep;
  }
  // translation invariance of the zero-extended field along X2 - X1
  const int d = int(X1.size());
  const double rmax = radii.back();
  Vec delta = X2 - X1;
  auto extended = [&](const Vec& Z) { return domain.inside(Z) ? f.value(Z) : 0.0; };
  const int n = 9;
  Vec Y(d), Z(d);
  std::vector<int> idx(d, 0);
  double worst = 0.0;
  for (;;) {
    for (int j = 0; j < d; ++j) Y(j) = X1(j) + rmax * (2.0 * idx[j] / (n - 1) - 1.0);
    if ((Y - X1).norm() <= rmax && domain.signed_height(Y) >= 0.0) {
      Z = Y + delta;
      if (domain.signed_height(Z) >= 0.0)
        worst = std::max(worst, std::abs(extended(Z) - extended(Y)));
    }
    int j = 0;
    while (j < d && ++idx[j] == n) idx[j++] = 0;
    if (j == d) break;
  }
  rep.max_deviation = worst;
  return rep;
}

}  // namespace freqstrat
