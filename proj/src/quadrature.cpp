#include "freqstrat/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace freqstrat {

GaussLegendre::GaussLegendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton from the Chebyshev-like initial guess
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

const GaussLegendre& gauss_legendre(int n) {
  static std::map<int, GaussLegendre> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, GaussLegendre(n)).first;
  return it->second;
}

QuadSpec QuadSpec::dflt(int dim) {
  QuadSpec q;
  q.radial = dim == 2 ? 64 : 48;
  q.polar = dim == 2 ? 128 : 32;
  q.azimuth = dim == 2 ? 0 : 64;
  return q;
}

QuadSpec QuadSpec::light(int dim) {
  QuadSpec q;
  q.radial = 6;
  q.polar = 6;
  q.azimuth = dim == 2 ? 0 : 8;
  q.ray_scan = 8;
  q.tol = 1e-4;
  return q;
}

namespace {

// Bisect a boolean transition in [lo, hi] where pred(lo)=lo_val != pred(hi).
double bisect_flip(const std::function<bool(double)>& pred, double lo, double hi,
                   bool lo_val, double atol) {
  while (hi - lo > atol) {
    double mid = 0.5 * (lo + hi);
    (pred(mid) == lo_val ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Bisect to the point where cls departs from its value at lo.
double bisect_class(const std::function<int(double)>& cls, double lo, double hi,
                    int lo_class, double atol) {
  while (hi - lo > atol) {
    double mid = 0.5 * (lo + hi);
    (cls(mid) == lo_class ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Subintervals of [lo, hi] where E holds, transitions refined to atol; an
// optional secondary classifier Q adds split points inside active runs where
// its value changes (used to separate ray fans with different clipping
// structure: sphere- vs region-clipped, differing segment counts).
std::vector<std::pair<double, double>> split_range(const std::function<bool(double)>& E,
                                                   const std::function<int(double)>& Q,
                                                   int m, double lo, double hi,
                                                   double atol) {
  std::vector<char> e(m + 1);
  double step = (hi - lo) / m;
  for (int i = 0; i <= m; ++i) e[i] = E(lo + step * i) ? 1 : 0;
  std::vector<std::pair<double, double>> runs;
  double cur = lo;
  bool open = e[0];
  for (int i = 0; i < m; ++i) {
    if (e[i] == e[i + 1]) continue;
    double t = bisect_flip(E, lo + step * i, lo + step * (i + 1), e[i], atol);
    if (open)
      runs.emplace_back(cur, t);
    else
      cur = t;
    open = !open;
  }
  if (open) runs.emplace_back(cur, hi);
  if (!Q) return runs;
  // secondary splits on the scan grid, only inside active runs
  std::vector<double> cuts;
  int qprev = 0;
  bool have_prev = false;
  for (int i = 0; i <= m; ++i) {
    if (!e[i]) {
      have_prev = false;
      continue;
    }
    int qi = Q(lo + step * i);
    if (have_prev && qi != qprev)
      cuts.push_back(bisect_class(Q, lo + step * (i - 1), lo + step * i, qprev, atol));
    qprev = qi;
    have_prev = true;
  }
  if (cuts.empty()) return runs;
  std::vector<std::pair<double, double>> out;
  for (auto [a, b] : runs) {
    double start = a;
    for (double c : cuts)
      if (c > start + atol && c < b - atol) {
        out.emplace_back(start, c);
        start = c;
      }
    out.emplace_back(start, b);
  }
  return out;
}

}  // namespace

std::vector<std::pair<double, double>> ray_inside_segments(
    const std::function<bool(const Vec&)>& inside, const Vec& center, const Vec& dir,
    double tmax, int scan, double tol) {
  Vec pt(center.size());
  auto at = [&](double t) -> bool {
    pt = center;
    pt.noalias() += t * dir;
    return inside(pt);
  };
  return split_range(at, nullptr, scan, 0.0, tmax, tol * tmax);
}

namespace {

// Shared radial accumulation: sum over inside-segments of
// int f(center + t dir) t^{d-1} dt by per-segment Gauss-Legendre.
double radial_integral(const std::function<double(const Vec&)>& f,
                       const std::function<bool(const Vec&)>& inside, const Vec& center,
                       const Vec& dir, double r, const QuadSpec& q, Vec& pt) {
  auto at = [&](double t) -> bool {
    pt = center;
    pt.noalias() += t * dir;
    return inside(pt);
  };
  auto segs = split_range(at, nullptr, q.ray_scan, 0.0, r, q.tol * r);
  if (segs.empty()) return 0.0;
  const auto& gl = gauss_legendre(q.radial);
  const int d = int(center.size());
  double acc = 0.0;
  for (auto [a, b] : segs) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    if (half <= 0.0) continue;
    double seg = 0.0;
    for (size_t i = 0; i < gl.x.size(); ++i) {
      double t = mid + half * gl.x[i];
      pt = center;
      pt.noalias() += t * dir;
      double jac = d == 2 ? t : t * t;
      seg += gl.w[i] * f(pt) * jac;
    }
    acc += seg * half;
  }
  return acc;
}

}  // namespace

double ball_integrate(const std::function<double(const Vec&)>& f,
                      const std::function<bool(const Vec&)>& inside, const Vec& center,
                      double r, const QuadSpec& q) {
  const int d = int(center.size());
  Vec pt(d), dir(d);
  const double rprobe = r * (1.0 - 1e-9);
  if (d == 2) {
    auto set_dir = [&](double a) {
      dir(0) = std::cos(a);
      dir(1) = std::sin(a);
    };
    auto ray_hit = [&](double a) -> bool {
      set_dir(a);
      for (int j = 0; j < q.ray_scan; ++j) {
        double t = r * (j + 0.5) / q.ray_scan;
        pt = center;
        pt.noalias() += t * dir;
        if (inside(pt)) return true;
      }
      return false;
    };
    // Clipping structure of the ray: inside-run flip count at the scan
    // resolution plus the membership just inside the sphere. The radial
    // integrand is smooth in the angle while this stays constant.
    auto ray_class = [&](double a) -> int {
      set_dir(a);
      int flips = 0;
      bool prev = false;
      for (int j = 0; j < q.ray_scan; ++j) {
        double t = r * (j + 0.5) / q.ray_scan;
        pt = center;
        pt.noalias() += t * dir;
        bool cur = inside(pt);
        if (j > 0 && cur != prev) ++flips;
        prev = cur;
      }
      pt = center;
      pt.noalias() += rprobe * dir;
      return 2 * flips + (inside(pt) ? 1 : 0);
    };
    auto arcs = split_range(ray_hit, ray_class, q.ray_scan, 0.0, 2.0 * M_PI,
                            q.tol * 2.0 * M_PI);
    const auto& gla = gauss_legendre(q.polar);
    double acc = 0.0;
    for (auto [a0, a1] : arcs) {
      double mid = 0.5 * (a0 + a1), half = 0.5 * (a1 - a0);
      if (half <= 0.0) continue;
      double arc = 0.0;
      for (size_t i = 0; i < gla.x.size(); ++i) {
        set_dir(mid + half * gla.x[i]);
        arc += gla.w[i] * radial_integral(f, inside, center, dir, r, q, pt);
      }
      acc += arc * half;
    }
    return acc;
  }
  // d = 3: Gauss-Legendre in azimuth, transition-split Gauss-Legendre in the
  // polar angle, clipped radial rule along each ray.
  const auto& glb = gauss_legendre(q.azimuth);
  const auto& glp = gauss_legendre(q.polar);
  double acc = 0.0;
  for (size_t ib = 0; ib < glb.x.size(); ++ib) {
    double b = M_PI * (1.0 + glb.x[ib]);
    double cb = std::cos(b), sb = std::sin(b);
    auto set_dir = [&](double ph) {
      double sp = std::sin(ph);
      dir(0) = sp * cb;
      dir(1) = sp * sb;
      dir(2) = std::cos(ph);
    };
    auto ray_hit = [&](double ph) -> bool {
      set_dir(ph);
      for (int j = 0; j < q.ray_scan; ++j) {
        double t = r * (j + 0.5) / q.ray_scan;
        pt = center;
        pt.noalias() += t * dir;
        if (inside(pt)) return true;
      }
      return false;
    };
    auto ray_class = [&](double ph) -> int {
      set_dir(ph);
      int flips = 0;
      bool prev = false;
      for (int j = 0; j < q.ray_scan; ++j) {
        double t = r * (j + 0.5) / q.ray_scan;
        pt = center;
        pt.noalias() += t * dir;
        bool cur = inside(pt);
        if (j > 0 && cur != prev) ++flips;
        prev = cur;
      }
      pt = center;
      pt.noalias() += rprobe * dir;
      return 2 * flips + (inside(pt) ? 1 : 0);
    };
    auto bands = split_range(ray_hit, ray_class, q.ray_scan, 0.0, M_PI, q.tol * M_PI);
    double fan = 0.0;
    for (auto [p0, p1] : bands) {
      double mid = 0.5 * (p0 + p1), half = 0.5 * (p1 - p0);
      if (half <= 0.0) continue;
      double band = 0.0;
      for (size_t ip = 0; ip < glp.x.size(); ++ip) {
        double ph = mid + half * glp.x[ip];
        set_dir(ph);
        band += glp.w[ip] * std::sin(ph) *
                radial_integral(f, inside, center, dir, r, q, pt);
      }
      fan += band * half;
    }
    acc += glb.w[ib] * M_PI * fan;
  }
  return acc;
}

double sphere_integrate(const std::function<double(const Vec&)>& f,
                        const std::function<bool(const Vec&)>& inside, const Vec& center,
                        double r, const QuadSpec& q) {
  const int d = int(center.size());
  Vec pt(d), dir(d);
  if (d == 2) {
    auto at = [&](double a) -> bool {
      pt(0) = center(0) + r * std::cos(a);
      pt(1) = center(1) + r * std::sin(a);
      return inside(pt);
    };
    auto arcs = split_range(at, nullptr, q.ray_scan, 0.0, 2.0 * M_PI, q.tol * 2.0 * M_PI);
    const auto& gla = gauss_legendre(q.polar);
    double acc = 0.0;
    for (auto [a0, a1] : arcs) {
      double mid = 0.5 * (a0 + a1), half = 0.5 * (a1 - a0);
      if (half <= 0.0) continue;
      double arc = 0.0;
      for (size_t i = 0; i < gla.x.size(); ++i) {
        double a = mid + half * gla.x[i];
        pt(0) = center(0) + r * std::cos(a);
        pt(1) = center(1) + r * std::sin(a);
        arc += gla.w[i] * f(pt);
      }
      acc += arc * half * r;
    }
    return acc;
  }
  const auto& glb = gauss_legendre(q.azimuth);
  const auto& glp = gauss_legendre(q.polar);
  double acc = 0.0;
  for (size_t ib = 0; ib < glb.x.size(); ++ib) {
    double b = M_PI * (1.0 + glb.x[ib]);
    double cb = std::cos(b), sb = std::sin(b);
    auto at_angle = [&](double ph) {
      double sp = std::sin(ph);
      pt(0) = center(0) + r * sp * cb;
      pt(1) = center(1) + r * sp * sb;
      pt(2) = center(2) + r * std::cos(ph);
    };
    auto at = [&](double ph) -> bool {
      at_angle(ph);
      return inside(pt);
    };
    auto bands = split_range(at, nullptr, q.ray_scan, 0.0, M_PI, q.tol * M_PI);
    double fan = 0.0;
    for (auto [p0, p1] : bands) {
      double mid = 0.5 * (p0 + p1), half = 0.5 * (p1 - p0);
      if (half <= 0.0) continue;
      double band = 0.0;
      for (size_t ip = 0; ip < glp.x.size(); ++ip) {
        double ph = mid + half * glp.x[ip];
        at_angle(ph);
        band += glp.w[ip] * std::sin(ph) * f(pt);
      }
      fan += band * half;
    }
    acc += glb.w[ib] * M_PI * fan * r * r;
  }
  return acc;
}

double graph_patch_integrate(const std::function<double(const Vec&)>& f,
                             const std::function<double(const Vec&)>& height,
                             const Vec& center, double r, const QuadSpec& q) {
  const int d = int(center.size());
  const int dh = d - 1;
  Vec y(dh), lift(d), yp(dh), ym(dh);
  auto at_y = [&](const Vec& yy) {
    lift.head(dh) = yy;
    lift(d - 1) = height(yy);
  };
  auto in_patch = [&](const Vec& yy) -> bool {
    at_y(yy);
    return (lift - center).norm() < r;
  };
  // area element sqrt(1 + |grad h|^2) by central differences
  auto weighted_f = [&](const Vec& yy) -> double {
    at_y(yy);
    double val = f(lift);
    double g2 = 0.0;
    for (int j = 0; j < dh; ++j) {
      double delta = 1e-6 * (1.0 + std::abs(yy(j)));
      yp = yy;
      ym = yy;
      yp(j) += delta;
      ym(j) -= delta;
      double dj = (height(yp) - height(ym)) / (2.0 * delta);
      g2 += dj * dj;
    }
    return val * std::sqrt(1.0 + g2);
  };
  Vec cy = center.head(dh);
  if (dh == 1) {
    const auto& gl = gauss_legendre(q.radial);
    double acc = 0.0;
    Vec dir1 = Vec::Constant(1, 1.0);
    for (double sgn : {1.0, -1.0}) {
      Vec dir = sgn * dir1;
      Vec ypt(1);
      auto at = [&](double t) -> bool {
        ypt = cy;
        ypt.noalias() += t * dir;
        return in_patch(ypt);
      };
      auto segs = split_range(at, nullptr, q.ray_scan, 0.0, r, q.tol * r);
      for (auto [a, b] : segs) {
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        if (half <= 0.0) continue;
        double seg = 0.0;
        for (size_t i = 0; i < gl.x.size(); ++i) {
          ypt = cy;
          ypt.noalias() += (mid + half * gl.x[i]) * dir;
          seg += gl.w[i] * weighted_f(ypt);
        }
        acc += seg * half;
      }
    }
    return acc;
  }
  // dh == 2: angular splitting in the horizontal plane
  Vec dir(2), ypt(2);
  auto ray_hit = [&](double a) -> bool {
    dir(0) = std::cos(a);
    dir(1) = std::sin(a);
    for (int j = 0; j < q.ray_scan; ++j) {
      ypt = cy;
      ypt.noalias() += (r * (j + 0.5) / q.ray_scan) * dir;
      if (in_patch(ypt)) return true;
    }
    return false;
  };
  auto arcs = split_range(ray_hit, nullptr, q.ray_scan, 0.0, 2.0 * M_PI,
                          q.tol * 2.0 * M_PI);
  const auto& gla = gauss_legendre(q.azimuth > 0 ? q.azimuth : q.polar);
  const auto& gl = gauss_legendre(q.radial);
  double acc = 0.0;
  for (auto [a0, a1] : arcs) {
    double amid = 0.5 * (a0 + a1), ahalf = 0.5 * (a1 - a0);
    if (ahalf <= 0.0) continue;
    double arc = 0.0;
    for (size_t ia = 0; ia < gla.x.size(); ++ia) {
      double a = amid + ahalf * gla.x[ia];
      dir(0) = std::cos(a);
      dir(1) = std::sin(a);
      auto at = [&](double t) -> bool {
        ypt = cy;
        ypt.noalias() += t * dir;
        return in_patch(ypt);
      };
      auto segs = split_range(at, nullptr, q.ray_scan, 0.0, r, q.tol * r);
      double ray = 0.0;
      for (auto [s0, s1] : segs) {
        double mid = 0.5 * (s0 + s1), half = 0.5 * (s1 - s0);
        if (half <= 0.0) continue;
        double seg = 0.0;
        for (size_t i = 0; i < gl.x.size(); ++i) {
          double t = mid + half * gl.x[i];
          ypt = cy;
          ypt.noalias() += t * dir;
          seg += gl.w[i] * weighted_f(ypt) * t;
        }
        ray += seg * half;
      }
      arc += gla.w[ia] * ray;
    }
    acc += arc * ahalf;
  }
  return acc;
}

}  // namespace freqstrat
