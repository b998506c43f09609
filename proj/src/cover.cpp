#include "freqstrat/cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace freqstrat {

double ConstantLedger::alpha0_for(int dim) const {
  return alpha0 > 0.0 ? alpha0 : 0.25 * alpha_d1(dim);
}

void ConstantLedger::validate() const {
  auto fail = [](const char* msg) {
    throw std::invalid_argument(std::string("ledger: ") + msg);
  };
  if (!(rho > 0.0) || rho > 0.5) fail("need 0 < rho <= 1/2");
  if (!(tau > 0.0)) fail("tau must be positive");
  if (!(delta > 0.0) || !(delta_in > 0.0) || !(delta0 > 0.0))
    fail("drop thresholds must be positive");
  if (!(beta > 0.0)) fail("beta must be positive");
  if (alpha0 < 0.0) fail("alpha0 must be nonnegative");
  if (!(C >= 0.0)) fail("C must be nonnegative");
  if (!(eta_dr > 0.0) || !(C_dr > 0.0)) fail("report constants must be positive");
  if (!(Cp_d > 0.0)) fail("Cp_d must be positive");
  if (Cp_d * rho >= 1.0) fail("need Cp_d * rho < 1");
  if (!(r_c > 0.0) || !(r_in > 0.0) || !(r_b > 0.0) || !(r_tn > 0.0))
    fail("scale caps must be positive");
  if (round_cap < 1) fail("round cap must be at least 1");
}

std::vector<int> CoverTree::leaves() const {
  std::vector<int> out;
  for (size_t i = 0; i < balls.size(); ++i)
    if (balls[i].children.empty()) out.push_back(int(i));
  return out;
}

double CoverTree::packing_sum(int k) const {
  double s = 0.0;
  for (int i : leaves()) s += std::pow(balls[i].radius, k);
  return s;
}

bool CoverTree::covers(const std::vector<Vec>& samples) const {
  if (samples.empty()) return true;
  // Leaf radii are level-snapped, so a handful of hash grids (cell = radius
  // slightly inflated, centers bucketed by radius) answer membership from
  // the 3^d neighborhood instead of scanning every leaf per sample.
  const int d = dim > 0 ? dim : int(samples[0].size());
  struct RadiusGrid {
    double radius = 0.0, cell = 0.0;
    std::unordered_map<uint64_t, std::vector<int>> cells;
  };
  std::unordered_map<int64_t, RadiusGrid> grids;
  auto key_of = [d](const Vec& p, double cell, int64_t* ic) {
    const int64_t off = int64_t(1) << 20;
    uint64_t key = 0;
    for (int k = 0; k < d; ++k) {
      ic[k] = int64_t(std::floor(p(k) / cell));
      key = (key << 21) | uint64_t(ic[k] + off);
    }
    return key;
  };
  int64_t ic[3] = {0, 0, 0};
  for (int i : leaves()) {
    double r = balls[i].radius;
    auto [it, fresh] = grids.try_emplace(std::llround(r * 1e12));
    if (fresh) {
      it->second.radius = r;
      it->second.cell = r * (1.0 + 1e-9) + 1e-12;
    }
    it->second.cells[key_of(balls[i].center, it->second.cell, ic)].push_back(i);
  }
  const int span = d == 3 ? 27 : 9;
  for (const auto& s : samples) {
    bool in = false;
    for (auto& [rq, g] : grids) {
      key_of(s, g.cell, ic);
      for (int m = 0; m < span && !in; ++m) {
        int64_t nb[3] = {ic[0] + m % 3 - 1, ic[1] + (m / 3) % 3 - 1,
                         d == 3 ? ic[2] + m / 9 - 1 : 0};
        const int64_t off = int64_t(1) << 20;
        uint64_t key = 0;
        for (int k = 0; k < d; ++k) key = (key << 21) | uint64_t(nb[k] + off);
        auto cit = g.cells.find(key);
        if (cit == g.cells.end()) continue;
        for (int i : cit->second)
          if ((s - balls[i].center).norm() <= g.radius + 1e-12) {
            in = true;
            break;
          }
      }
      if (in) break;
    }
    if (!in) return false;
  }
  return true;
}

bool CoverTree::fifth_ball_disjoint() const {
  auto batch_ok = [&](const std::vector<int>& ids) {
    for (size_t a = 0; a < ids.size(); ++a)
      for (size_t b = a + 1; b < ids.size(); ++b) {
        const CoverBall& A = balls[ids[a]];
        const CoverBall& B = balls[ids[b]];
        if (!((A.center - B.center).norm() > (A.radius + B.radius) / 5.0)) return false;
      }
    return true;
  };
  if (!batch_ok(roots)) return false;
  for (const auto& b : balls)
    if (!batch_ok(b.children)) return false;
  return true;
}

size_t FrequencyMemo::KeyHash::operator()(const Key& k) const {
  uint64_t z = (uint64_t(uint32_t(k.id)) << 32) ^ uint64_t(k.rq);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return size_t(z ^ (z >> 31));
}

FrequencyMemo::FrequencyMemo(const GraphDomain& domain, FieldPtr f, double C_ledger, QuadSpec q)
    : domain_(&domain), f_(std::move(f)), C_(C_ledger), q_(q) {}

double FrequencyMemo::value(int sample_id, const Vec& X, double r) {
  Key key{sample_id, int64_t(std::llround(r * 1e12))};
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  double v = unified_frequency(*domain_, *f_, X, r, C_, q_).N_mod;
  cache_.emplace(key, v);
  return v;
}

namespace {

inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double u01(uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

inline uint64_t cell_key(const int64_t* ic, int d) {
  const int64_t off = int64_t(1) << 20;
  uint64_t key = 0;
  for (int k = 0; k < d; ++k) key = (key << 21) | uint64_t(ic[k] + off);
  return key;
}

// Shared machinery for build/refine/iterate. Children of a ball partition
// the samples it owns, so coverage holds by induction; greedy centers are
// pairwise farther apart than the batch radius, which implies fifth-ball
// disjointness.
struct Builder {
  CoverTree& t;
  const std::vector<Vec>& S;
  FrequencyMemo memo;
  const ConstantLedger& led;
  double r0;
  // one hash grid per query radius (cell = radius, so the 3^d neighborhood
  // is complete); radii repeat per level, so a handful of grids serve every
  // in_ball query without O(|S|) scans
  std::unordered_map<int64_t, std::unordered_map<uint64_t, std::vector<int>>> grids;

  Builder(CoverTree& tree, const GraphDomain& dom, FieldPtr f, const std::vector<Vec>& samples,
          const ConstantLedger& ledger, const QuadSpec& q)
      : t(tree), S(samples), memo(dom, std::move(f), ledger.C, q), led(ledger), r0(tree.r0) {}

  std::vector<int> in_ball(const Vec& c, double r) {
    const int d = int(c.size());
    auto [it, fresh] = grids.try_emplace(std::llround(r * 1e12));
    auto& grid = it->second;
    if (fresh)
      for (size_t i = 0; i < S.size(); ++i) {
        int64_t ic[3] = {0, 0, 0};
        for (int k = 0; k < d; ++k) ic[k] = int64_t(std::floor(S[i](k) / r));
        grid[cell_key(ic, d)].push_back(int(i));
      }
    std::vector<int> ids;
    int64_t ic[3] = {0, 0, 0}, nb[3] = {0, 0, 0};
    for (int k = 0; k < d; ++k) ic[k] = int64_t(std::floor(c(k) / r));
    const int span = d == 3 ? 27 : 9;
    for (int m = 0; m < span; ++m) {
      nb[0] = ic[0] + m % 3 - 1;
      nb[1] = ic[1] + (m / 3) % 3 - 1;
      if (d == 3) nb[2] = ic[2] + m / 9 - 1;
      auto cit = grid.find(cell_key(nb, d));
      if (cit == grid.end()) continue;
      for (int i : cit->second)
        if ((S[size_t(i)] - c).norm() <= r) ids.push_back(i);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  double measure_lambda() {
    size_t stride = std::max<size_t>(1, S.size() / 256);
    double lam = 0.0;
    for (size_t i = 0; i < S.size(); i += stride)
      lam = std::max(lam, memo.value(int(i), S[i], t.r_star));
    return lam;
  }

  double child_radius(double r) const {
    double rc = std::max(led.rho * r, r0);
    if (rc <= r0 * (1.0 + 1e-9)) rc = r0;
    return rc;
  }

  // Greedy farthest-point covering of the candidates at one radius; centers
  // are sample points, lowest id first, ties to the lowest id. Each covered
  // candidate is owned by the ball that first covers it.
  std::vector<int> batch(int parent, const std::vector<int>& cands, double radius, int level) {
    std::vector<int> made;
    std::vector<double> dist(cands.size(), std::numeric_limits<double>::infinity());
    std::vector<char> covered(cands.size(), 0);
    size_t left = cands.size();
    int pos = 0;
    while (left > 0) {
      const Vec center = S[cands[pos]];
      CoverBall b;
      b.center = center;
      b.radius = radius;
      b.level = level;
      b.parent = parent;
      b.label = radius <= r0 ? BallLabel::Terminal : BallLabel::Good;
      int idx = int(t.balls.size());
      t.balls.push_back(std::move(b));
      if (parent >= 0)
        t.balls[parent].children.push_back(idx);
      else
        t.roots.push_back(idx);
      made.push_back(idx);
      int next = -1;
      double best = -1.0;
      for (size_t j = 0; j < cands.size(); ++j) {
        if (covered[j]) continue;
        double dj = (S[cands[j]] - center).norm();
        if (dj <= radius) {
          covered[j] = 1;
          --left;
          t.balls[idx].sample_ids.push_back(cands[j]);
          continue;
        }
        dist[j] = std::min(dist[j], dj);
        if (dist[j] > best + 1e-15) {
          best = dist[j];
          next = int(j);
        }
      }
      pos = next;
    }
    return made;
  }

  std::vector<int> freq_set(const Vec& center, double r, double cap) {
    std::vector<int> F;
    const double qr = led.rho * r / 10.0;
    auto cands = in_ball(center, 2.0 * r);
    // Witness resolution tracks the ball scale, not the sample spacing: 256
    // strided witnesses decide emptiness and spanning at scale r (same cap
    // as the Lambda* stride), so dense clouds do not force per-sample
    // frequency evaluations at every level.
    const size_t stride = std::max<size_t>(1, cands.size() / 256);
    for (size_t j = 0; j < cands.size(); j += stride) {
      int id = cands[j];
      if (memo.value(id, S[id], qr) >= cap - led.delta) F.push_back(id);
    }
    return F;
  }

  void process(int i, double cap) {
    if (t.balls[i].label == BallLabel::Terminal) return;
    const Vec center = t.balls[i].center;
    const double r = t.balls[i].radius;
    const int level = t.balls[i].level;
    const double rc = child_radius(r);
    const auto owned = t.balls[i].sample_ids;  // copy: batch() grows t.balls
    auto F = freq_set(center, r, cap);
    if (F.empty()) {
      t.balls[i].label = BallLabel::EmptyF;
      auto kids = batch(i, owned, rc, level + 1);
      for (int c : kids)
        if (t.balls[c].label != BallLabel::Terminal)
          t.balls[c].label = BallLabel::FrequencyDrop;
      return;
    }
    const int k = t.dim - 2;
    if (k >= 1) {
      std::vector<Vec> Fp;
      Fp.reserve(F.size());
      for (int id : F) Fp.push_back(S[id]);
      auto cert = effective_spanning_test(Fp, k, led.tau, 2.0 * r);
      if (!cert.spans) {
        t.balls[i].label = BallLabel::SmallDimension;
        return;
      }
    }
    t.balls[i].label = BallLabel::Good;
    auto kids = batch(i, owned, rc, level + 1);
    for (int c : kids) process(c, cap);
  }

  void replace_small_dimension(int i, double cap) {
    const Vec center = t.balls[i].center;
    const double r = t.balls[i].radius;
    const int level = t.balls[i].level;
    const auto owned = t.balls[i].sample_ids;
    auto F = freq_set(center, r, cap);
    std::vector<Vec> Fp;
    Fp.reserve(F.size());
    for (int id : F) Fp.push_back(S[id]);
    auto cert = effective_spanning_test(Fp, t.dim - 2, led.tau, 2.0 * r);
    const double rc = child_radius(r);
    auto kids = batch(i, owned, rc, level + 1);
    // children near the containment subspace stay on the good branch; the
    // rest carry a definite frequency drop
    int on_count = 0;
    std::vector<int> recurse;
    for (int c : kids) {
      Vec rel = t.balls[c].center - cert.base;
      if (cert.directions.cols() > 0)
        rel -= cert.directions * (cert.directions.transpose() * rel);
      if (rel.norm() <= cert.max_containment_dist + rc) {
        ++on_count;
        if (t.balls[c].label != BallLabel::Terminal) recurse.push_back(c);
      } else if (t.balls[c].label != BallLabel::Terminal) {
        t.balls[c].label = BallLabel::FrequencyDrop;
      }
    }
    double count_cap = led.Cp_d * std::pow(led.rho, 3 - t.dim);
    if (double(on_count) > count_cap + 1e-9)
      throw std::runtime_error(
          "refine_small_dimension: subspace ball count exceeds Cp_d * rho^(3-d)");
    t.balls[i].label = BallLabel::Good;
    for (int c : recurse) process(c, cap);
  }

  void refine_pass(double cap) {
    for (;;) {
      std::vector<int> sd;
      for (size_t i = 0; i < t.balls.size(); ++i)
        if (t.balls[i].children.empty() && t.balls[i].label == BallLabel::SmallDimension)
          sd.push_back(int(i));
      if (sd.empty()) return;
      for (int i : sd) replace_small_dimension(i, cap);
    }
  }
};

void check_scales(double r0, double r_star, const ConstantLedger& led, const char* who) {
  if (!(r0 > 0.0) || r0 > r_star)
    throw std::invalid_argument(std::string(who) + ": need 0 < r0 <= r*");
  if (r_star > led.r_c)
    throw std::invalid_argument(std::string(who) + ": r* exceeds the ledger scale cap");
}

}  // namespace

CoverTree build_cover(const GraphDomain& domain, FieldPtr f, const std::vector<Vec>& samples,
                      double r0, double r_star, const ConstantLedger& ledger,
                      const QuadSpec& q) {
  ledger.validate();
  check_scales(r0, r_star, ledger, "build_cover");
  CoverTree tree;
  tree.dim = domain.dim();
  tree.r0 = r0;
  tree.r_star = r_star;
  if (samples.empty()) return tree;
  Builder bld(tree, domain, std::move(f), samples, ledger, q);
  tree.lambda_star = bld.measure_lambda();
  std::vector<int> all(samples.size());
  std::iota(all.begin(), all.end(), 0);
  auto roots = bld.batch(-1, all, r_star, 0);
  for (int i : roots) bld.process(i, tree.lambda_star);
  return tree;
}

void refine_small_dimension(CoverTree& tree, const GraphDomain& domain, FieldPtr f,
                            const std::vector<Vec>& samples, const ConstantLedger& ledger,
                            const QuadSpec& q) {
  ledger.validate();
  Builder bld(tree, domain, std::move(f), samples, ledger, q);
  bld.refine_pass(tree.lambda_star);
}

std::pair<CoverTree, PackingReport> iterate_cover(const GraphDomain& domain, FieldPtr f,
                                                  const std::vector<Vec>& samples, double r0,
                                                  double r_star, const ConstantLedger& ledger,
                                                  const QuadSpec& q) {
  ledger.validate();
  check_scales(r0, r_star, ledger, "iterate_cover");
  CoverTree tree;
  tree.dim = domain.dim();
  tree.r0 = r0;
  tree.r_star = r_star;
  PackingReport rep;
  if (samples.empty()) return {std::move(tree), rep};
  Builder bld(tree, domain, std::move(f), samples, ledger, q);
  tree.lambda_star = bld.measure_lambda();
  std::vector<int> all(samples.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> frontier = bld.batch(-1, all, r_star, 0);
  int rounds = 0;
  while (!frontier.empty()) {
    ++rounds;
    if (rounds > ledger.round_cap)
      throw std::runtime_error(
          "iterate_cover: round cap exceeded (delta too small for the frequency range)");
    double cap = tree.lambda_star - double(rounds - 1) * ledger.delta;
    for (int i : frontier) bld.process(i, cap);
    bld.refine_pass(cap);
    frontier.clear();
    for (size_t i = 0; i < tree.balls.size(); ++i)
      if (tree.balls[i].children.empty() &&
          tree.balls[i].label == BallLabel::FrequencyDrop)
        frontier.push_back(int(i));
  }
  rep.lambda_star = tree.lambda_star;
  rep.rounds = rounds;
  auto lv = tree.leaves();
  rep.leaf_count = int(lv.size());
  const int k = tree.dim - 2;
  int max_level = 0;
  for (int i : lv) max_level = std::max(max_level, tree.balls[i].level);
  rep.per_level_sum.assign(size_t(max_level) + 1, 0.0);
  for (int i : lv) {
    double contrib = std::pow(tree.balls[i].radius, k);
    rep.packing_sum += contrib;
    rep.per_level_sum[size_t(tree.balls[i].level)] += contrib;
  }
  rep.C_p = rep.packing_sum / std::pow(r_star, k);
  rep.count_scaling = double(rep.leaf_count) * std::pow(r0 / r_star, k);
  return {std::move(tree), rep};
}

MinkowskiEstimate minkowski_estimate(const std::vector<Vec>& A, double r,
                                     std::uint64_t n_probes, std::uint64_t seed,
                                     int threads) {
  if (!(r > 0.0)) throw std::invalid_argument("minkowski_estimate: r must be positive");
  MinkowskiEstimate est;
  est.seed = seed;
  if (A.empty()) return est;
  if (n_probes == 0) throw std::invalid_argument("minkowski_estimate: need probes");
  const int d = int(A[0].size());
  Vec lo = A[0], hi = A[0];
  for (const auto& p : A)
    for (int k = 0; k < d; ++k) {
      lo(k) = std::min(lo(k), p(k));
      hi(k) = std::max(hi(k), p(k));
    }
  lo.array() -= r;
  hi.array() += r;
  double vol_box = 1.0;
  for (int k = 0; k < d; ++k) vol_box *= hi(k) - lo(k);

  // hash grid at cell size r: any point within r of a probe lies in one of
  // the 3^d cells around the probe's cell
  std::unordered_map<uint64_t, std::vector<int>> grid;
  for (size_t i = 0; i < A.size(); ++i) {
    int64_t ic[3] = {0, 0, 0};
    for (int k = 0; k < d; ++k) ic[k] = int64_t(std::floor(A[i](k) / r));
    grid[cell_key(ic, d)].push_back(int(i));
  }
  const double r2 = r * r;
  auto probe_hit = [&](uint64_t i) {
    double p[3] = {0.0, 0.0, 0.0};
    int64_t ic[3] = {0, 0, 0};
    for (int k = 0; k < d; ++k) {
      p[k] = lo(k) + (hi(k) - lo(k)) * u01(mix64(seed + mix64(i * 8 + uint64_t(k))));
      ic[k] = int64_t(std::floor(p[k] / r));
    }
    int64_t nb[3];
    int span = d == 3 ? 27 : 9;
    for (int m = 0; m < span; ++m) {
      nb[0] = ic[0] + m % 3 - 1;
      nb[1] = ic[1] + (m / 3) % 3 - 1;
      if (d == 3) nb[2] = ic[2] + m / 9 - 1;
      auto it = grid.find(cell_key(nb, d));
      if (it == grid.end()) continue;
      for (int id : it->second) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
          double diff = p[k] - A[size_t(id)](k);
          s += diff * diff;
        }
        if (s <= r2) return true;
      }
    }
    return false;
  };

  int nt = std::max(1, threads);
  std::vector<uint64_t> counts(size_t(nt), 0);
  auto work = [&](int tid) {
    uint64_t b = n_probes * uint64_t(tid) / uint64_t(nt);
    uint64_t e = n_probes * uint64_t(tid + 1) / uint64_t(nt);
    uint64_t c = 0;
    for (uint64_t i = b; i < e; ++i) c += probe_hit(i) ? 1 : 0;
    counts[size_t(tid)] = c;
  };
  if (nt == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int tid = 0; tid < nt; ++tid) pool.emplace_back(work, tid);
    for (auto& th : pool) th.join();
  }
  for (uint64_t c : counts) est.hits += c;
  est.probes = n_probes;
  if (est.hits == 0) throw std::runtime_error("minkowski_estimate: no probes hit the tube");
  double ph = double(est.hits) / double(n_probes);
  est.volume = vol_box * ph;
  est.content = est.volume / (4.0 * r * r);
  est.stderr_rel = std::sqrt((1.0 - ph) / (ph * double(n_probes)));
  return est;
}

}  // namespace freqstrat
