#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "freqstrat/field.hpp"
#include "freqstrat/frequency.hpp"
#include "freqstrat/singular.hpp"

namespace freqstrat {

// Every otherwise-unhoused constant, config-overridable. Defaults are
// empirical knobs; none of them claims to be a derived value.
struct ConstantLedger {
  double C = 20.0;        // exponent constant in the modified frequency
  double rho = 0.1;       // subdivision ratio
  double tau = 0.01;      // spanning threshold (rho/10)
  double delta = 0.1;     // frequency-drop threshold
  double delta_in = 0.1;  // interior replacement slack
  double delta0 = 0.2;
  double alpha0 = 0.0;    // 0 means 0.25 * alpha_d1(dim) at point of use
  double beta = 0.3;
  double eta_dr = 0.01, C_dr = 100.0;
  double Cp_d = 8.0;      // small-dimension refinement count constant
  double r_c = 0.5, r_in = 0.5, r_b = 0.5, r_tn = 0.5;
  int round_cap = 64;
  double alpha0_for(int dim) const;
  void validate() const;  // throws on inconsistent scales or Cp_d * rho >= 1
};

enum class BallLabel { Good, Terminal, SmallDimension, FrequencyDrop, EmptyF };

struct CoverBall {
  Vec center;
  double radius = 0.0;
  BallLabel label = BallLabel::Good;
  int level = 0;
  int parent = -1;
  std::vector<int> children;
  // Samples this ball owns: each batch partitions its candidates (first
  // cover wins), so leaf counts obey the packing bound instead of inflating
  // in sibling overlaps.
  std::vector<int> sample_ids;
};

struct CoverTree {
  std::vector<CoverBall> balls;
  std::vector<int> roots;
  int dim = 0;
  double r_star = 0.0, r0 = 0.0;
  double lambda_star = 0.0;  // measured max N_Y(r*) over samples near 0

  std::vector<int> leaves() const;
  double packing_sum(int k) const;  // sum r_X^k over leaves
  bool covers(const std::vector<Vec>& samples) const;
  // Pairwise center distances > (r_X + r_X')/5 among same-batch siblings.
  bool fifth_ball_disjoint() const;
};

struct PackingReport {
  double lambda_star = 0.0;
  int rounds = 0;
  int leaf_count = 0;
  double packing_sum = 0.0;  // sum over leaves of r^{d-2}
  double C_p = 0.0;          // packing_sum / r*^{d-2}
  double count_scaling = 0.0;  // leaf_count * (r0/r*)^{d-2}
  std::vector<double> per_level_sum;
};

// Frequency evaluations during covering go through this memo (per-sample,
// per-radius); values use the unified frequency with the light quadrature.
class FrequencyMemo {
public:
  FrequencyMemo(const GraphDomain& domain, FieldPtr f, double C_ledger, QuadSpec q);
  double value(int sample_id, const Vec& X, double r);

private:
  const GraphDomain* domain_;
  FieldPtr f_;
  double C_;
  QuadSpec q_;
  struct Key {
    int id;
    int64_t rq;  // radius quantized at 1e-12
    bool operator==(const Key& o) const { return id == o.id && rq == o.rq; }
  };
  struct KeyHash {
    size_t operator()(const Key& k) const;
  };
  std::unordered_map<Key, double, KeyHash> cache_;
};

// One round of the inductive covering: subdivision by frequency threshold
// Lambda - delta at query radius rho * r_X / 10, effective spanning with
// k = d-2 at threshold tau * (2 r_X), greedy child selection over uncovered
// samples (child radius max(rho r_X, r0)).
CoverTree build_cover(const GraphDomain& domain, FieldPtr f, const std::vector<Vec>& samples,
                      double r0, double r_star, const ConstantLedger& ledger,
                      const QuadSpec& q);

// Replace small-dimension leaves: children on the certificate subspace
// neighborhood stay good (count asserted <= Cp_d * rho^{3-d}), the rest are
// frequency-drop. Requires Cp_d * rho < 1.
void refine_small_dimension(CoverTree& tree, const GraphDomain& domain, FieldPtr f,
                            const std::vector<Vec>& samples, const ConstantLedger& ledger,
                            const QuadSpec& q);

// Full iteration: rounds with caps Lambda* - j delta until every leaf is
// terminal (or the round cap trips). Returns the tree and packing report.
std::pair<CoverTree, PackingReport> iterate_cover(const GraphDomain& domain, FieldPtr f,
                                                  const std::vector<Vec>& samples, double r0,
                                                  double r_star, const ConstantLedger& ledger,
                                                  const QuadSpec& q);

struct MinkowskiEstimate {
  double content = 0.0;  // (2r)^{(d-2)-d} |B_r(A)|
  double volume = 0.0;   // |B_r(A)| estimate
  double stderr_rel = 0.0;
  std::uint64_t probes = 0, hits = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo tube volume over the bounding box of A inflated by r;
// deterministic for fixed seed independent of thread count.
MinkowskiEstimate minkowski_estimate(const std::vector<Vec>& A, double r,
                                     std::uint64_t n_probes, std::uint64_t seed,
                                     int threads);

}  // namespace freqstrat
