#include "freqstrat/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "freqstrat/beta.hpp"
#include "freqstrat/io_util.hpp"
#include "freqstrat/singular.hpp"
#include "json.hpp"

namespace freqstrat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
};

json ledger_json(const ConstantLedger& l) {
  json o;
  o["C"] = l.C;
  o["rho"] = l.rho;
  o["tau"] = l.tau;
  o["delta"] = l.delta;
  o["delta_in"] = l.delta_in;
  o["delta0"] = l.delta0;
  o["alpha0"] = l.alpha0;
  o["beta"] = l.beta;
  o["eta_dr"] = l.eta_dr;
  o["C_dr"] = l.C_dr;
  o["Cp_d"] = l.Cp_d;
  o["r_c"] = l.r_c;
  o["r_in"] = l.r_in;
  o["r_b"] = l.r_b;
  o["r_tn"] = l.r_tn;
  o["round_cap"] = l.round_cap;
  return o;
}

// Thread count deliberately omitted: artifacts must be byte-identical across
// thread counts. The CLI layer records the effective count separately.
std::string manifest_text(const ExperimentConfig& cfg) {
  json m;
  m["config_hash"] = std::to_string(fnv1a(cfg.raw_json));
  m["experiment"] = cfg.experiment;
  m["seed"] = cfg.seed;
  m["ledger"] = ledger_json(cfg.ledger);
  return m.dump(2) + "\n";
}

std::string checks_text(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const auto& c : checks)
    arr.push_back(json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return arr.dump(2) + "\n";
}

std::vector<Vec> config_centers(const ExperimentConfig& cfg) {
  std::vector<Vec> out;
  for (const auto& c : cfg.centers) {
    Vec X(cfg.dim);
    for (int k = 0; k < cfg.dim; ++k) X(k) = c[size_t(k)];
    out.push_back(X);
  }
  if (out.empty()) out.push_back(Vec::Zero(cfg.dim));
  return out;
}

std::string point_label(const Vec& X) {
  std::string s = "(";
  for (int k = 0; k < X.size(); ++k) s += (k ? "," : "") + fmt17(X(k));
  return s + ")";
}

void require_radii(const ExperimentConfig& cfg, size_t at_least = 1) {
  if (cfg.radii.size() < at_least)
    throw ConfigError("config: radii: " + cfg.experiment + " needs at least " +
                      std::to_string(at_least) + (at_least == 1 ? " radius" : " radii"));
}

std::vector<std::string> coord_header(int dim, const char* stem) {
  std::vector<std::string> h;
  for (int k = 0; k < dim; ++k) h.push_back(stem + std::to_string(k + 1));
  return h;
}

const char* tag_name(PointTag t) {
  switch (t) {
    case PointTag::Nodal: return "nodal";
    case PointTag::Critical: return "critical";
    case PointTag::Singular: return "singular";
    case PointTag::EffectiveCritical: return "effective_critical";
  }
  return "unknown";
}

const char* label_name(BallLabel l) {
  switch (l) {
    case BallLabel::Good: return "good";
    case BallLabel::Terminal: return "terminal";
    case BallLabel::SmallDimension: return "small_dimension";
    case BallLabel::FrequencyDrop: return "frequency_drop";
    case BallLabel::EmptyF: return "empty_F";
  }
  return "unknown";
}

// Singular-set sample points for the covering / tube-volume experiments: scan
// the box over the ball of radius r* at a coarse resolution, then (d = 3)
// densify the located curve to the requested spacing and clip to the ball.
std::vector<Vec> singular_samples(const ExperimentConfig& cfg, const GraphDomain& dom,
                                  const HarmonicField& f, double spacing) {
  double half = cfg.r_star > 0 ? cfg.r_star : 0.5;
  Vec lo(cfg.dim), hi(cfg.dim);
  for (int k = 0; k < cfg.dim; ++k) {
    lo(k) = k + 1 == cfg.dim ? 0.0 : -1.04 * half;
    hi(k) = 1.04 * half;
  }
  double h0 = std::max(0.02, std::min(spacing, half / 4));
  auto located = locate_singular_set(dom, f, AxisBox{lo, hi}, h0);
  std::vector<Vec> seeds;
  for (const auto& tp : located.points) seeds.push_back(tp.X);
  std::vector<Vec> dense =
      cfg.dim == 3 && spacing < h0 ? densify_curve(dom, f, seeds, spacing) : seeds;
  std::vector<Vec> kept;
  for (const auto& X : dense)
    if (X.norm() <= half) kept.push_back(X);
  return kept;
}

// --------------------------------------------------------------------------
// frequency-profile / monotonicity-sweep: N-profiles over the configured
// centers and radii, with the nondecreasing check at eps = 1e-4 (1 + N).

void run_profile_sweep(const ExperimentConfig& cfg, ArtifactBundle& b,
                       std::vector<Check>& checks, bool sweep) {
  require_radii(cfg);
  GraphDomain dom = make_domain(cfg);
  FieldPtr f = make_field(cfg, dom);
  auto centers = config_centers(cfg);
  CsvWriter csv;
  auto head = coord_header(cfg.dim, "c");
  for (const char* col : {"r", "D", "H", "N", "N_mod"}) head.push_back(col);
  if (sweep) {
    head.push_back("drop");
    head.push_back("pass");
  }
  csv.header(head);
  for (const auto& X : centers) {
    double prev = 0.0;
    bool have_prev = false;
    for (double r : cfg.radii) {
      FrequencySample s = unified_frequency(dom, *f, X, r, cfg.ledger.C, cfg.quad);
      double drop = have_prev ? prev - s.N_mod : 0.0;
      double eps = 1e-4 * (1.0 + std::abs(s.N_mod));
      bool ok = drop <= eps;
      std::vector<std::string> row;
      for (int k = 0; k < cfg.dim; ++k) row.push_back(fmt17(X(k)));
      for (double v : {r, s.D, s.H, s.N, s.N_mod}) row.push_back(fmt17(v));
      if (sweep) {
        row.push_back(fmt17(drop));
        row.push_back(ok ? "1" : "0");
      }
      csv.row(row);
      if (have_prev)
        checks.push_back({"monotone[" + fmt17(r) + "]", ok,
                          point_label(X) + ": " + fmt17(prev) + " -> " + fmt17(s.N_mod)});
      prev = s.N_mod;
      have_prev = true;
    }
  }
  b.files[sweep ? "monotonicity_sweep.csv" : "frequency_profile.csv"] = csv.text;
}

// --------------------------------------------------------------------------
// rigidity: monotonicity residuals and dN/dr at boundary centers.

void run_rigidity(const ExperimentConfig& cfg, ArtifactBundle& b, std::vector<Check>& checks) {
  require_radii(cfg);
  GraphDomain dom = make_domain(cfg);
  FieldPtr f = make_field(cfg, dom);
  CsvWriter csv;
  auto head = coord_header(cfg.dim, "c");
  for (const char* col : {"r", "R_h", "R_b", "dNdr"}) head.push_back(col);
  csv.header(head);
  for (const auto& X : config_centers(cfg)) {
    TransformFrame frame(dom, X);
    for (double r : cfg.radii) {
      auto [rh, rb] = monotonicity_residuals(frame, *f, r, cfg.quad);
      double dn = frequency_derivative(frame, *f, r, cfg.quad);
      std::vector<std::string> row;
      for (int k = 0; k < cfg.dim; ++k) row.push_back(fmt17(X(k)));
      for (double v : {r, rh, rb, dn}) row.push_back(fmt17(v));
      csv.row(row);
      checks.push_back({"rigidity[" + fmt17(r) + "]", rh >= -1e-6 && rb >= -1e-6,
                        point_label(X) + ": R_h " + fmt17(rh) + ", R_b " + fmt17(rb)});
    }
  }
  b.files["rigidity.csv"] = csv.text;
}

// --------------------------------------------------------------------------
// doubling: sandwich bounds for consecutive radii pairs.

void run_doubling(const ExperimentConfig& cfg, ArtifactBundle& b, std::vector<Check>& checks) {
  require_radii(cfg, 2);
  GraphDomain dom = make_domain(cfg);
  FieldPtr f = make_field(cfg, dom);
  CsvWriter csv;
  auto head = coord_header(cfg.dim, "c");
  for (const char* col : {"r1", "r2", "ratio", "lower", "upper", "slack", "pass"})
    head.push_back(col);
  csv.header(head);
  for (const auto& X : config_centers(cfg)) {
    TransformFrame frame(dom, X);
    for (size_t i = 0; i + 1 < cfg.radii.size(); ++i) {
      double r1 = cfg.radii[i], r2 = cfg.radii[i + 1];
      DoublingReport rep = doubling_check(frame, *f, r1, r2, cfg.ledger.C, cfg.quad);
      std::vector<std::string> row;
      for (int k = 0; k < cfg.dim; ++k) row.push_back(fmt17(X(k)));
      for (double v : {r1, r2, rep.ratio, rep.lower, rep.upper, rep.slack})
        row.push_back(fmt17(v));
      row.push_back(rep.pass ? "1" : "0");
      csv.row(row);
      checks.push_back({"doubling[" + fmt17(r1) + "->" + fmt17(r2) + "]", rep.pass,
                        point_label(X) + ": ratio " + fmt17(rep.ratio) + " in [" +
                            fmt17(rep.lower) + ", " + fmt17(rep.upper) + "]"});
    }
  }
  b.files["doubling.csv"] = csv.text;
}

// --------------------------------------------------------------------------
// singular-map: locate the refined singular/critical set over the r* box.

void run_singular_map(const ExperimentConfig& cfg, ArtifactBundle& b,
                      std::vector<Check>& checks) {
  GraphDomain dom = make_domain(cfg);
  FieldPtr f = make_field(cfg, dom);
  double half = cfg.r_star > 0 ? cfg.r_star : 0.5;
  Vec lo(cfg.dim), hi(cfg.dim);
  for (int k = 0; k < cfg.dim; ++k) {
    lo(k) = k + 1 == cfg.dim ? 0.0 : -1.04 * half;
    hi(k) = 1.04 * half;
  }
  double h = cfg.sample_spacing > 0 ? cfg.sample_spacing : 0.02;
  auto set = locate_singular_set(dom, *f, AxisBox{lo, hi}, h);
  CsvWriter csv;
  auto head = coord_header(cfg.dim, "x");
  head.push_back("tag");
  head.push_back("residual");
  csv.header(head);
  double worst = 0.0;
  for (const auto& tp : set.points) {
    worst = std::max(worst, tp.residual);
    std::vector<std::string> row;
    for (int k = 0; k < cfg.dim; ++k) row.push_back(fmt17(tp.X(k)));
    row.push_back(tag_name(tp.tag));
    row.push_back(fmt17(tp.residual));
    csv.row(row);
  }
  checks.push_back({"residuals", worst <= 1e-8,
                    std::to_string(set.points.size()) + " points, max residual " + fmt17(worst)});
  b.files["singular_points.csv"] = csv.text;
}

// --------------------------------------------------------------------------
// beta-sweep: beta numbers of the located singular line and both sides of the
// beta-vs-frequency-drop bound, over the configured radii.

void run_beta_sweep(const ExperimentConfig& cfg, ArtifactBundle& b, std::vector<Check>& checks) {
  if (cfg.dim != 3) throw ConfigError("config: dim: beta-sweep needs dim 3");
  require_radii(cfg);
  GraphDomain dom = make_domain(cfg);
  FieldPtr f = make_field(cfg, dom);
  double spacing = cfg.sample_spacing > 0 ? cfg.sample_spacing : 0.01;
  auto pts = singular_samples(cfg, dom, *f, spacing);
  checks.push_back({"samples", !pts.empty(), std::to_string(pts.size()) + " samples"});
  WeightedCloud mu{pts, std::vector<double>(pts.size(), spacing)};
  Vec p0 = config_centers(cfg)[0];
  CsvWriter csv;
  csv.header({"r", "beta", "lhs", "drop_term", "mass_term", "rhs", "ratio"});
  for (double r : cfg.radii) {
    BetaResult br = beta_number(mu, p0, r, cfg.dim - 2);
    BetaBoundReport rep = beta_frequency_bound_check(dom, *f, mu, p0, r, cfg.ledger.delta_in,
                                                     cfg.ledger.C, cfg.quad);
    csv.row({fmt17(r), fmt17(br.beta), fmt17(rep.lhs), fmt17(rep.drop_term),
             fmt17(rep.mass_term), fmt17(rep.rhs), fmt17(rep.ratio)});
    checks.push_back({"beta-bound[" + fmt17(r) + "]", rep.ratio <= cfg.ledger.C_dr,
                      "beta " + fmt17(br.beta) + ", ratio " + fmt17(rep.ratio)});
  }
  b.files["beta_sweep.csv"] = csv.text;
}

// --------------------------------------------------------------------------
// cover-and-pack: full covering iteration with packing statistics.

json ball_json(const CoverTree& tree, int idx) {
  const CoverBall& ball = tree.balls[size_t(idx)];
  json o;
  o["center"] = std::vector<double>(ball.center.data(), ball.center.data() + ball.center.size());
  o["radius"] = ball.radius;
  o["label"] = label_name(ball.label);
  o["level"] = ball.level;
  json kids = json::array();
  for (int c : ball.children) kids.push_back(ball_json(tree, c));
  o["children"] = kids;
  return o;
}

void run_cover_and_pack(const ExperimentConfig& cfg, ArtifactBundle& b,
                        std::vector<Check>& checks) {
  if (!(cfg.r0 > 0)) throw ConfigError("config: r0: cover-and-pack needs r0 > 0");
  if (!(cfg.r_star > 0)) throw ConfigError("config: r_star: cover-and-pack needs r_star > 0");
  GraphDomain dom = make_domain(cfg);
  FieldPtr f = make_field(cfg, dom);
  double spacing = cfg.sample_spacing > 0 ? cfg.sample_spacing : cfg.r0;
  auto samples = singular_samples(cfg, dom, *f, spacing);
  checks.push_back({"samples", !samples.empty(), std::to_string(samples.size()) + " samples"});
  auto [tree, rep] = iterate_cover(dom, f, samples, cfg.r0, cfg.r_star, cfg.ledger, cfg.quad);

  json t;
  t["dim"] = tree.dim;
  t["r0"] = tree.r0;
  t["r_star"] = tree.r_star;
  t["lambda_star"] = tree.lambda_star;
  t["rounds"] = rep.rounds;
  t["leaf_count"] = rep.leaf_count;
  t["packing_sum"] = rep.packing_sum;
  t["C_p"] = rep.C_p;
  t["count_scaling"] = rep.count_scaling;
  json roots = json::array();
  for (int r : tree.roots) roots.push_back(ball_json(tree, r));
  t["roots"] = roots;
  b.files["cover_tree.json"] = t.dump(2) + "\n";

  std::map<int, std::pair<int, double>> by_level;  // level -> (count, sum r^{d-2})
  double bad_terminal = 0.0;
  for (int leaf : tree.leaves()) {
    const CoverBall& ball = tree.balls[size_t(leaf)];
    auto& slot = by_level[ball.level];
    slot.first += 1;
    slot.second += std::pow(ball.radius, tree.dim - 2);
    if (ball.label == BallLabel::Terminal)
      bad_terminal = std::max(bad_terminal, std::abs(ball.radius - cfg.r0));
  }
  CsvWriter csv;
  csv.header({"level", "count", "packing_sum"});
  for (const auto& [level, slot] : by_level)
    csv.row({std::to_string(level), std::to_string(slot.first), fmt17(slot.second)});
  b.files["packing_summary.csv"] = csv.text;

  checks.push_back({"covers", tree.covers(samples),
                    std::to_string(rep.leaf_count) + " leaves over " +
                        std::to_string(samples.size()) + " samples"});
  checks.push_back({"fifth-ball-disjoint", tree.fifth_ball_disjoint(),
                    "lambda_star " + fmt17(tree.lambda_star) + ", rounds " +
                        std::to_string(rep.rounds)});
  checks.push_back({"terminal-radius", bad_terminal <= 1e-12 * (1 + cfg.r0),
                    "max |r - r0| = " + fmt17(bad_terminal)});
}

// --------------------------------------------------------------------------
// minkowski: Monte Carlo tube volume of the located singular set.

void run_minkowski(const ExperimentConfig& cfg, ArtifactBundle& b, std::vector<Check>& checks) {
  GraphDomain dom = make_domain(cfg);
  FieldPtr f = make_field(cfg, dom);
  double spacing = cfg.sample_spacing > 0 ? cfg.sample_spacing : 1e-3;
  auto samples = singular_samples(cfg, dom, *f, spacing);
  checks.push_back({"samples", !samples.empty(), std::to_string(samples.size()) + " samples"});
  MinkowskiEstimate est =
      minkowski_estimate(samples, cfg.mink_r, cfg.mc_probes, cfg.seed, cfg.threads);
  CsvWriter csv;
  csv.header({"r", "probes", "hits", "volume", "content", "stderr_rel"});
  csv.row({fmt17(cfg.mink_r), std::to_string(est.probes), std::to_string(est.hits),
           fmt17(est.volume), fmt17(est.content), fmt17(est.stderr_rel)});
  b.files["minkowski.csv"] = csv.text;
  checks.push_back({"stderr", est.stderr_rel < 0.05,
                    "content " + fmt17(est.content) + ", rel stderr " + fmt17(est.stderr_rel)});
}

std::string summary_line(const Check& c) {
  std::string line = c.pass ? "PASS  " : "FAIL  ";
  line += c.name;
  if (!c.detail.empty()) line += "  -- " + c.detail;
  return line + "\n";
}

uint64_t parse_u64(const std::string& s, const std::string& flag) {
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError("usage: " + flag + " expects an unsigned integer, got '" + s + "'");
  return v;
}

int parse_int(const std::string& s, const std::string& flag) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 1)
    throw ConfigError("usage: " + flag + " expects a positive integer, got '" + s + "'");
  return v;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

const char* kUsage =
    "usage: freqstrat <subcommand> --config <path> [--out <dir>] [--seed <u64>] "
    "[--threads <n>]\n"
    "  subcommands: frequency | singular | beta | cover | mink | verify | report\n";

}  // namespace

ArtifactBundle run_experiment(const ExperimentConfig& cfg) {
  ArtifactBundle b;
  std::vector<Check> checks;
  const std::string& e = cfg.experiment;
  if (e == "frequency-profile")
    run_profile_sweep(cfg, b, checks, false);
  else if (e == "monotonicity-sweep")
    run_profile_sweep(cfg, b, checks, true);
  else if (e == "rigidity")
    run_rigidity(cfg, b, checks);
  else if (e == "doubling")
    run_doubling(cfg, b, checks);
  else if (e == "singular-map")
    run_singular_map(cfg, b, checks);
  else if (e == "beta-sweep")
    run_beta_sweep(cfg, b, checks);
  else if (e == "cover-and-pack")
    run_cover_and_pack(cfg, b, checks);
  else if (e == "minkowski")
    run_minkowski(cfg, b, checks);
  else
    throw ConfigError("config: experiment: unknown experiment '" + e + "'");
  b.all_checks_pass = true;
  for (const auto& c : checks) b.all_checks_pass = b.all_checks_pass && c.pass;
  b.files["manifest.json"] = manifest_text(cfg);
  b.files["checks.json"] = checks_text(checks);
  return b;
}

void write_bundle(const ArtifactBundle& bundle, const std::string& dir) {
  fs::create_directories(dir);
  for (const auto& [name, text] : bundle.files) write_text(fs::path(dir) / name, text);
}

bool emit_report(const std::string& dir, std::string& summary_json, std::string& table_text) {
  if (!fs::is_directory(dir)) throw ConfigError("report: no artifact directory '" + dir + "'");
  bool found_manifest = false;
  std::vector<std::string> check_files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().filename() == "manifest.json") found_manifest = true;
    if (entry.path().filename() == "checks.json") check_files.push_back(entry.path().string());
  }
  if (!found_manifest) throw ConfigError("report: no manifest.json under '" + dir + "'");
  std::sort(check_files.begin(), check_files.end());

  int failures = 0;
  json results = json::array();
  std::string table;
  for (const auto& path : check_files) {
    std::ifstream in(path, std::ios::binary);
    json arr;
    try {
      in >> arr;
    } catch (const json::exception& e) {
      throw ConfigError("report: cannot parse '" + path + "': " + e.what());
    }
    if (!arr.is_array()) throw ConfigError("report: '" + path + "' is not a check list");
    for (const auto& entry : arr) {
      Check c{entry.value("name", std::string("?")), entry.value("pass", false),
              entry.value("detail", std::string())};
      if (!c.pass) ++failures;
      results.push_back(json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
      table += summary_line(c);
    }
  }
  table += std::to_string(results.size()) + " checks, " + std::to_string(failures) +
           " failures\n";
  json s;
  s["checks"] = results;
  s["total"] = results.size();
  s["failures"] = failures;
  summary_json = s.dump(2) + "\n";
  table_text = table;
  return failures == 0;
}

int run_cli(const std::vector<std::string>& args) {
  try {
    if (args.empty()) {
      std::fputs(kUsage, stderr);
      return 2;
    }
    const std::string& sub = args[0];
    static const std::set<std::string> kSubs = {"frequency", "singular", "beta", "cover",
                                                "mink",      "verify",   "report"};
    if (!kSubs.count(sub)) throw ConfigError("usage: unknown subcommand '" + sub + "'");

    std::string config_path, out_flag;
    std::optional<uint64_t> seed_flag;
    std::optional<int> threads_flag;
    for (size_t i = 1; i < args.size(); ++i) {
      const std::string& a = args[i];
      auto next = [&]() -> const std::string& {
        if (i + 1 >= args.size()) throw ConfigError("usage: " + a + " needs a value");
        return args[++i];
      };
      if (a == "--config")
        config_path = next();
      else if (a == "--out")
        out_flag = next();
      else if (a == "--seed")
        seed_flag = parse_u64(next(), "--seed");
      else if (a == "--threads")
        threads_flag = parse_int(next(), "--threads");
      else
        throw ConfigError("usage: unknown flag '" + a + "'");
    }

    if (sub == "report") {
      std::string dir = out_flag.empty() ? "out" : out_flag;
      std::string summary, table;
      bool ok = emit_report(dir, summary, table);
      write_text(fs::path(dir) / "summary.json", summary);
      write_text(fs::path(dir) / "table.txt", table);
      std::fputs(table.c_str(), stdout);
      return ok ? 0 : 1;
    }

    if (config_path.empty()) throw ConfigError("usage: --config <path> is required");
    ExperimentConfig cfg = load_config(config_path);

    static const std::map<std::string, std::set<std::string>> kAllowed = {
        {"frequency", {"frequency-profile", "monotonicity-sweep", "rigidity", "doubling"}},
        {"singular", {"singular-map"}},
        {"beta", {"beta-sweep"}},
        {"cover", {"cover-and-pack"}},
        {"mink", {"minkowski"}},
    };
    if (sub != "verify" && !kAllowed.at(sub).count(cfg.experiment))
      throw ConfigError("usage: subcommand '" + sub + "' cannot run experiment '" +
                        cfg.experiment + "'");

    if (seed_flag) cfg.seed = *seed_flag;
    int threads = cfg.threads;
    if (const char* env = std::getenv("FREQSTRAT_THREADS"); env && *env)
      threads = parse_int(env, "FREQSTRAT_THREADS");
    if (threads_flag) threads = *threads_flag;
    cfg.threads = threads;

    ArtifactBundle bundle = run_experiment(cfg);
    // Record the effective thread count on disk only: the bundle itself stays
    // identical across thread counts.
    json manifest = json::parse(bundle.files.at("manifest.json"));
    manifest["threads"] = threads;
    bundle.files["manifest.json"] = manifest.dump(2) + "\n";

    std::string dir = out_flag.empty() ? cfg.out_dir : out_flag;
    write_bundle(bundle, dir);
    std::printf("%s: %s -> %s\n", cfg.experiment.c_str(),
                bundle.all_checks_pass ? "all checks pass" : "CHECK FAILURES", dir.c_str());

    if (sub == "verify") {
      std::string summary, table;
      bool ok = emit_report(dir, summary, table);
      write_text(fs::path(dir) / "summary.json", summary);
      write_text(fs::path(dir) / "table.txt", table);
      std::fputs(table.c_str(), stdout);
      return ok && bundle.all_checks_pass ? 0 : 1;
    }
    return bundle.all_checks_pass ? 0 : 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace freqstrat
