#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freqstrat/cover.hpp"
#include "freqstrat/domain.hpp"
#include "freqstrat/field.hpp"

namespace freqstrat {

// Usage/config errors exit with code 2; check failures with code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;  // frequency-profile | monotonicity-sweep | rigidity |
                           // doubling | singular-map | beta-sweep | cover-and-pack | minkowski
  int dim = 2;
  double R = 0.25;
  std::string phi_family = "flat";          // flat | power
  std::vector<double> phi_params;           // power: {c, p}
  std::string theta_family = "zero";        // zero | power | log
  std::vector<double> theta_params;         // power: {c, a}; log: {c}
  bool relax_scale_checks = false;
  std::string field_kind = "closed";        // closed | grid
  std::string field_name = "halfspace_poly";
  std::vector<double> field_params;
  int grid_resolution = 256;
  double grid_box_half_width = 1.0, grid_box_height = 1.0;
  std::vector<double> radii;
  std::vector<std::vector<double>> centers;
  double r0 = 0.0, r_star = 0.0;
  std::uint64_t mc_probes = 1000000;
  double mink_r = 0.015625;
  int sample_count = 100;
  double sample_spacing = 0.0;  // 0: derived from r0 where needed
  QuadSpec quad;            // effective quadrature (default by dim, overridable)
  bool light_quad = false;
  ConstantLedger ledger;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;

  std::string raw_json;     // for the manifest hash
};

// Parses and validates; throws ConfigError with a field-path diagnostic.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

GraphDomain make_domain(const ExperimentConfig& cfg);
DiniModulus make_modulus(const ExperimentConfig& cfg);
FieldPtr make_field(const ExperimentConfig& cfg, const GraphDomain& domain);

}  // namespace freqstrat
