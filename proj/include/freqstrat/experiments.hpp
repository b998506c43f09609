#pragma once

#include <map>
#include <string>

#include "freqstrat/config.hpp"

namespace freqstrat {

// Artifact bundle: file name -> content. run_experiment computes everything
// in memory; the CLI (or tests) decide where to put it. Every bundle carries
// manifest.json (config hash, seed, ledger) and checks.json (named boolean
// checks with context).
struct ArtifactBundle {
  std::map<std::string, std::string> files;
  bool all_checks_pass = true;
};

ArtifactBundle run_experiment(const ExperimentConfig& cfg);

// Writes a bundle under dir (created if needed).
void write_bundle(const ArtifactBundle& bundle, const std::string& dir);

// Aggregates checks.json files under dir into summary.json + table.txt;
// returns false (and exit status 1 in the CLI) iff any check failed.
// Throws ConfigError if no manifest is found.
bool emit_report(const std::string& dir, std::string& summary_json, std::string& table_text);

// The CLI entry (same logic as the installed binary): subcommand + flags,
// returns the process exit code (0 pass, 1 check failure, 2 usage/config).
int run_cli(const std::vector<std::string>& args);

}  // namespace freqstrat
