#pragma once

#include <string>
#include <vector>

#include "fdeopt/admm.hpp"
#include "fdeopt/problem.hpp"

namespace fdeopt {

/// Fully resolved run configuration: problem + solver parameters plus
/// orchestration knobs. Defaults are the baseline experiment parameter set.
struct RunConfig {
  ProblemSpec spec;            // alpha 0.7, beta 1.3/1.3, gamma 1e-4, n 8
  AdmmConfig admm;             // delta 0.4, rho 1.618, tol 1e-4
  std::string out_dir;         // empty: no file output (env FDEOPT_OUT_DIR default)
  std::string format = "csv";  // csv | plain
  std::vector<double> delta_sweep;
  std::vector<int> n_sweep;
  std::vector<double> alpha_sweep;
  unsigned seed = 0;
  bool dump_solution = false;
  int workers = 1;
};

/// Documented config-file keys (flat `key = value` lines, `#` comments).
const std::vector<std::string>& config_keys();

/// Parses a config file into `cfg`. Unknown keys and malformed values throw
/// std::invalid_argument naming the key (and listing valid keys).
void parse_config_file(const std::string& path, RunConfig& cfg);

/// Applies a single `key=value` assignment (same key set as the file).
void apply_config_entry(const std::string& key, const std::string& value, RunConfig& cfg);

/// Parses `inf`/`-inf`/numbers; used by bound-valued keys and flags.
double parse_bound(const std::string& text);

}  // namespace fdeopt
