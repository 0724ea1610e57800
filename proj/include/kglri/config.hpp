#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kglri/harness.hpp"

namespace kglri {

// Config or CLI usage problem; the CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fully resolved and validated run configuration. Values come from, in
// increasing precedence: built-in defaults, the config file, environment
// variables (KGLRI_<SECTION>_<KEY>), then --set section.key=value overrides.
// Unknown keys anywhere are hard errors.
struct RunConfig {
  StudySpec study;

  // single-run settings (cmd run)
  Method run_method = Method::Lri3;
  double run_h = 1.0 / 256.0;
  int sample_every = 0;
  bool diag_norms = false;
  bool diag_energy = false;

  // output
  std::string out_dir = "out";
  bool write_state_file = true;
  bool write_plot_data = true;
  bool quiet = false;

  std::string echo_json() const;  // resolved values, for report embedding
};

// path empty: defaults plus overrides only. overrides entries look like
// "section.key=value". Environment variables are consulted for every known
// key. Throws ConfigError with the offending file line or key.
RunConfig parse_config(const std::string& path,
                       const std::vector<std::string>& overrides = {});

}  // namespace kglri
