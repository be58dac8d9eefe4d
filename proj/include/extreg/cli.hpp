#ifndef EXTREG_CLI_HPP
#define EXTREG_CLI_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "extreg/extension.hpp"
#include "extreg/tuning.hpp"

namespace extreg {

enum class Command { extend, cv, bootstrap, simulate, robustify };
enum class OutputFormat { csv, json };

// One batch invocation. Everything random flows from `seed`; no workflow
// reads ambient entropy.
struct RunConfig {
  Command command = Command::extend;
  std::string prob_path;
  std::string nonprob_path;
  std::string scenario_path;
  std::string response_column = "y";
  double alpha_st = 0.05;
  double alpha_ch = 0.05;
  bool use_cv = false;  // select alphas by cross-validation first
  NormScope norm_scope = NormScope::full_coefficients;
  int k = 5;
  std::vector<double> grid = {0.3, 0.2, 0.1, 0.05};
  bool full_grid = false;  // cartesian square of `grid` instead of pairs
  int n_boot = 100;    // simulate: 0 skips the per-replication bootstrap
  int n_datasets = 100;
  std::uint64_t seed = 1;
  bool seed_set = true;  // simulate falls back to the scenario-file seed when false
  std::string out_dir;
  OutputFormat format = OutputFormat::csv;
};

// Executes the workflow, writes its artifacts under out_dir and a short
// human summary to `log`. Returns the process exit status; failures print a
// machine-readable `error code=... message=...` line to `err`.
int run_command(const RunConfig& config, std::ostream& log, std::ostream& err);

}  // namespace extreg

#endif
