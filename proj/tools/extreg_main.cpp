#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "extreg/cli.hpp"

namespace {

void add_norm_option(CLI::App* cmd, std::string& norm) {
  cmd->add_option("--norm", norm, "coefficient norm scope: full or slopes")
      ->check(CLI::IsMember({"full", "slopes"}))
      ->default_val("full");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"screened extension of a probability sample by non-probability data"};
  app.require_subcommand(1);

  extreg::RunConfig run;
  std::string norm = "full";
  std::string format = "csv";
  bool seed_given = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", run.out_dir, "output directory")->required();
    cmd->add_option_function<std::uint64_t>(
           "--seed", [&](std::uint64_t s) { run.seed = s; seed_given = true; },
           "seed for every random draw of the run");
    cmd->add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->default_val("csv");
  };
  auto add_sample_inputs = [&](CLI::App* cmd, bool with_nonprob) {
    cmd->add_option("--prob", run.prob_path, "probability-sample CSV")->required();
    if (with_nonprob)
      cmd->add_option("--nonprob", run.nonprob_path, "non-probability-sample CSV")
          ->required();
    cmd->add_option("--response", run.response_column, "response column name")
        ->required();
  };
  auto add_alphas = [&](CLI::App* cmd) {
    auto* st = cmd->add_option("--alpha-st", run.alpha_st,
                               "level for the studentized-residual gate");
    auto* ch = cmd->add_option("--alpha-ch", run.alpha_ch,
                               "level for the parameter-change gate");
    auto* cv = cmd->add_flag("--cv", run.use_cv,
                             "choose both levels by k-fold cross-validation");
    st->excludes(cv);
    ch->excludes(cv);
    add_norm_option(cmd, norm);
  };
  auto add_cv_controls = [&](CLI::App* cmd) {
    cmd->add_option("--k", run.k, "cross-validation folds")->default_val(5);
    cmd->add_option("--grid", run.grid, "alpha grid values")->delimiter(',');
    cmd->add_flag("--full-grid", run.full_grid,
                  "use the cartesian square of the grid instead of paired values");
  };

  auto* extend = app.add_subcommand("extend", "screen and fit the extended sample");
  add_sample_inputs(extend, true);
  add_alphas(extend);
  add_cv_controls(extend);
  add_common(extend);

  auto* cv = app.add_subcommand("cv", "cross-validate the screening levels");
  add_sample_inputs(cv, true);
  add_norm_option(cv, norm);
  add_cv_controls(cv);
  add_common(cv);

  auto* bootstrap =
      app.add_subcommand("bootstrap", "extend and bootstrap the standard errors");
  add_sample_inputs(bootstrap, true);
  add_alphas(bootstrap);
  add_cv_controls(bootstrap);
  bootstrap->add_option("--n-boot", run.n_boot, "bootstrap replications")
      ->default_val(100);
  add_common(bootstrap);

  auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo study");
  simulate->add_option("--scenario", run.scenario_path, "scenario config file")
      ->required();
  simulate->add_option("--n-datasets", run.n_datasets, "replications")->default_val(100);
  simulate->add_option("--n-boot", run.n_boot,
                       "per-replication bootstrap size (0 = skip)")
      ->default_val(0);
  add_alphas(simulate);
  add_cv_controls(simulate);
  add_common(simulate);

  auto* robustify =
      app.add_subcommand("robustify", "screen the probability sample against itself");
  add_sample_inputs(robustify, false);
  add_alphas(robustify);
  add_cv_controls(robustify);
  add_common(robustify);

  CLI11_PARSE(app, argc, argv);

  if (extend->parsed()) run.command = extreg::Command::extend;
  if (cv->parsed()) run.command = extreg::Command::cv;
  if (bootstrap->parsed()) run.command = extreg::Command::bootstrap;
  if (simulate->parsed()) run.command = extreg::Command::simulate;
  if (robustify->parsed()) run.command = extreg::Command::robustify;
  run.norm_scope = (norm == "slopes") ? extreg::NormScope::slopes_only
                                      : extreg::NormScope::full_coefficients;
  run.format = (format == "json") ? extreg::OutputFormat::json
                                  : extreg::OutputFormat::csv;
  run.seed_set = seed_given || run.command != extreg::Command::simulate;

  return extreg::run_command(run, std::cout, std::cerr);
}
