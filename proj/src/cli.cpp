#include "extreg/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>

#include "extreg/errors.hpp"
#include "extreg/inference.hpp"
#include "extreg/io.hpp"
#include "extreg/rng.hpp"
#include "extreg/simulation.hpp"

namespace extreg {

namespace {

using nlohmann::json;

std::string term_name(Eigen::Index j, bool has_intercept,
                      const std::vector<std::string>& predictor_names) {
  if (has_intercept && j == 0) return "intercept";
  const Eigen::Index k = has_intercept ? j - 1 : j;
  if (static_cast<std::size_t>(k) < predictor_names.size())
    return predictor_names[static_cast<std::size_t>(k)];
  return "x" + std::to_string(k + 1);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream file(path);
  if (!file) fail(ErrorCode::io_error, "cannot write " + path.string());
  return file;
}

void write_json(const std::filesystem::path& path, const json& value) {
  auto file = open_out(path);
  file << value.dump(2) << '\n';
}

const char* scope_name(NormScope scope) {
  return scope == NormScope::slopes_only ? "slopes" : "full";
}

struct Artifacts {
  std::filesystem::path dir;
  OutputFormat format;

  std::filesystem::path file(const std::string& stem) const {
    return dir / (stem + (format == OutputFormat::csv ? ".csv" : ".json"));
  }
};

void write_decisions(const Artifacts& artifacts, const ExtensionResult& result) {
  if (artifacts.format == OutputFormat::csv) {
    auto file = open_out(artifacts.file("decisions"));
    file << "id,studentized,rel_change,pass_residual,pass_change,degenerate,included\n";
    for (const CandidateDecision& d : result.decisions)
      file << d.id << ',' << format_double(d.studentized) << ','
           << format_double(d.rel_change) << ',' << int(d.pass_residual) << ','
           << int(d.pass_change) << ',' << int(d.degenerate) << ','
           << int(d.included()) << '\n';
    return;
  }
  json rows = json::array();
  for (const CandidateDecision& d : result.decisions)
    rows.push_back({{"id", d.id},
                    {"studentized", d.studentized},
                    {"rel_change", d.rel_change},
                    {"pass_residual", d.pass_residual},
                    {"pass_change", d.pass_change},
                    {"degenerate", d.degenerate},
                    {"included", d.included()}});
  write_json(artifacts.file("decisions"), rows);
}

void write_coefficients(const Artifacts& artifacts, const OlsFit& base,
                        const OlsFit& extended,
                        const std::vector<std::string>& predictor_names,
                        const Eigen::VectorXd* se_bootstrap) {
  const Eigen::VectorXd se_naive = naive_standard_errors(extended);
  if (artifacts.format == OutputFormat::csv) {
    auto file = open_out(artifacts.file("coefficients"));
    file << "term,base,extended,se_naive";
    if (se_bootstrap) file << ",se_bootstrap";
    file << '\n';
    for (Eigen::Index j = 0; j < base.coefficients.size(); ++j) {
      file << term_name(j, base.has_intercept, predictor_names) << ','
           << format_double(base.coefficients(j)) << ','
           << format_double(extended.coefficients(j)) << ','
           << format_double(se_naive(j));
      if (se_bootstrap) file << ',' << format_double((*se_bootstrap)(j));
      file << '\n';
    }
    return;
  }
  json rows = json::array();
  for (Eigen::Index j = 0; j < base.coefficients.size(); ++j) {
    json row = {{"term", term_name(j, base.has_intercept, predictor_names)},
                {"base", base.coefficients(j)},
                {"extended", extended.coefficients(j)},
                {"se_naive", se_naive(j)}};
    if (se_bootstrap) row["se_bootstrap"] = (*se_bootstrap)(j);
    rows.push_back(row);
  }
  write_json(artifacts.file("coefficients"), rows);
}

void write_summary(const Artifacts& artifacts,
                   const std::vector<std::pair<std::string, std::string>>& entries) {
  if (artifacts.format == OutputFormat::csv) {
    auto file = open_out(artifacts.file("summary"));
    file << "key,value\n";
    for (const auto& [key, value] : entries) file << key << ',' << value << '\n';
    return;
  }
  json object;
  for (const auto& [key, value] : entries) object[key] = value;
  write_json(artifacts.file("summary"), object);
}

void print_fit_table(std::ostream& log, const OlsFit& base, const OlsFit& extended,
                     const std::vector<std::string>& predictor_names,
                     const Eigen::VectorXd* se_bootstrap) {
  const Eigen::VectorXd se_naive = naive_standard_errors(extended);
  log << std::left << std::setw(16) << "term" << std::right << std::setw(12) << "base"
      << std::setw(12) << "extended" << std::setw(12) << "se_naive";
  if (se_bootstrap) log << std::setw(12) << "se_boot";
  log << '\n' << std::setprecision(4) << std::fixed;
  for (Eigen::Index j = 0; j < base.coefficients.size(); ++j) {
    log << std::left << std::setw(16) << term_name(j, base.has_intercept, predictor_names)
        << std::right << std::setw(12) << base.coefficients(j) << std::setw(12)
        << extended.coefficients(j) << std::setw(12) << se_naive(j);
    if (se_bootstrap) log << std::setw(12) << (*se_bootstrap)(j);
    log << '\n';
  }
  log.unsetf(std::ios::fixed);
  log << std::setprecision(6);
}

ExtensionConfig make_extension_config(const RunConfig& run) {
  ExtensionConfig config;
  config.alpha_st = run.alpha_st;
  config.alpha_ch = run.alpha_ch;
  config.norm_scope = run.norm_scope;
  return config;
}

CvPlan make_cv_plan(const RunConfig& run) {
  CvPlan plan;
  plan.k = run.k;
  plan.reduced_grid = !run.full_grid;
  plan.seed = derive_seed(run.seed, 1);
  if (run.full_grid) {
    for (double st : run.grid)
      for (double ch : run.grid) plan.grid.emplace_back(st, ch);
  } else {
    for (double a : run.grid) plan.grid.emplace_back(a, a);
  }
  return plan;
}

std::vector<std::pair<std::string, std::string>> base_summary(
    const RunConfig& run, const ExtensionConfig& config) {
  const char* command = run.command == Command::extend      ? "extend"
                        : run.command == Command::cv        ? "cv"
                        : run.command == Command::bootstrap ? "bootstrap"
                        : run.command == Command::simulate  ? "simulate"
                                                            : "robustify";
  return {{"command", command},
          {"alpha_st", format_double(config.alpha_st)},
          {"alpha_ch", format_double(config.alpha_ch)},
          {"norm_scope", scope_name(config.norm_scope)},
          {"seed", std::to_string(run.seed)}};
}

int run_extend_like(const RunConfig& run, std::ostream& log) {
  const Artifacts artifacts{run.out_dir, run.format};
  const LoadedCsv prob = load_csv_named(run.prob_path, run.response_column);

  LoadedCsv nonprob;
  const bool self_screen = run.command == Command::robustify;
  if (self_screen) {
    nonprob = prob;
  } else {
    nonprob = load_csv_named(run.nonprob_path, run.response_column, false);
  }

  ExtensionConfig config = make_extension_config(run);
  if (run.use_cv) {
    const AlphaPair selected = select_alphas(prob.data, nonprob.data,
                                             make_cv_plan(run), run.norm_scope);
    config.alpha_st = selected.first;
    config.alpha_ch = selected.second;
    log << "cross-validation selected alpha_st = " << config.alpha_st
        << ", alpha_ch = " << config.alpha_ch << '\n';
  }

  const ExtensionResult result = extend_sample(prob.data, nonprob.data, config);
  write_decisions(artifacts, result);

  auto summary = base_summary(run, config);
  summary.emplace_back("t_s", format_double(result.t_s));
  summary.emplace_back("t_c", format_double(result.t_c));
  summary.emplace_back("n_prob", std::to_string(prob.data.n()));
  summary.emplace_back("n_nonprob", std::to_string(nonprob.data.n()));
  summary.emplace_back("n_included", std::to_string(result.included_ids.size()));

  if (self_screen) {
    const Dataset reduced = select_rows(prob.data, result.included_ids);
    const OlsFit reduced_fit = fit_ols(reduced);
    write_dataset_csv((artifacts.dir / "reduced.csv").string(), reduced,
                      prob.response_name, prob.predictor_names);
    write_coefficients(artifacts, result.base_fit, reduced_fit, prob.predictor_names,
                       nullptr);
    summary.emplace_back("reduced_size", std::to_string(reduced.n()));
    write_summary(artifacts, summary);
    log << "kept " << reduced.n() << " of " << prob.data.n() << " observations\n";
    print_fit_table(log, result.base_fit, reduced_fit, prob.predictor_names, nullptr);
    return 0;
  }

  summary.emplace_back("extended_size", std::to_string(result.extended_fit.n()));
  if (run.command == Command::bootstrap) {
    BootstrapSpec boot;
    boot.n_boot = run.n_boot;
    boot.seed = derive_seed(run.seed, 2);
    const Eigen::VectorXd se_boot =
        bootstrap_se(prob.data, nonprob.data, config, boot);
    summary.emplace_back("n_boot", std::to_string(run.n_boot));
    write_coefficients(artifacts, result.base_fit, result.extended_fit,
                       prob.predictor_names, &se_boot);
    write_summary(artifacts, summary);
    log << "included " << result.included_ids.size() << " of " << nonprob.data.n()
        << " candidates\n";
    print_fit_table(log, result.base_fit, result.extended_fit, prob.predictor_names,
                    &se_boot);
    return 0;
  }

  write_coefficients(artifacts, result.base_fit, result.extended_fit,
                     prob.predictor_names, nullptr);
  write_summary(artifacts, summary);
  log << "included " << result.included_ids.size() << " of " << nonprob.data.n()
      << " candidates\n";
  print_fit_table(log, result.base_fit, result.extended_fit, prob.predictor_names,
                  nullptr);
  return 0;
}

int run_cv(const RunConfig& run, std::ostream& log) {
  const Artifacts artifacts{run.out_dir, run.format};
  const LoadedCsv prob = load_csv_named(run.prob_path, run.response_column);
  const LoadedCsv nonprob =
      load_csv_named(run.nonprob_path, run.response_column, false);
  const CvPlan plan = make_cv_plan(run);

  const auto folds = kfold_split(prob.data.n(), plan.k, plan.seed);
  struct ScoreRow {
    double alpha_st, alpha_ch, score;
    bool valid;
  };
  std::vector<ScoreRow> rows;
  for (const AlphaPair& alphas : plan.grid) {
    ExtensionConfig config;
    config.alpha_st = alphas.first;
    config.alpha_ch = alphas.second;
    config.norm_scope = run.norm_scope;
    ScoreRow row{alphas.first, alphas.second, 0.0, true};
    try {
      row.score = cv_score(prob.data, nonprob.data, config, folds);
    } catch (const Error&) {
      row.valid = false;
    }
    rows.push_back(row);
  }
  const AlphaPair selected =
      select_alphas(prob.data, nonprob.data, plan, run.norm_scope);

  if (run.format == OutputFormat::csv) {
    auto file = open_out(artifacts.file("cv_scores"));
    file << "alpha_st,alpha_ch,score,valid,selected\n";
    for (const ScoreRow& row : rows)
      file << format_double(row.alpha_st) << ',' << format_double(row.alpha_ch) << ','
           << (row.valid ? format_double(row.score) : "") << ',' << int(row.valid)
           << ','
           << int(row.valid && row.alpha_st == selected.first &&
                  row.alpha_ch == selected.second)
           << '\n';
  } else {
    json out = json::array();
    for (const ScoreRow& row : rows) {
      json item = {{"alpha_st", row.alpha_st},
                   {"alpha_ch", row.alpha_ch},
                   {"valid", row.valid},
                   {"selected", row.valid && row.alpha_st == selected.first &&
                                    row.alpha_ch == selected.second}};
      if (row.valid) item["score"] = row.score;
      out.push_back(item);
    }
    write_json(artifacts.file("cv_scores"), out);
  }

  ExtensionConfig config = make_extension_config(run);
  config.alpha_st = selected.first;
  config.alpha_ch = selected.second;
  auto summary = base_summary(run, config);
  summary.emplace_back("k", std::to_string(plan.k));
  summary.emplace_back("grid_size", std::to_string(plan.grid.size()));
  write_summary(artifacts, summary);
  log << "selected alpha_st = " << selected.first << ", alpha_ch = " << selected.second
      << '\n';
  return 0;
}

void append_vector_metrics(std::vector<std::pair<std::string, double>>& rows,
                           const std::string& prefix, const Eigen::VectorXd& values) {
  for (Eigen::Index j = 0; j < values.size(); ++j)
    rows.emplace_back(prefix + "_" + std::to_string(j), values(j));
}

int run_simulate(const RunConfig& run, std::ostream& log) {
  const Artifacts artifacts{run.out_dir, run.format};
  ScenarioSpec scenario = load_scenario(run.scenario_path);
  if (run.seed_set) scenario.seed = run.seed;

  const ExtensionConfig config = make_extension_config(run);
  std::optional<CvPlan> plan;
  if (run.use_cv) plan = make_cv_plan(run);
  std::optional<BootstrapSpec> bootstrap;
  if (run.n_boot > 0) {
    BootstrapSpec boot;
    boot.n_boot = run.n_boot;
    bootstrap = boot;
  }

  const StudyReport report =
      run_study(scenario, config, run.n_datasets, run.use_cv, plan, bootstrap);

  // One row per replication per metric.
  if (run.format == OutputFormat::csv) {
    auto file = open_out(artifacts.file("replications"));
    file << "replication,metric,value\n";
    for (const ReplicationRecord& rec : report.per_replication) {
      if (rec.failed) {
        file << rec.replication << ",failed,1\n";
        continue;
      }
      std::vector<std::pair<std::string, double>> rows = {
          {"mse_pse", rec.mse_pse},
          {"mse_exte", rec.mse_exte},
          {"mse_r", rec.mse_r},
          {"hits", rec.hits},
          {"false_positives", rec.false_positives},
          {"extended_size", static_cast<double>(rec.extended_size)},
          {"alpha_st", rec.alpha_st},
          {"alpha_ch", rec.alpha_ch}};
      append_vector_metrics(rows, "beta_pse", rec.beta_pse);
      append_vector_metrics(rows, "beta_exte", rec.beta_exte);
      append_vector_metrics(rows, "se_naive", rec.se_naive);
      append_vector_metrics(rows, "se_prob", rec.se_prob);
      append_vector_metrics(rows, "se_bootstrap", rec.se_bootstrap);
      for (const auto& [metric, value] : rows)
        file << rec.replication << ',' << metric << ',' << format_double(value) << '\n';
    }
  } else {
    json out = json::array();
    for (const ReplicationRecord& rec : report.per_replication) {
      json item = {{"replication", rec.replication}, {"failed", rec.failed}};
      if (rec.failed) {
        item["error_code"] = rec.error_code;
      } else {
        item["mse_pse"] = rec.mse_pse;
        item["mse_exte"] = rec.mse_exte;
        item["mse_r"] = rec.mse_r;
        item["hits"] = rec.hits;
        item["false_positives"] = rec.false_positives;
        item["extended_size"] = rec.extended_size;
        item["alpha_st"] = rec.alpha_st;
        item["alpha_ch"] = rec.alpha_ch;
        item["beta_pse"] = std::vector<double>(rec.beta_pse.begin(), rec.beta_pse.end());
        item["beta_exte"] =
            std::vector<double>(rec.beta_exte.begin(), rec.beta_exte.end());
        item["se_naive"] =
            std::vector<double>(rec.se_naive.begin(), rec.se_naive.end());
        item["se_prob"] = std::vector<double>(rec.se_prob.begin(), rec.se_prob.end());
        if (rec.se_bootstrap.size() > 0)
          item["se_bootstrap"] =
              std::vector<double>(rec.se_bootstrap.begin(), rec.se_bootstrap.end());
      }
      out.push_back(item);
    }
    write_json(artifacts.file("replications"), out);
  }

  const std::vector<std::pair<std::string, MetricSummary>> aggregates = {
      {"mse_pse", report.mse_pse},
      {"mse_exte", report.mse_exte},
      {"mse_r", report.mse_r},
      {"hits", report.hits},
      {"false_positives", report.false_positives},
      {"extended_size", report.extended_size},
      {"alpha_st", report.alpha_st},
      {"alpha_ch", report.alpha_ch}};
  if (run.format == OutputFormat::csv) {
    auto file = open_out(artifacts.file("aggregates"));
    file << "metric,mean,sd,count\n";
    for (const auto& [name, summary] : aggregates)
      file << name << ',' << format_double(summary.mean) << ','
           << format_double(summary.sd) << ',' << summary.count << '\n';
    file << "failures," << report.failures << ",0," << report.per_replication.size()
         << '\n';
  } else {
    json out;
    for (const auto& [name, summary] : aggregates)
      out[name] = {{"mean", summary.mean}, {"sd", summary.sd}, {"count", summary.count}};
    out["failures"] = report.failures;
    write_json(artifacts.file("aggregates"), out);
  }

  // Standard-error table: per-coefficient rows for each method.
  {
    const std::vector<std::pair<std::string, const Eigen::VectorXd*>> methods = {
        {"prob_sample", &report.mean_se_prob},
        {"naive", &report.mean_se_naive},
        {"actual", &report.actual_se},
        {"bootstrap", &report.mean_se_bootstrap}};
    if (run.format == OutputFormat::csv) {
      auto file = open_out(artifacts.file("se_table"));
      file << "method,term,value\n";
      for (const auto& [method, values] : methods)
        for (Eigen::Index j = 0; j < values->size(); ++j)
          file << method << ",b" << j << ',' << format_double((*values)(j)) << '\n';
    } else {
      json out;
      for (const auto& [method, values] : methods)
        if (values->size() > 0)
          out[method] = std::vector<double>(values->begin(), values->end());
      write_json(artifacts.file("se_table"), out);
    }
  }

  auto summary = base_summary(run, config);
  summary.emplace_back("scenario", run.scenario_path);
  summary.emplace_back("n_datasets", std::to_string(run.n_datasets));
  summary.emplace_back("use_cv", run.use_cv ? "1" : "0");
  summary.emplace_back("n_boot", std::to_string(run.n_boot));
  summary.emplace_back("failures", std::to_string(report.failures));
  write_summary(artifacts, summary);

  log << std::setprecision(4);
  log << "mse_pse mean = " << report.mse_pse.mean
      << ", mse_exte mean = " << report.mse_exte.mean
      << ", hits mean = " << report.hits.mean
      << ", false_positives mean = " << report.false_positives.mean << '\n';
  return 0;
}

}  // namespace

int run_command(const RunConfig& run, std::ostream& log, std::ostream& err) {
  try {
    if (run.out_dir.empty())
      fail(ErrorCode::usage_error, "an output directory is required");
    std::filesystem::create_directories(run.out_dir);
    switch (run.command) {
      case Command::extend:
      case Command::bootstrap:
      case Command::robustify:
        return run_extend_like(run, log);
      case Command::cv:
        return run_cv(run, log);
      case Command::simulate:
        return run_simulate(run, log);
    }
    fail(ErrorCode::usage_error, "unknown command");
  } catch (const Error& e) {
    err << "error code=" << to_string(e.code()) << " message=\"" << e.what() << "\"\n";
    return e.code() == ErrorCode::usage_error ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error code=internal message=\"" << e.what() << "\"\n";
    return 1;
  }
}

}  // namespace extreg
