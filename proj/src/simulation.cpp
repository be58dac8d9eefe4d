#include "extreg/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "extreg/errors.hpp"
#include "extreg/rng.hpp"

namespace extreg {

namespace {

// Constant-correlation matrix (1 - rho) I + rho J is positive definite iff
// rho lies in (-1/(p-1), 1); its Cholesky factor drives the generator.
void check_correlation(Eigen::Index p, double rho) {
  if (p >= 2 && !(rho > -1.0 / static_cast<double>(p - 1) && rho < 1.0))
    fail(ErrorCode::domain_error,
         "pairwise correlation " + std::to_string(rho) +
             " does not give a positive-definite matrix for p = " + std::to_string(p));
}

Eigen::VectorXd draw_normals(Eigen::Index count, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(count);
  for (Eigen::Index i = 0; i < count; ++i) z(i) = normal(rng);
  return z;
}

Dataset linear_responses(const Eigen::MatrixXd& predictors, const Eigen::VectorXd& beta,
                         double noise_var, std::mt19937_64& rng) {
  Dataset data;
  data.has_intercept = true;
  data.predictors = predictors;
  data.responses = Eigen::VectorXd::Constant(predictors.rows(), beta(0));
  data.responses += predictors * beta.tail(beta.size() - 1);
  if (noise_var > 0.0)
    data.responses += std::sqrt(noise_var) * draw_normals(predictors.rows(), rng);
  return data;
}

}  // namespace

void validate(const ScenarioSpec& spec) {
  if (spec.p < 1) fail(ErrorCode::domain_error, "scenario needs at least one predictor");
  if (spec.n < spec.p + 2)
    fail(ErrorCode::domain_error,
         "probability sample size " + std::to_string(spec.n) +
             " is too small for p = " + std::to_string(spec.p));
  if (spec.n1 < 0 || spec.n2 < 0)
    fail(ErrorCode::domain_error, "stratum sizes must be non-negative");
  if (spec.mu0.size() != spec.p)
    fail(ErrorCode::dimension_error, "mu0 must have length p");
  if (spec.beta0.size() != spec.p + 1)
    fail(ErrorCode::dimension_error, "beta0 must have length p+1 (intercept first)");
  check_correlation(spec.p, spec.pairwise_corr);
  if (spec.noise_var_prob < 0.0 || spec.noise_var_target_np < 0.0 ||
      spec.noise_var_polluted < 0.0)
    fail(ErrorCode::domain_error, "noise variances must be non-negative");
  if (spec.pollution_mode == PollutionMode::fixed && spec.n2 > 0) {
    if (spec.mu_shift.size() != spec.p)
      fail(ErrorCode::dimension_error, "mu_shift must have length p");
    if (spec.beta_polluted.size() != spec.p + 1)
      fail(ErrorCode::dimension_error, "beta_polluted must have length p+1");
  }
  if (spec.pollution_mode == PollutionMode::random &&
      (spec.sigma_loc < 0.0 || spec.sigma_par < 0.0))
    fail(ErrorCode::domain_error, "sigma_loc and sigma_par must be non-negative");
}

Eigen::MatrixXd gen_correlated_normals(Eigen::Index count, const Eigen::VectorXd& mu,
                                       double pairwise_corr, std::mt19937_64& rng) {
  const Eigen::Index p = mu.size();
  check_correlation(p, pairwise_corr);
  Eigen::MatrixXd rows(count, p);
  if (count == 0) return rows;

  Eigen::MatrixXd corr = Eigen::MatrixXd::Constant(p, p, pairwise_corr);
  corr.diagonal().setOnes();
  Eigen::LLT<Eigen::MatrixXd> llt(corr);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::domain_error, "correlation matrix is not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();

  for (Eigen::Index i = 0; i < count; ++i)
    rows.row(i) = (mu + chol * draw_normals(p, rng)).transpose();
  return rows;
}

GeneratedScenario gen_scenario(const ScenarioSpec& spec) {
  validate(spec);
  auto rng = make_stream(spec.seed, 0);

  GeneratedScenario out;
  out.prob_sample = linear_responses(
      gen_correlated_normals(spec.n, spec.mu0, spec.pairwise_corr, rng), spec.beta0,
      spec.noise_var_prob, rng);

  const Dataset target_stratum = linear_responses(
      gen_correlated_normals(spec.n1, spec.mu0, spec.pairwise_corr, rng), spec.beta0,
      spec.noise_var_target_np, rng);

  Eigen::VectorXd mu_polluted;
  Eigen::VectorXd beta_polluted;
  if (spec.pollution_mode == PollutionMode::fixed) {
    mu_polluted = spec.n2 > 0 ? (spec.mu0 + spec.mu_shift).eval() : spec.mu0;
    beta_polluted = spec.n2 > 0 ? spec.beta_polluted : spec.beta0;
  } else {
    // Drawn once per dataset, applied to every polluted row.
    mu_polluted = spec.mu0 + spec.sigma_loc * draw_normals(spec.p, rng);
    beta_polluted = spec.beta0;
    beta_polluted.tail(spec.p) += spec.sigma_par * draw_normals(spec.p, rng);
  }
  const Dataset polluted_stratum = linear_responses(
      gen_correlated_normals(spec.n2, mu_polluted, spec.pairwise_corr, rng),
      beta_polluted, spec.noise_var_polluted, rng);

  // Shuffled concatenation; flags travel with the rows.
  const Eigen::Index total = spec.n1 + spec.n2;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  out.nonprob_sample.has_intercept = true;
  out.nonprob_sample.responses.resize(total);
  out.nonprob_sample.predictors.resize(total, spec.p);
  out.target_flags.resize(static_cast<std::size_t>(total));
  for (Eigen::Index i = 0; i < total; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    const bool from_target = src < spec.n1;
    const Dataset& stratum = from_target ? target_stratum : polluted_stratum;
    const Eigen::Index row = from_target ? src : src - spec.n1;
    out.nonprob_sample.responses(i) = stratum.responses(row);
    out.nonprob_sample.predictors.row(i) = stratum.predictors.row(row);
    out.target_flags[static_cast<std::size_t>(i)] = from_target;
  }
  return out;
}

double mse(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_true) {
  if (beta_hat.size() != beta_true.size())
    fail(ErrorCode::dimension_error,
         "coefficient vectors have lengths " + std::to_string(beta_hat.size()) +
             " and " + std::to_string(beta_true.size()));
  return (beta_hat - beta_true).squaredNorm();
}

RelativeMse relative_mse(const Eigen::VectorXd& beta_pse,
                         const Eigen::VectorXd& beta_exte,
                         const Eigen::VectorXd& beta_true) {
  constexpr double kExactRecovery = 1e-24;
  const double numerator = mse(beta_pse, beta_true);
  const double denominator = mse(beta_exte, beta_true);
  RelativeMse out;
  if (denominator <= kExactRecovery) {
    out.exact_recovery = true;
    return out;
  }
  out.value = numerator / denominator;
  return out;
}

std::pair<double, double> hits_false_positives(const ExtensionResult& result,
                                               const std::vector<bool>& target_flags) {
  if (target_flags.size() != result.decisions.size())
    fail(ErrorCode::alignment_error,
         "flags cover " + std::to_string(target_flags.size()) +
             " rows but " + std::to_string(result.decisions.size()) +
             " candidates were screened");
  Eigen::Index n_target = 0, n_polluted = 0, hit = 0, false_positive = 0;
  for (const CandidateDecision& decision : result.decisions) {
    const bool from_target = target_flags[static_cast<std::size_t>(decision.id)];
    (from_target ? n_target : n_polluted) += 1;
    if (decision.included()) (from_target ? hit : false_positive) += 1;
  }
  const double hits = n_target > 0 ? static_cast<double>(hit) / n_target : 0.0;
  const double fps =
      n_polluted > 0 ? static_cast<double>(false_positive) / n_polluted : 0.0;
  return {hits, fps};
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  s.count = static_cast<Eigen::Index>(values.size());
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

namespace {

Eigen::VectorXd columnwise_sd_of(const std::vector<Eigen::VectorXd>& rows) {
  if (rows.empty()) return {};
  const Eigen::Index q = rows.front().size();
  if (rows.size() < 2) return Eigen::VectorXd::Zero(q);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(q);
  for (const auto& r : rows) mean += r;
  mean /= static_cast<double>(rows.size());
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(q);
  for (const auto& r : rows) ss += (r - mean).cwiseAbs2();
  return (ss / static_cast<double>(rows.size() - 1)).cwiseSqrt();
}

Eigen::VectorXd columnwise_mean_of(const std::vector<Eigen::VectorXd>& rows) {
  if (rows.empty()) return {};
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(rows.front().size());
  for (const auto& r : rows) mean += r;
  return mean / static_cast<double>(rows.size());
}

}  // namespace

StudyReport run_study(const ScenarioSpec& spec, const ExtensionConfig& config,
                      int n_datasets, bool use_cv,
                      const std::optional<CvPlan>& cv_plan,
                      const std::optional<BootstrapSpec>& bootstrap) {
  if (n_datasets < 1)
    fail(ErrorCode::domain_error, "n_datasets must be at least 1");
  validate(spec);
  validate(config);

  StudyReport report;
  report.scenario = spec;
  report.config = config;
  report.per_replication.reserve(static_cast<std::size_t>(n_datasets));

  for (int r = 0; r < n_datasets; ++r) {
    ReplicationRecord record;
    record.replication = r;
    try {
      ScenarioSpec child = spec;
      child.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(r));
      const GeneratedScenario generated = gen_scenario(child);

      ExtensionConfig run_config = config;
      if (use_cv) {
        CvPlan plan = cv_plan ? *cv_plan : default_cv_plan(0);
        plan.seed = derive_seed(child.seed, 1);
        const AlphaPair selected =
            select_alphas(generated.prob_sample, generated.nonprob_sample, plan,
                          config.norm_scope);
        run_config.alpha_st = selected.first;
        run_config.alpha_ch = selected.second;
      }
      record.alpha_st = run_config.alpha_st;
      record.alpha_ch = run_config.alpha_ch;

      const ExtensionResult result =
          extend_sample(generated.prob_sample, generated.nonprob_sample, run_config);

      record.beta_pse = result.base_fit.coefficients;
      record.beta_exte = result.extended_fit.coefficients;
      record.se_naive = naive_standard_errors(result.extended_fit);
      record.se_prob = naive_standard_errors(result.base_fit);
      record.mse_pse = mse(record.beta_pse, spec.beta0);
      record.mse_exte = mse(record.beta_exte, spec.beta0);
      const RelativeMse rel = relative_mse(record.beta_pse, record.beta_exte, spec.beta0);
      record.mse_r = rel.value;
      record.exact_recovery = rel.exact_recovery;
      const auto [hits, fps] = hits_false_positives(result, generated.target_flags);
      record.hits = hits;
      record.false_positives = fps;
      record.extended_size = result.extended_fit.n();

      if (bootstrap) {
        BootstrapSpec boot = *bootstrap;
        boot.seed = derive_seed(child.seed, 2);
        record.se_bootstrap = bootstrap_se(generated.prob_sample,
                                           generated.nonprob_sample, run_config, boot);
      }
    } catch (const Error& e) {
      record.failed = true;
      record.error_code = to_string(e.code());
      ++report.failures;
    }
    report.per_replication.push_back(std::move(record));
  }

  if (report.failures * 10 > static_cast<Eigen::Index>(report.per_replication.size()))
    fail(ErrorCode::domain_error,
         std::to_string(report.failures) + " of " +
             std::to_string(report.per_replication.size()) +
             " replications failed; exceeding the 10% ceiling");

  std::vector<double> mse_pse, mse_exte, mse_r, hits, fps, ext_size, a_st, a_ch;
  std::vector<Eigen::VectorXd> beta_pse, beta_exte, se_naive, se_prob, se_boot;
  for (const ReplicationRecord& rec : report.per_replication) {
    if (rec.failed) continue;
    mse_pse.push_back(rec.mse_pse);
    mse_exte.push_back(rec.mse_exte);
    if (!rec.exact_recovery) mse_r.push_back(rec.mse_r);
    hits.push_back(rec.hits);
    fps.push_back(rec.false_positives);
    ext_size.push_back(static_cast<double>(rec.extended_size));
    a_st.push_back(rec.alpha_st);
    a_ch.push_back(rec.alpha_ch);
    beta_pse.push_back(rec.beta_pse);
    beta_exte.push_back(rec.beta_exte);
    se_naive.push_back(rec.se_naive);
    se_prob.push_back(rec.se_prob);
    if (rec.se_bootstrap.size() > 0) se_boot.push_back(rec.se_bootstrap);
  }
  report.mse_pse = summarize(mse_pse);
  report.mse_exte = summarize(mse_exte);
  report.mse_r = summarize(mse_r);
  report.hits = summarize(hits);
  report.false_positives = summarize(fps);
  report.extended_size = summarize(ext_size);
  report.alpha_st = summarize(a_st);
  report.alpha_ch = summarize(a_ch);
  report.actual_se = columnwise_sd_of(beta_exte);
  report.actual_se_pse = columnwise_sd_of(beta_pse);
  report.mean_se_naive = columnwise_mean_of(se_naive);
  report.mean_se_prob = columnwise_mean_of(se_prob);
  report.mean_se_bootstrap = columnwise_mean_of(se_boot);
  return report;
}

}  // namespace extreg
