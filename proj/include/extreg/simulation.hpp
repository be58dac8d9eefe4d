#ifndef EXTREG_SIMULATION_HPP
#define EXTREG_SIMULATION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "extreg/dataset.hpp"
#include "extreg/extension.hpp"
#include "extreg/inference.hpp"
#include "extreg/tuning.hpp"

namespace extreg {

// How the polluted stratum deviates from the target population.
enum class PollutionMode {
  fixed,   // predictor-mean shift and polluted coefficients given explicitly
  random,  // shifts drawn once per dataset: mean += sigma_loc * N(0,1) per
           // predictor, slopes += sigma_par * N(0,1); intercept unshifted
};

// Full generative description of one simulation setting. The probability
// sample and the target stratum of the non-probability sample share mu0,
// the correlation structure, and beta0; only the noise variances may differ.
struct ScenarioSpec {
  Eigen::Index p = 1;
  Eigen::Index n = 40;    // probability sample size
  Eigen::Index n1 = 200;  // target-population rows in the non-prob sample
  Eigen::Index n2 = 200;  // polluted rows
  Eigen::VectorXd mu0;    // predictor means, length p
  double pairwise_corr = 0.0;
  Eigen::VectorXd beta0;  // target coefficients, intercept first (length p+1)
  double noise_var_prob = 1.0;
  double noise_var_target_np = 1.0;
  double noise_var_polluted = 1.0;
  PollutionMode pollution_mode = PollutionMode::fixed;
  Eigen::VectorXd mu_shift;        // fixed mode: added to mu0, length p
  Eigen::VectorXd beta_polluted;   // fixed mode: polluted coefficients, length p+1
  double sigma_loc = 0.0;          // random mode
  double sigma_par = 0.0;          // random mode
  std::uint64_t seed = 0;
};

void validate(const ScenarioSpec& spec);

// Rows are i.i.d. multivariate normal with the given means, unit variances
// and constant pairwise correlation, generated through the triangular
// (Cholesky) factor of the correlation matrix.
Eigen::MatrixXd gen_correlated_normals(Eigen::Index count, const Eigen::VectorXd& mu,
                                       double pairwise_corr, std::mt19937_64& rng);

struct GeneratedScenario {
  Dataset prob_sample;
  Dataset nonprob_sample;           // shuffled concatenation of both strata
  std::vector<bool> target_flags;   // true where the row came from the target stratum
};

GeneratedScenario gen_scenario(const ScenarioSpec& spec);

// ||beta_hat - beta_true||^2
double mse(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_true);

struct RelativeMse {
  double value = 0.0;
  bool exact_recovery = false;  // extended estimator hit the truth; no ratio
};

// ||b_P - b||^2 / ||b_ext - b||^2; values above 1 favor the extended
// estimator. Exact recovery of the truth by the extended fit is flagged
// instead of dividing by (near) zero.
RelativeMse relative_mse(const Eigen::VectorXd& beta_pse,
                         const Eigen::VectorXd& beta_exte,
                         const Eigen::VectorXd& beta_true);

// hits = included target fraction, false positives = included polluted
// fraction; zero when the respective stratum is empty.
std::pair<double, double> hits_false_positives(const ExtensionResult& result,
                                               const std::vector<bool>& target_flags);

struct ReplicationRecord {
  int replication = 0;
  bool failed = false;
  std::string error_code;  // set when failed
  double mse_pse = 0.0;
  double mse_exte = 0.0;
  double mse_r = 0.0;
  bool exact_recovery = false;
  double hits = 0.0;
  double false_positives = 0.0;
  Eigen::Index extended_size = 0;
  double alpha_st = 0.0;
  double alpha_ch = 0.0;
  Eigen::VectorXd beta_pse;
  Eigen::VectorXd beta_exte;
  Eigen::VectorXd se_naive;      // model-based SEs of the extended fit
  Eigen::VectorXd se_prob;       // model-based SEs of the probability-sample fit
  Eigen::VectorXd se_bootstrap;  // empty unless bootstrap was requested
};

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;
  Eigen::Index count = 0;
};

struct StudyReport {
  ScenarioSpec scenario;
  ExtensionConfig config;
  std::vector<ReplicationRecord> per_replication;
  MetricSummary mse_pse, mse_exte, mse_r, hits, false_positives, extended_size,
      alpha_st, alpha_ch;
  Eigen::VectorXd actual_se;         // sd of extended coefficients over replications
  Eigen::VectorXd actual_se_pse;     // sd of probability-sample coefficients
  Eigen::VectorXd mean_se_naive;
  Eigen::VectorXd mean_se_prob;
  Eigen::VectorXd mean_se_bootstrap; // empty unless bootstrap was requested
  Eigen::Index failures = 0;
};

MetricSummary summarize(const std::vector<double>& values);

// Multi-replication study: per replication a fresh dataset is generated
// (random pollution parameters are redrawn each time), screening runs with
// the fixed config or CV-selected levels, and all metrics are recorded.
// Individual replication failures are recorded, not fatal, up to a 10%
// ceiling. When `bootstrap` is given, bootstrap SEs are computed for every
// replication and averaged.
StudyReport run_study(const ScenarioSpec& spec, const ExtensionConfig& config,
                      int n_datasets, bool use_cv = false,
                      const std::optional<CvPlan>& cv_plan = std::nullopt,
                      const std::optional<BootstrapSpec>& bootstrap = std::nullopt);

}  // namespace extreg

#endif
