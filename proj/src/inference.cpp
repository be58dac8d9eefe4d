#include "extreg/inference.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "extreg/errors.hpp"
#include "extreg/rng.hpp"
#include "extreg/simulation.hpp"

namespace extreg {

namespace {

Dataset resample_with_replacement(const Dataset& data, std::mt19937_64& rng) {
  std::uniform_int_distribution<Eigen::Index> pick(0, data.n() - 1);
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(data.n()));
  for (auto& r : rows) r = pick(rng);
  return select_rows(data, rows);
}

Eigen::VectorXd columnwise_sd(const Eigen::MatrixXd& samples) {
  const Eigen::Index n = samples.rows();
  if (n < 2) return Eigen::VectorXd::Zero(samples.cols());
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  return ((samples.rowwise() - mean).colwise().squaredNorm() /
          static_cast<double>(n - 1))
      .cwiseSqrt()
      .transpose();
}

}  // namespace

Eigen::VectorXd bootstrap_se(const Dataset& prob_sample, const Dataset& nonprob_sample,
                             const ExtensionConfig& config, const BootstrapSpec& spec) {
  if (spec.n_boot < 1)
    fail(ErrorCode::domain_error, "n_boot must be at least 1");
  validate(config);
  validate(prob_sample);

  const Eigen::Index q = prob_sample.p() + (prob_sample.has_intercept ? 1 : 0);
  Eigen::MatrixXd coefficients(spec.n_boot, q);
  int failed_replications = 0;
  for (int b = 0; b < spec.n_boot; ++b) {
    auto rng = make_stream(spec.seed, static_cast<std::uint64_t>(b));
    bool done = false;
    for (int attempt = 0; attempt <= spec.max_retries && !done; ++attempt) {
      const Dataset prob_star = resample_with_replacement(prob_sample, rng);
      Dataset nonprob_star;
      nonprob_star.has_intercept = nonprob_sample.has_intercept;
      nonprob_star.predictors.resize(0, nonprob_sample.p());
      if (nonprob_sample.n() > 0)
        nonprob_star = resample_with_replacement(nonprob_sample, rng);
      try {
        const ExtensionResult result =
            extend_sample(prob_star, nonprob_star, config);
        coefficients.row(b) = result.extended_fit.coefficients.transpose();
        done = true;
      } catch (const Error&) {
        // degenerate resample; redraw
      }
    }
    if (!done) {
      ++failed_replications;
      fail(ErrorCode::bootstrap_degeneracy,
           "bootstrap replication " + std::to_string(b) + " stayed degenerate after " +
               std::to_string(spec.max_retries + 1) + " draws (failure rate so far " +
               std::to_string(static_cast<double>(failed_replications) /
                              static_cast<double>(b + 1)) +
               ")");
    }
  }
  return columnwise_sd(coefficients);
}

Eigen::VectorXd actual_se_approximation(const ScenarioSpec& scenario,
                                        const ExtensionConfig& config, int n_rep) {
  if (n_rep < 2)
    fail(ErrorCode::domain_error, "n_rep must be at least 2");
  if (scenario.pollution_mode != PollutionMode::fixed)
    fail(ErrorCode::domain_error,
         "actual standard errors require fixed polluted-sample parameters");
  validate(scenario);
  validate(config);

  Eigen::MatrixXd coefficients(n_rep, scenario.p + 1);
  for (int r = 0; r < n_rep; ++r) {
    ScenarioSpec child = scenario;
    child.seed = derive_seed(scenario.seed, static_cast<std::uint64_t>(r));
    const GeneratedScenario generated = gen_scenario(child);
    const ExtensionResult result =
        extend_sample(generated.prob_sample, generated.nonprob_sample, config);
    coefficients.row(r) = result.extended_fit.coefficients.transpose();
  }
  return columnwise_sd(coefficients);
}

}  // namespace extreg
