#include "extreg/extension.hpp"

#include <cmath>
#include <string>

#include "extreg/errors.hpp"
#include "extreg/quantile.hpp"

namespace extreg {

void validate(const ExtensionConfig& config) {
  if (!(config.alpha_st > 0.0 && config.alpha_st < 1.0))
    fail(ErrorCode::domain_error,
         "alpha_st must lie in (0,1), got " + std::to_string(config.alpha_st));
  if (!(config.alpha_ch > 0.0 && config.alpha_ch < 1.0))
    fail(ErrorCode::domain_error,
         "alpha_ch must lie in (0,1), got " + std::to_string(config.alpha_ch));
}

double scoped_norm(const Eigen::VectorXd& coefficients, NormScope scope,
                   bool has_intercept) {
  if (scope == NormScope::slopes_only && has_intercept)
    return coefficients.tail(coefficients.size() - 1).norm();
  return coefficients.norm();
}

Eigen::VectorXd loo_change_distribution(const Dataset& prob_sample, NormScope scope) {
  const OlsFit fit = fit_ols(prob_sample);
  const double base_norm = scoped_norm(fit.coefficients, scope, fit.has_intercept);
  if (base_norm <= kNormTolerance)
    fail(ErrorCode::degenerate_norm,
         "coefficient norm is zero under the configured scope; relative "
         "changes are undefined");
  Eigen::VectorXd changes(fit.n());
  for (Eigen::Index i = 0; i < fit.n(); ++i) {
    const Eigen::VectorXd delta = case_delta_beta(fit, i);
    changes(i) = scoped_norm(delta, scope, fit.has_intercept) / base_norm;
  }
  return changes;
}

double threshold_tc(const Eigen::VectorXd& changes, double alpha_ch) {
  return empirical_quantile(changes, 1.0 - alpha_ch);
}

double threshold_ts(double alpha_st) {
  if (!(alpha_st > 0.0 && alpha_st < 1.0))
    fail(ErrorCode::domain_error,
         "alpha_st must lie in (0,1), got " + std::to_string(alpha_st));
  return normal_quantile(1.0 - alpha_st);
}

CandidateDecision evaluate_candidate(const Dataset& prob_sample,
                                     const Eigen::Ref<const Eigen::VectorXd>& candidate_x,
                                     double candidate_y, Eigen::Index id,
                                     const ExtensionConfig& config, double t_s,
                                     double t_c, const OlsFit& base_fit) {
  if (candidate_x.size() != prob_sample.p())
    fail(ErrorCode::dimension_error,
         "candidate has " + std::to_string(candidate_x.size()) +
             " predictors, expected " + std::to_string(prob_sample.p()));
  CandidateDecision decision;
  decision.id = id;
  try {
    Dataset augmented;
    augmented.has_intercept = prob_sample.has_intercept;
    augmented.responses.resize(prob_sample.n() + 1);
    augmented.responses.head(prob_sample.n()) = prob_sample.responses;
    augmented.responses(prob_sample.n()) = candidate_y;
    augmented.predictors.resize(prob_sample.n() + 1, prob_sample.p());
    augmented.predictors.topRows(prob_sample.n()) = prob_sample.predictors;
    augmented.predictors.row(prob_sample.n()) = candidate_x.transpose();

    const OlsFit fit = fit_ols(augmented);
    const Eigen::Index c = prob_sample.n();
    if (!(fit.sigma2_hat > 0.0))
      fail(ErrorCode::degenerate_fit, "augmented fit is exact");
    const double one_minus_h = 1.0 - fit.hat_diagonals(c);
    if (one_minus_h < kLeverageTolerance)
      fail(ErrorCode::leverage_degenerate, "candidate has leverage 1");

    decision.studentized =
        fit.residuals(c) / (std::sqrt(fit.sigma2_hat) * std::sqrt(one_minus_h));
    const double base_norm =
        scoped_norm(base_fit.coefficients, config.norm_scope, base_fit.has_intercept);
    decision.rel_change =
        scoped_norm(base_fit.coefficients - fit.coefficients, config.norm_scope,
                    base_fit.has_intercept) /
        base_norm;
    if (!std::isfinite(decision.studentized) || !std::isfinite(decision.rel_change))
      fail(ErrorCode::degenerate_fit, "non-finite screening statistic");

    decision.pass_residual = std::abs(decision.studentized) <= t_s;
    decision.pass_change = decision.rel_change < t_c;
  } catch (const Error&) {
    decision.studentized = 0.0;
    decision.rel_change = 0.0;
    decision.pass_residual = false;
    decision.pass_change = false;
    decision.degenerate = true;
  }
  return decision;
}

ExtensionResult extend_sample(const Dataset& prob_sample,
                              const Dataset& nonprob_sample,
                              const ExtensionConfig& config) {
  validate(config);
  if (nonprob_sample.n() > 0 &&
      (prob_sample.p() != nonprob_sample.p() ||
       prob_sample.has_intercept != nonprob_sample.has_intercept))
    fail(ErrorCode::dimension_error,
         "probability and non-probability samples disagree on predictors or "
         "intercept convention");

  ExtensionResult result;
  result.base_fit = fit_ols(prob_sample);

  const double base_norm =
      scoped_norm(result.base_fit.coefficients, config.norm_scope,
                  result.base_fit.has_intercept);
  if (base_norm <= kNormTolerance)
    fail(ErrorCode::degenerate_norm,
         "coefficient norm is zero under the configured scope; relative "
         "changes are undefined");

  result.t_c = threshold_tc(loo_change_distribution(prob_sample, config.norm_scope),
                            config.alpha_ch);
  result.t_s = threshold_ts(config.alpha_st);

  result.decisions.reserve(static_cast<std::size_t>(nonprob_sample.n()));
  for (Eigen::Index i = 0; i < nonprob_sample.n(); ++i) {
    CandidateDecision decision = evaluate_candidate(
        prob_sample, nonprob_sample.predictors.row(i).transpose(),
        nonprob_sample.responses(i), i, config, result.t_s, result.t_c,
        result.base_fit);
    if (decision.included()) result.included_ids.push_back(i);
    result.decisions.push_back(std::move(decision));
  }

  if (result.included_ids.empty()) {
    result.extended_fit = result.base_fit;
  } else {
    const Dataset extended =
        append_rows(prob_sample, nonprob_sample, result.included_ids);
    result.extended_fit = fit_ols(extended);
  }
  return result;
}

Dataset robustify(const Dataset& prob_sample, const ExtensionConfig& config) {
  const ExtensionResult result = extend_sample(prob_sample, prob_sample, config);
  return select_rows(prob_sample, result.included_ids);
}

}  // namespace extreg
