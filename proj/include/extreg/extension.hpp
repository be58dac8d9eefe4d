#ifndef EXTREG_EXTENSION_HPP
#define EXTREG_EXTENSION_HPP

#include <Eigen/Dense>
#include <vector>

#include "extreg/dataset.hpp"
#include "extreg/ols.hpp"

namespace extreg {

// Scoped coefficient norms below this are treated as degenerate.
inline constexpr double kNormTolerance = 1e-12;

enum class NormScope {
  full_coefficients,  // Euclidean norm over the whole coefficient vector
  slopes_only,        // intercept excluded from numerator and denominator
};

// Screening levels. Both gates are calibrated from these: the residual gate
// uses the (1 - alpha_st) standard-normal quantile, the change gate the
// (1 - alpha_ch) empirical quantile of the leave-one-out changes in the
// probability sample.
struct ExtensionConfig {
  double alpha_st = 0.05;
  double alpha_ch = 0.05;
  NormScope norm_scope = NormScope::full_coefficients;
};

void validate(const ExtensionConfig& config);

// Euclidean norm of the coefficient vector under the configured scope.
double scoped_norm(const Eigen::VectorXd& coefficients, NormScope scope,
                   bool has_intercept);

// Outcome of screening one non-probability observation against the
// probability sample. `degenerate` marks candidates whose augmented fit
// failed (both gates then read failed); such candidates are excluded but
// never abort screening.
struct CandidateDecision {
  Eigen::Index id = -1;
  double studentized = 0.0;  // r*_{s,i} in the fit on S0 + candidate
  double rel_change = 0.0;   // ||b0 - b_aug|| / ||b0|| under the norm scope
  bool pass_residual = false;
  bool pass_change = false;
  bool degenerate = false;

  bool included() const { return pass_residual && pass_change; }
};

struct ExtensionResult {
  std::vector<Eigen::Index> included_ids;  // ascending candidate row ids
  std::vector<CandidateDecision> decisions;
  double t_s = 0.0;  // studentized-residual threshold
  double t_c = 0.0;  // relative-change threshold
  OlsFit base_fit;
  OlsFit extended_fit;
};

// Relative coefficient change ||b0 - b_{-i}|| / ||b0|| from deleting each
// observation of the probability sample in turn, via the closed-form case
// deletion (no refits). Calibrates the change gate.
Eigen::VectorXd loo_change_distribution(const Dataset& prob_sample,
                                        NormScope scope = NormScope::full_coefficients);

// (1 - alpha_ch) empirical quantile of the leave-one-out changes.
double threshold_tc(const Eigen::VectorXd& changes, double alpha_ch);

// (1 - alpha_st) standard-normal quantile.
double threshold_ts(double alpha_st);

// Screens a single candidate: fits S0 + candidate, reads the candidate's
// studentized residual in that fit and the relative coefficient change
// from the base fit, and applies |r*| <= t_s and change < t_c. A pure
// function of (S0, candidate, config); other candidates never matter.
CandidateDecision evaluate_candidate(const Dataset& prob_sample,
                                     const Eigen::Ref<const Eigen::VectorXd>& candidate_x,
                                     double candidate_y, Eigen::Index id,
                                     const ExtensionConfig& config, double t_s,
                                     double t_c, const OlsFit& base_fit);

// The full screening pipeline: calibrate both thresholds from the
// probability sample, screen every non-probability observation one at a
// time, and fit the extended sample (probability rows first, then the
// included candidates in row order).
ExtensionResult extend_sample(const Dataset& prob_sample,
                              const Dataset& nonprob_sample,
                              const ExtensionConfig& config);

// Screens the probability sample against itself and returns the reduced
// sample of self-included observations. Fitting the result gives a
// robustified estimate with the sample's own outliers excluded.
Dataset robustify(const Dataset& prob_sample, const ExtensionConfig& config);

}  // namespace extreg

#endif
