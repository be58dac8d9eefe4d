#ifndef EXTREG_INFERENCE_HPP
#define EXTREG_INFERENCE_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "extreg/dataset.hpp"
#include "extreg/extension.hpp"

namespace extreg {

struct ScenarioSpec;

enum class ResampleScheme {
  stratified,  // probability and non-probability samples resampled
               // independently, each keeping its size
};

struct BootstrapSpec {
  int n_boot = 100;
  std::uint64_t seed = 0;
  ResampleScheme scheme = ResampleScheme::stratified;
  int max_retries = 10;  // redraws allowed per replication before failing
};

// Bootstrap standard errors for the extended-sample estimator: each
// replication resamples both samples with replacement, reruns the whole
// pipeline (threshold calibration, screening, extended fit) and records the
// coefficients; returns their per-coefficient standard deviation (divisor
// n_boot - 1; zero vector when n_boot == 1). Replications whose resample
// cannot be screened are redrawn up to max_retries times, after which
// bootstrap_degeneracy reports the failure rate.
Eigen::VectorXd bootstrap_se(const Dataset& prob_sample, const Dataset& nonprob_sample,
                             const ExtensionConfig& config, const BootstrapSpec& spec);

// Monte Carlo approximation of the extended-sample estimator's true
// sampling variability: n_rep fresh datasets are drawn from the scenario
// (which must use fixed pollution parameters) and the pipeline runs on each.
Eigen::VectorXd actual_se_approximation(const ScenarioSpec& scenario,
                                        const ExtensionConfig& config, int n_rep);

}  // namespace extreg

#endif
