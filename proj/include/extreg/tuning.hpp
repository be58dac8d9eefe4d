#ifndef EXTREG_TUNING_HPP
#define EXTREG_TUNING_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "extreg/dataset.hpp"
#include "extreg/extension.hpp"

namespace extreg {

using AlphaPair = std::pair<double, double>;  // (alpha_st, alpha_ch)

// k-fold plan for choosing the screening levels on the probability sample.
struct CvPlan {
  int k = 5;
  std::vector<AlphaPair> grid;  // candidate (alpha_st, alpha_ch) pairs
  bool reduced_grid = true;     // grid constrained to alpha_st == alpha_ch
  std::uint64_t seed = 0;
};

// {0.3, 0.2, 0.1, 0.05} with alpha_st = alpha_ch.
std::vector<AlphaPair> default_reduced_grid();

// Cartesian square of the reduced grid values.
std::vector<AlphaPair> default_full_grid();

CvPlan default_cv_plan(std::uint64_t seed);

// Seeded random partition of {0..n-1} into k folds with sizes differing by
// at most one. Throws infeasible_split unless 2 <= k <= n.
std::vector<std::vector<Eigen::Index>> kfold_split(Eigen::Index n, int k,
                                                   std::uint64_t seed);

// Mean squared prediction error of the screening pipeline: each fold is held
// out, the remainder plus the non-probability sample is extended, and the
// held-out responses are predicted from the extended fit. The score is the
// total squared error divided by n. A fold whose training part cannot be
// screened raises fold_degeneracy naming the fold.
double cv_score(const Dataset& prob_sample, const Dataset& nonprob_sample,
                const ExtensionConfig& config,
                const std::vector<std::vector<Eigen::Index>>& folds);

double cv_score(const Dataset& prob_sample, const Dataset& nonprob_sample,
                const ExtensionConfig& config, const CvPlan& plan);

// Grid point with the smallest cv_score; ties break toward larger alpha
// (descending alpha_st + alpha_ch, then alpha_st), the smaller extended
// sample. Grid points that fail on some fold are skipped; if none survives,
// no_valid_alpha is raised.
AlphaPair select_alphas(const Dataset& prob_sample, const Dataset& nonprob_sample,
                        const CvPlan& plan,
                        NormScope scope = NormScope::full_coefficients);

}  // namespace extreg

#endif
