#include "extreg/tuning.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "extreg/errors.hpp"
#include "extreg/rng.hpp"

namespace extreg {

namespace {
constexpr double kGridValues[] = {0.3, 0.2, 0.1, 0.05};
}

std::vector<AlphaPair> default_reduced_grid() {
  std::vector<AlphaPair> grid;
  for (double a : kGridValues) grid.emplace_back(a, a);
  return grid;
}

std::vector<AlphaPair> default_full_grid() {
  std::vector<AlphaPair> grid;
  for (double st : kGridValues)
    for (double ch : kGridValues) grid.emplace_back(st, ch);
  return grid;
}

CvPlan default_cv_plan(std::uint64_t seed) {
  CvPlan plan;
  plan.grid = default_reduced_grid();
  plan.seed = seed;
  return plan;
}

std::vector<std::vector<Eigen::Index>> kfold_split(Eigen::Index n, int k,
                                                   std::uint64_t seed) {
  if (k < 2 || static_cast<Eigen::Index>(k) > n)
    fail(ErrorCode::infeasible_split,
         "cannot split " + std::to_string(n) + " observations into " +
             std::to_string(k) + " folds");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto rng = make_stream(seed, 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
  const Eigen::Index base = n / k;
  const Eigen::Index remainder = n % k;
  std::size_t next = 0;
  for (int j = 0; j < k; ++j) {
    const Eigen::Index size = base + (j < remainder ? 1 : 0);
    folds[static_cast<std::size_t>(j)].assign(order.begin() + static_cast<std::ptrdiff_t>(next),
                                              order.begin() + static_cast<std::ptrdiff_t>(next + static_cast<std::size_t>(size)));
    next += static_cast<std::size_t>(size);
  }
  return folds;
}

double cv_score(const Dataset& prob_sample, const Dataset& nonprob_sample,
                const ExtensionConfig& config,
                const std::vector<std::vector<Eigen::Index>>& folds) {
  Eigen::Index n_total = 0;
  double squared_error = 0.0;
  for (std::size_t j = 0; j < folds.size(); ++j) {
    const auto& holdout = folds[j];
    std::vector<Eigen::Index> training;
    std::vector<bool> held(static_cast<std::size_t>(prob_sample.n()), false);
    for (Eigen::Index i : holdout) held[static_cast<std::size_t>(i)] = true;
    for (Eigen::Index i = 0; i < prob_sample.n(); ++i)
      if (!held[static_cast<std::size_t>(i)]) training.push_back(i);

    const Dataset learning = select_rows(prob_sample, training);
    ExtensionResult result;
    try {
      result = extend_sample(learning, nonprob_sample, config);
    } catch (const Error& e) {
      fail(ErrorCode::fold_degeneracy,
           "fold " + std::to_string(j) + " cannot be screened: " + e.what());
    }
    for (Eigen::Index i : holdout) {
      const double predicted =
          result.extended_fit.predict(prob_sample.predictors.row(i).transpose());
      const double err = prob_sample.responses(i) - predicted;
      squared_error += err * err;
    }
    n_total += static_cast<Eigen::Index>(holdout.size());
  }
  return squared_error / static_cast<double>(n_total);
}

double cv_score(const Dataset& prob_sample, const Dataset& nonprob_sample,
                const ExtensionConfig& config, const CvPlan& plan) {
  return cv_score(prob_sample, nonprob_sample, config,
                  kfold_split(prob_sample.n(), plan.k, plan.seed));
}

AlphaPair select_alphas(const Dataset& prob_sample, const Dataset& nonprob_sample,
                        const CvPlan& plan, NormScope scope) {
  if (plan.grid.empty())
    fail(ErrorCode::domain_error, "alpha grid is empty");
  const auto folds = kfold_split(prob_sample.n(), plan.k, plan.seed);

  // Evaluate from the largest alphas down so that exact score ties resolve
  // toward the smaller extended sample.
  std::vector<AlphaPair> ordered = plan.grid;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const AlphaPair& a, const AlphaPair& b) {
                     const double sa = a.first + a.second;
                     const double sb = b.first + b.second;
                     if (sa != sb) return sa > sb;
                     return a.first > b.first;
                   });

  bool have_best = false;
  AlphaPair best{};
  double best_score = 0.0;
  std::string last_failure;
  for (const AlphaPair& alphas : ordered) {
    ExtensionConfig config;
    config.alpha_st = alphas.first;
    config.alpha_ch = alphas.second;
    config.norm_scope = scope;
    double score;
    try {
      score = cv_score(prob_sample, nonprob_sample, config, folds);
    } catch (const Error& e) {
      last_failure = e.what();
      continue;
    }
    if (!have_best || score < best_score) {
      have_best = true;
      best = alphas;
      best_score = score;
    }
  }
  if (!have_best)
    fail(ErrorCode::no_valid_alpha,
         "every grid point failed cross-validation; last failure: " + last_failure);
  return best;
}

}  // namespace extreg
