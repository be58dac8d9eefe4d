#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "extreg/extension.hpp"
#include "extreg/ols.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using extreg::Dataset;
using extreg::ErrorCode;
using extreg::ExtensionConfig;
using extreg::ExtensionResult;
using extreg::NormScope;
using test_helpers::expect_error;

namespace {

// Screening statistics for one candidate computed the slow way: a fresh
// normal-equations fit of the augmented sample.
struct OracleDecision {
  double studentized;
  double rel_change;
};

OracleDecision oracle_evaluate(const Dataset& prob, const Eigen::VectorXd& x,
                               double y) {
  Dataset augmented = prob;
  augmented.responses.conservativeResize(prob.n() + 1);
  augmented.responses(prob.n()) = y;
  augmented.predictors.conservativeResize(prob.n() + 1, prob.p());
  augmented.predictors.row(prob.n()) = x.transpose();

  const Eigen::MatrixXd design = oracles::with_intercept(augmented.predictors);
  const Eigen::VectorXd beta = oracles::normal_equations_fit(design, augmented.responses);
  const Eigen::VectorXd residuals = augmented.responses - design * beta;
  const double sigma2 =
      residuals.squaredNorm() / static_cast<double>(design.rows() - design.cols());
  const Eigen::MatrixXd hat = oracles::hat_matrix(design);
  const Eigen::Index c = prob.n();

  const Eigen::VectorXd base = oracles::fit_dataset(prob);
  OracleDecision out;
  out.studentized =
      residuals(c) / (std::sqrt(sigma2) * std::sqrt(1.0 - hat(c, c)));
  out.rel_change = (base - beta).norm() / base.norm();
  return out;
}

// y = X beta + r with X'r = 0 and r(3) = 0, so observation 3 sits exactly
// on the fitted line.
Dataset zero_residual_dataset() {
  Dataset data;
  data.predictors.resize(6, 1);
  data.predictors << -2.0, -1.0, 0.0, 1.0, 2.0, 3.0;
  const Eigen::MatrixXd design = oracles::with_intercept(data.predictors);
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(design).householderQ();
  Eigen::VectorXd r = q.col(2) - (q.col(2)(3) / q.col(3)(3)) * q.col(3);
  r(3) = 0.0;
  data.responses = design * Eigen::Vector2d(2.0, 1.0) + r;
  return data;
}

}  // namespace

TEST_CASE("leave-one-out change distribution") {
  SUBCASE("matches explicit refits") {
    const Dataset data = oracles::random_dataset(811, 30, 3);
    const Eigen::VectorXd changes = extreg::loo_change_distribution(data);
    const Eigen::VectorXd base = oracles::fit_dataset(data);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const double expected =
          (base - oracles::fit_without(data, i)).norm() / base.norm();
      CHECK(changes(i) == doctest::Approx(expected).epsilon(1e-9));
    }
  }

  SUBCASE("slopes-only scope matches refits without the intercept entries") {
    const Dataset data = oracles::random_dataset(830, 25, 3);
    const Eigen::VectorXd changes =
        extreg::loo_change_distribution(data, NormScope::slopes_only);
    const Eigen::VectorXd base = oracles::fit_dataset(data);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const Eigen::VectorXd delta = base - oracles::fit_without(data, i);
      const double expected = delta.tail(3).norm() / base.tail(3).norm();
      CHECK(changes(i) == doctest::Approx(expected).epsilon(1e-9));
    }
  }

  SUBCASE("duplicated rows share one value") {
    Dataset data = oracles::random_dataset(812, 12, 2);
    data.predictors.row(10) = data.predictors.row(4);
    data.predictors.row(11) = data.predictors.row(4);
    data.responses(10) = data.responses(4);
    data.responses(11) = data.responses(4);
    const Eigen::VectorXd changes = extreg::loo_change_distribution(data);
    CHECK(changes(10) == doctest::Approx(changes(4)).epsilon(1e-10));
    CHECK(changes(11) == doctest::Approx(changes(4)).epsilon(1e-10));
  }

  SUBCASE("an exactly fitted observation has zero change") {
    const Dataset data = zero_residual_dataset();
    const Eigen::VectorXd changes = extreg::loo_change_distribution(data);
    CHECK(changes(3) < 1e-11);
  }

  SUBCASE("zero coefficient vector is degenerate") {
    Dataset data = oracles::random_dataset(813, 10, 1);
    data.responses.setZero();
    expect_error(ErrorCode::degenerate_norm,
                 [&] { extreg::loo_change_distribution(data); });
  }
}

TEST_CASE("empirical change threshold") {
  SUBCASE("constant sample returns that constant") {
    const Eigen::VectorXd changes = Eigen::VectorXd::Constant(17, 0.42);
    CHECK(extreg::threshold_tc(changes, 0.05) == 0.42);
    CHECK(extreg::threshold_tc(changes, 0.5) == 0.42);
  }

  SUBCASE("order statistics enumerated by hand") {
    Eigen::VectorXd changes(100);
    for (int i = 0; i < 100; ++i) changes(i) = i + 1;
    std::mt19937_64 rng(9);
    std::shuffle(changes.data(), changes.data() + 100, rng);
    CHECK(extreg::threshold_tc(changes, 0.05) == 96.0);
    CHECK(extreg::threshold_tc(changes, 0.25) == 76.0);
    Eigen::VectorXd seven(7);
    seven << 5, 1, 6, 2, 7, 3, 4;
    CHECK(extreg::threshold_tc(seven, 0.5) == 4.0);   // floor(3.5)+1 = 4th
    CHECK(extreg::threshold_tc(seven, 0.05) == 7.0);  // floor(6.65)+1 = 7th
  }

  SUBCASE("threshold is non-increasing in alpha") {
    const Dataset data = oracles::random_dataset(814, 40, 2);
    const Eigen::VectorXd changes = extreg::loo_change_distribution(data);
    double previous = std::numeric_limits<double>::infinity();
    for (double alpha : {0.01, 0.05, 0.1, 0.2, 0.3, 0.5, 0.9}) {
      const double t = extreg::threshold_tc(changes, alpha);
      CHECK(t <= previous);
      previous = t;
    }
  }

  SUBCASE("empty input is an error") {
    expect_error(ErrorCode::empty_distribution,
                 [&] { extreg::threshold_tc(Eigen::VectorXd(), 0.05); });
  }
}

TEST_CASE("normal-quantile threshold") {
  CHECK(std::abs(extreg::threshold_ts(0.5)) < 1e-12);
  CHECK(extreg::threshold_ts(0.05) == doctest::Approx(1.64485363).epsilon(1e-6));
  CHECK(extreg::threshold_ts(0.025) == doctest::Approx(1.95996398).epsilon(1e-6));

  SUBCASE("agrees with the series-bisection oracle") {
    for (double alpha : {0.4, 0.2, 0.1, 0.05, 0.025, 0.01, 0.005}) {
      const double expected = oracles::bisect_normal_quantile(1.0 - alpha);
      CHECK(std::abs(extreg::threshold_ts(alpha) - expected) < 1e-8);
    }
  }

  SUBCASE("domain errors") {
    expect_error(ErrorCode::domain_error, [&] { extreg::threshold_ts(0.0); });
    expect_error(ErrorCode::domain_error, [&] { extreg::threshold_ts(1.0); });
    expect_error(ErrorCode::domain_error, [&] { extreg::threshold_ts(-0.1); });
  }
}

TEST_CASE("candidate evaluation") {
  const ExtensionConfig config;

  SUBCASE("duplicate of an exactly fitted point changes nothing") {
    const Dataset data = zero_residual_dataset();
    const extreg::OlsFit base = extreg::fit_ols(data);
    const auto decision = extreg::evaluate_candidate(
        data, data.predictors.row(3).transpose(), data.responses(3), 0, config,
        extreg::threshold_ts(0.05), 0.5, base);
    CHECK(decision.rel_change < 1e-12);
    CHECK(decision.pass_change);
    CHECK(!decision.degenerate);
  }

  SUBCASE("a 10-sigma displaced candidate fails the residual gate") {
    const Dataset data = oracles::random_dataset(815, 40, 1);
    const extreg::OlsFit base = extreg::fit_ols(data);
    const double x_mean = data.predictors.col(0).mean();
    Eigen::VectorXd x(1);
    x << x_mean;
    const double y = base.predict(x) + 10.0 * std::sqrt(base.sigma2_hat);

    const double t_s = extreg::threshold_ts(0.05);
    const auto decision =
        extreg::evaluate_candidate(data, x, y, 0, config, t_s, 1e9, base);
    CHECK(std::abs(decision.studentized) > t_s);
    CHECK(!decision.pass_residual);
    CHECK(!decision.included());

    const OracleDecision expected = oracle_evaluate(data, x, y);
    CHECK(decision.studentized == doctest::Approx(expected.studentized).epsilon(1e-9));
    CHECK(decision.rel_change == doctest::Approx(expected.rel_change).epsilon(1e-9));
  }

  SUBCASE("non-finite candidates are excluded, not fatal") {
    const Dataset data = oracles::random_dataset(816, 20, 2);
    const extreg::OlsFit base = extreg::fit_ols(data);
    Eigen::VectorXd x(2);
    x << 1.0, std::numeric_limits<double>::quiet_NaN();
    const auto decision =
        extreg::evaluate_candidate(data, x, 1.0, 7, config, 2.0, 0.5, base);
    CHECK(decision.degenerate);
    CHECK(!decision.included());
    CHECK(decision.id == 7);
  }
}

TEST_CASE("extend_sample") {
  const ExtensionConfig config;

  SUBCASE("empty non-probability sample leaves the base fit untouched") {
    const Dataset prob = oracles::random_dataset(817, 25, 2);
    Dataset empty;
    empty.predictors.resize(0, 2);
    empty.responses.resize(0);
    const ExtensionResult result = extreg::extend_sample(prob, empty, config);
    CHECK(result.included_ids.empty());
    CHECK(result.decisions.empty());
    CHECK(result.extended_fit.coefficients == result.base_fit.coefficients);
    CHECK(result.extended_fit.n() == prob.n());
  }

  SUBCASE("decisions match per-candidate oracle fits on a self-copy") {
    const Dataset prob = oracles::random_dataset(818, 30, 2);
    const ExtensionResult result = extreg::extend_sample(prob, prob, config);
    REQUIRE(result.decisions.size() == 30);
    for (const auto& decision : result.decisions) {
      const OracleDecision expected =
          oracle_evaluate(prob, prob.predictors.row(decision.id).transpose(),
                          prob.responses(decision.id));
      CHECK(decision.studentized ==
            doctest::Approx(expected.studentized).epsilon(1e-9));
      CHECK(decision.rel_change ==
            doctest::Approx(expected.rel_change).epsilon(1e-9));
      CHECK(decision.pass_residual ==
            (std::abs(expected.studentized) <= result.t_s));
      CHECK(decision.pass_change == (expected.rel_change < result.t_c));
    }
  }

  SUBCASE("included ids are exactly the conjunction of both gates") {
    const Dataset prob = oracles::random_dataset(819, 30, 2);
    const Dataset nonprob = oracles::random_dataset(820, 40, 2, 2.5);
    const ExtensionResult result = extreg::extend_sample(prob, nonprob, config);
    std::vector<Eigen::Index> expected;
    for (const auto& d : result.decisions)
      if (d.pass_residual && d.pass_change) expected.push_back(d.id);
    CHECK(result.included_ids == expected);
    CHECK(result.extended_fit.n() ==
          prob.n() + static_cast<Eigen::Index>(expected.size()));
    CHECK(result.extended_fit.n() >= prob.n());
    CHECK(result.extended_fit.n() <= prob.n() + nonprob.n());
  }

  SUBCASE("screening order and batch composition never change decisions") {
    const Dataset prob = oracles::random_dataset(821, 25, 2);
    const Dataset nonprob = oracles::random_dataset(822, 15, 2, 2.0);
    const ExtensionResult batch = extreg::extend_sample(prob, nonprob, config);

    std::vector<Eigen::Index> order(15);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(5);
    std::shuffle(order.begin(), order.end(), rng);
    const Dataset permuted = extreg::select_rows(nonprob, order);
    const ExtensionResult shuffled = extreg::extend_sample(prob, permuted, config);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const auto& original = batch.decisions[static_cast<std::size_t>(order[pos])];
      const auto& moved = shuffled.decisions[pos];
      CHECK(moved.studentized == original.studentized);
      CHECK(moved.rel_change == original.rel_change);
      CHECK(moved.included() == original.included());
    }

    Dataset single;
    single.predictors = nonprob.predictors.row(3);
    single.responses = nonprob.responses.segment(3, 1);
    const ExtensionResult alone = extreg::extend_sample(prob, single, config);
    CHECK(alone.decisions[0].studentized == batch.decisions[3].studentized);
    CHECK(alone.decisions[0].included() == batch.decisions[3].included());
  }

  SUBCASE("larger alphas with strictly smaller thresholds shrink the inclusion set") {
    const Dataset prob = oracles::random_dataset(823, 35, 2);
    const Dataset nonprob = oracles::random_dataset(824, 60, 2, 1.5);
    ExtensionConfig loose, tight;
    loose.alpha_st = loose.alpha_ch = 0.05;
    tight.alpha_st = tight.alpha_ch = 0.3;
    const ExtensionResult wide = extreg::extend_sample(prob, nonprob, loose);
    const ExtensionResult narrow = extreg::extend_sample(prob, nonprob, tight);
    REQUIRE(narrow.t_s < wide.t_s);
    REQUIRE(narrow.t_c <= wide.t_c);
    CHECK(std::includes(wide.included_ids.begin(), wide.included_ids.end(),
                        narrow.included_ids.begin(), narrow.included_ids.end()));
  }

  SUBCASE("invalid configs and mismatched samples are rejected") {
    const Dataset prob = oracles::random_dataset(825, 20, 2);
    ExtensionConfig bad;
    bad.alpha_st = 0.0;
    expect_error(ErrorCode::domain_error,
                 [&] { extreg::extend_sample(prob, prob, bad); });
    const Dataset other = oracles::random_dataset(826, 10, 3);
    expect_error(ErrorCode::dimension_error,
                 [&] { extreg::extend_sample(prob, other, config); });
  }
}

TEST_CASE("robustify") {
  const ExtensionConfig config;

  SUBCASE("a gross outlier is dropped, points on the line are kept") {
    Dataset data;
    const Eigen::Index n = 30;
    data.predictors.resize(n, 1);
    data.responses.resize(n);
    std::mt19937_64 rng(827);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      data.predictors(i, 0) = normal(rng);
      data.responses(i) = 1.0 + 2.0 * data.predictors(i, 0) + 0.05 * normal(rng);
    }
    data.responses(n - 1) += 20.0;  // gross outlier

    const ExtensionResult result = extreg::extend_sample(data, data, config);
    CHECK(!result.decisions[static_cast<std::size_t>(n - 1)].included());
    const Dataset reduced = extreg::robustify(data, config);
    CHECK(reduced.n() >= n - 4);
    for (Eigen::Index i = 0; i < reduced.n(); ++i)
      CHECK(std::abs(reduced.responses(i) -
                     (1.0 + 2.0 * reduced.predictors(i, 0))) < 1.0);
  }

  SUBCASE("clean Gaussian samples keep most observations") {
    const Dataset data = oracles::random_dataset(828, 60, 2);
    const Dataset reduced = extreg::robustify(data, config);
    CHECK(static_cast<double>(reduced.n()) / static_cast<double>(data.n()) >= 0.85);
  }

  SUBCASE("kept rows appear verbatim in the original") {
    const Dataset data = oracles::random_dataset(829, 40, 2);
    const ExtensionResult result = extreg::extend_sample(data, data, config);
    const Dataset reduced = extreg::robustify(data, config);
    REQUIRE(reduced.n() == static_cast<Eigen::Index>(result.included_ids.size()));
    for (std::size_t k = 0; k < result.included_ids.size(); ++k) {
      const Eigen::Index src = result.included_ids[k];
      CHECK(reduced.responses(static_cast<Eigen::Index>(k)) == data.responses(src));
      CHECK(reduced.predictors.row(static_cast<Eigen::Index>(k)) ==
            data.predictors.row(src));
    }
  }
}
