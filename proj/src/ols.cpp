#include "extreg/ols.hpp"

#include <cmath>
#include <string>

#include "extreg/errors.hpp"

namespace extreg {

double OlsFit::predict(const Eigen::Ref<const Eigen::VectorXd>& predictors) const {
  if (!has_intercept) return coefficients.dot(predictors);
  return coefficients(0) + coefficients.tail(coefficients.size() - 1).dot(predictors);
}

OlsFit fit_ols(const Dataset& data) {
  validate(data);
  const Eigen::MatrixXd design = design_matrix(data);
  const Eigen::Index n = design.rows();
  const Eigen::Index q = design.cols();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const auto& r_factor = qr.matrixR();
  const double r_max = std::abs(r_factor(0, 0));
  const double r_min = std::abs(r_factor(q - 1, q - 1));
  if (!(r_max > 0.0) || r_min < kRankTolerance * r_max)
    fail(ErrorCode::singular_design,
         "design is rank deficient: smallest/largest triangular diagonal = " +
             std::to_string(r_max > 0.0 ? r_min / r_max : 0.0));

  OlsFit fit;
  fit.has_intercept = data.has_intercept;
  fit.design = design;
  fit.coefficients = qr.solve(data.responses);
  fit.residuals = data.responses - design * fit.coefficients;
  fit.dof = n - q;
  fit.sigma2_hat = fit.residuals.squaredNorm() / static_cast<double>(fit.dof);

  // X P = Q R  =>  (X'X)^-1 = P R^-1 R^-T P'
  Eigen::MatrixXd r_inv = r_factor.topRows(q)
                              .triangularView<Eigen::Upper>()
                              .solve(Eigen::MatrixXd::Identity(q, q));
  fit.xtx_inverse = qr.colsPermutation() * (r_inv * r_inv.transpose()) *
                    qr.colsPermutation().transpose();

  // h_ii = row norms of the thin Q factor: solve R' Z' = (X P)' for Z.
  Eigen::MatrixXd thin_q = r_factor.topRows(q)
                               .triangularView<Eigen::Upper>()
                               .transpose()
                               .solve((design * qr.colsPermutation()).transpose())
                               .transpose();
  fit.hat_diagonals = thin_q.rowwise().squaredNorm();
  return fit;
}

Eigen::VectorXd studentized_residuals(const OlsFit& fit) {
  if (!(fit.sigma2_hat > 0.0))
    fail(ErrorCode::degenerate_fit,
         "error variance estimate is zero; residuals cannot be studentized");
  if ((1.0 - fit.hat_diagonals.maxCoeff()) < kLeverageTolerance)
    fail(ErrorCode::leverage_degenerate,
         "an observation has leverage 1; its residual variance vanishes");
  const double sigma = std::sqrt(fit.sigma2_hat);
  return fit.residuals.array() /
         (sigma * (1.0 - fit.hat_diagonals.array()).sqrt());
}

Eigen::VectorXd case_delta_beta(const OlsFit& fit, Eigen::Index index) {
  if (index < 0 || index >= fit.n())
    fail(ErrorCode::dimension_error,
         "observation index " + std::to_string(index) + " out of range");
  const double one_minus_h = 1.0 - fit.hat_diagonals(index);
  if (one_minus_h < kLeverageTolerance)
    fail(ErrorCode::leverage_degenerate,
         "observation " + std::to_string(index) +
             " has leverage 1; deletion leaves a rank-deficient design");
  return fit.xtx_inverse * fit.design.row(index).transpose() *
         (fit.residuals(index) / one_minus_h);
}

Eigen::VectorXd naive_standard_errors(const OlsFit& fit) {
  return (fit.sigma2_hat * fit.xtx_inverse.diagonal().array()).sqrt();
}

}  // namespace extreg
