#ifndef EXTREG_OLS_HPP
#define EXTREG_OLS_HPP

#include <Eigen/Dense>

#include "extreg/dataset.hpp"

namespace extreg {

// Relative size of the smallest diagonal of the triangular QR factor below
// which the design is treated as rank deficient.
inline constexpr double kRankTolerance = 1e-10;

// 1 - h_ii below this is treated as a leverage-one observation.
inline constexpr double kLeverageTolerance = 1e-10;

// One fitted least-squares model together with the diagnostic quantities
// used by the screening machinery: leverages, residuals, the error-variance
// estimate and (X'X)^-1.
struct OlsFit {
  Eigen::VectorXd coefficients;   // intercept first when present
  Eigen::VectorXd residuals;      // y - X beta_hat
  Eigen::VectorXd hat_diagonals;  // h_ii of X (X'X)^-1 X'
  double sigma2_hat = 0.0;        // sum r_i^2 / dof
  Eigen::Index dof = 0;           // n - #coefficients
  Eigen::MatrixXd xtx_inverse;    // (X'X)^-1 for the augmented design
  Eigen::MatrixXd design;         // intercept-augmented design matrix
  bool has_intercept = true;

  Eigen::Index n() const { return residuals.size(); }

  double predict(const Eigen::Ref<const Eigen::VectorXd>& predictors) const;
};

// Least-squares fit via Householder QR with column pivoting; (X'X)^-1 is
// recovered from the triangular factor. Throws singular_design when the
// smallest diagonal of the factor falls below kRankTolerance relative to the
// largest, naming the offending ratio.
OlsFit fit_ols(const Dataset& data);

// r_i / (sigma_hat * sqrt(1 - h_ii)), the internally studentized residuals.
// Throws degenerate_fit when sigma2_hat is not positive and
// leverage_degenerate when some h_ii is within kLeverageTolerance of 1.
Eigen::VectorXd studentized_residuals(const OlsFit& fit);

// Coefficient change from deleting observation `index`, in closed form:
// (X'X)^-1 x_i r_i / (1 - h_ii). No refit.
Eigen::VectorXd case_delta_beta(const OlsFit& fit, Eigen::Index index);

// Model-based standard errors: sqrt(diag(sigma2_hat * (X'X)^-1)).
Eigen::VectorXd naive_standard_errors(const OlsFit& fit);

}  // namespace extreg

#endif
