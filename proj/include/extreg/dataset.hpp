#ifndef EXTREG_DATASET_HPP
#define EXTREG_DATASET_HPP

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace extreg {

// One regression sample: responses plus raw covariates. The intercept column
// is never stored; fits prepend it when has_intercept is set.
struct Dataset {
  Eigen::VectorXd responses;   // length n
  Eigen::MatrixXd predictors;  // n x p, no constant column
  bool has_intercept = true;

  Eigen::Index n() const { return responses.size(); }
  Eigen::Index p() const { return predictors.cols(); }
};

// Throws on non-finite entries, mismatched sizes, or too few rows for at
// least one residual degree of freedom.
void validate(const Dataset& data);

// Intercept-augmented design matrix (or the raw predictors when the model
// has no intercept).
Eigen::MatrixXd design_matrix(const Dataset& data);

Dataset select_rows(const Dataset& data, std::span<const Eigen::Index> rows);

Dataset append_rows(const Dataset& base, const Dataset& extra,
                    std::span<const Eigen::Index> extra_rows);

}  // namespace extreg

#endif
