#include "extreg/dataset.hpp"

#include <string>

#include "extreg/errors.hpp"

namespace extreg {

void validate(const Dataset& data) {
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  if (data.predictors.rows() != n)
    fail(ErrorCode::dimension_error,
         "responses have " + std::to_string(n) + " rows but predictors have " +
             std::to_string(data.predictors.rows()));
  const Eigen::Index q = p + (data.has_intercept ? 1 : 0);
  if (n < q + 1)
    fail(ErrorCode::dimension_error,
         "need at least " + std::to_string(q + 1) + " observations for " +
             std::to_string(q) + " coefficients, got " + std::to_string(n));
  if (!data.responses.allFinite() || !data.predictors.allFinite())
    fail(ErrorCode::domain_error, "dataset contains non-finite entries");
}

Eigen::MatrixXd design_matrix(const Dataset& data) {
  if (!data.has_intercept) return data.predictors;
  Eigen::MatrixXd design(data.n(), data.p() + 1);
  design.col(0).setOnes();
  design.rightCols(data.p()) = data.predictors;
  return design;
}

Dataset select_rows(const Dataset& data, std::span<const Eigen::Index> rows) {
  Dataset out;
  out.has_intercept = data.has_intercept;
  out.responses.resize(static_cast<Eigen::Index>(rows.size()));
  out.predictors.resize(static_cast<Eigen::Index>(rows.size()), data.p());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.responses(static_cast<Eigen::Index>(i)) = data.responses(rows[i]);
    out.predictors.row(static_cast<Eigen::Index>(i)) = data.predictors.row(rows[i]);
  }
  return out;
}

Dataset append_rows(const Dataset& base, const Dataset& extra,
                    std::span<const Eigen::Index> extra_rows) {
  if (base.p() != extra.p() || base.has_intercept != extra.has_intercept)
    fail(ErrorCode::dimension_error, "samples disagree on predictors or intercept convention");
  const Eigen::Index m = static_cast<Eigen::Index>(extra_rows.size());
  Dataset out;
  out.has_intercept = base.has_intercept;
  out.responses.resize(base.n() + m);
  out.predictors.resize(base.n() + m, base.p());
  out.responses.head(base.n()) = base.responses;
  out.predictors.topRows(base.n()) = base.predictors;
  for (Eigen::Index i = 0; i < m; ++i) {
    out.responses(base.n() + i) = extra.responses(extra_rows[i]);
    out.predictors.row(base.n() + i) = extra.predictors.row(extra_rows[i]);
  }
  return out;
}

}  // namespace extreg
