#ifndef EXTREG_QUANTILE_HPP
#define EXTREG_QUANTILE_HPP

#include <Eigen/Dense>

namespace extreg {

// Inverse CDF of the standard normal distribution (Wichura's PPND16
// rational approximations, relative error below 1e-15). Throws a
// domain_error outside (0, 1).
double normal_quantile(double p);

// Empirical p-quantile under the nearest-rank convention: the k-th order
// statistic with k = floor(p*m) + 1 clamped to m, i.e. the smallest sample
// value whose ECDF strictly exceeds p. Distribution-free, no interpolation.
// Throws empty_distribution on empty input and domain_error for p outside
// (0, 1).
double empirical_quantile(const Eigen::VectorXd& values, double p);

}  // namespace extreg

#endif
