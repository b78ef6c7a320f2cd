#pragma once

#include <Eigen/Dense>

namespace adjrobust {

// Inverse standard normal CDF, Wichura's AS 241 (PPND16) rational
// approximation; relative error below 1e-15 on (0,1).
double normal_quantile(double p);

// z_{alpha/2}: the (1 - alpha/2) standard normal quantile.
inline double z_two_sided(double alpha) { return normal_quantile(1.0 - alpha / 2.0); }

// Empirical variance (1/n) sum (v_i - mean)^2.
inline double empirical_variance(const Eigen::VectorXd& v) {
  const double m = v.mean();
  return (v.array() - m).square().mean();
}

}  // namespace adjrobust
