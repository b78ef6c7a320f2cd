#pragma once

#include <cstdint>

#include "adjrobust/ar_core.hpp"
#include "adjrobust/types.hpp"

namespace adjrobust {

// Centers every column of x at its sample mean, iterating to an exact fixed
// point so centering already-centered data is a bitwise no-op.
MatrixXd center_columns(const MatrixXd& x);

struct ArLmOptions {
  double alpha = 0.05;
  int bootstrap = 1000;     // resamples for the variance
  std::uint64_t seed = 0;
  bool with_variance = true;  // point estimate only when false
};

// Parametric path: interacted OLS per set on centered covariates, linear
// projection of the fitted contrasts onto X_common, exponential tilt, and
//   estimate = a_1 + b_1 . P_n[w X_common].
// Variance by the seeded nonparametric bootstrap (resamples whose tilt is
// infeasible or whose design is rank deficient are skipped; more than 5%
// skipped raises TooManyDegenerateResamples).
ArOutcome ar_estimate_lm(const ObservationTable& table, const AdjustmentSpec& spec,
                         const ArLmOptions& opts = {});

// n-scaled bootstrap variance n * (1/B) sum_b (est_b - est)^2 around the
// full-sample estimate.
double bootstrap_variance(const ObservationTable& table, const AdjustmentSpec& spec,
                          int B, std::uint64_t seed);

}  // namespace adjrobust
