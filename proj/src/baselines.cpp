#include "adjrobust/baselines.hpp"

#include <cmath>

#include "adjrobust/ar_core.hpp"
#include "adjrobust/stats.hpp"

namespace adjrobust {

IntervalEstimate ols_ci(const ObservationTable& table, const std::vector<int>& set,
                        double alpha) {
  const InteractedLinearFit fit = fit_interacted_ols(table, set);
  const Eigen::Index t = fit.tau_position();
  const double se = std::sqrt(fit.cov_hw(t, t));
  const double z = z_two_sided(alpha);
  return {fit.tau, fit.tau - z * se, fit.tau + z * se};
}

IntervalEstimate aipw_ci(const ObservationTable& table, const std::vector<int>& set,
                         int set_index, const NuisanceFits& nuisances, double alpha) {
  (void)set;
  const Eigen::Index n = table.n();
  VectorXd pseudo(n);
  for (Eigen::Index i = 0; i < n; ++i)
    pseudo[i] = aipw_pseudo(table.y[i], table.a[i], nuisances.mu0_hat(i, set_index),
                            nuisances.mu1_hat(i, set_index), nuisances.e_hat(i, set_index));
  const double est = pseudo.mean();
  const double se = std::sqrt(empirical_variance(pseudo) / static_cast<double>(n));
  const double z = z_two_sided(alpha);
  return {est, est - z * se, est + z * se};
}

IntervalEstimate naive_hull(const std::vector<IntervalEstimate>& cis) {
  if (cis.empty()) throw Error(ErrorCode::EmptyList, "naive_hull: empty interval list");
  IntervalEstimate out = cis[0];
  for (const auto& ci : cis) {
    out.lo = std::min(out.lo, ci.lo);
    out.hi = std::max(out.hi, ci.hi);
  }
  out.estimate = 0.5 * (out.lo + out.hi);
  return out;
}

}  // namespace adjrobust
