#pragma once

#include <vector>

#include "adjrobust/nuisance.hpp"
#include "adjrobust/types.hpp"

namespace adjrobust {

struct IntervalEstimate {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool covers(double v) const { return lo <= v && v <= hi; }
};

// Per-set interacted-OLS baseline: the treatment-coefficient estimate with
// its Huber-White sandwich SE and a normal-quantile CI. (On data whose
// covariates are centered in the population, the coefficient is the per-set
// ATE estimand tau_k*.)
IntervalEstimate ols_ci(const ObservationTable& table, const std::vector<int>& set,
                        double alpha);

// Per-set AIPW baseline: P_n of the cross-fitted pseudo-outcomes for this set
// with sample-SD/sqrt(n) standard error.
IntervalEstimate aipw_ci(const ObservationTable& table, const std::vector<int>& set,
                         int set_index, const NuisanceFits& nuisances, double alpha);

// Convex hull of the union: (min lo, max hi).
IntervalEstimate naive_hull(const std::vector<IntervalEstimate>& cis);

}  // namespace adjrobust
