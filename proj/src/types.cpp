#include "adjrobust/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace adjrobust {

void ObservationTable::validate() const {
  const Eigen::Index nn = y.size();
  if (nn < 2) throw Error(ErrorCode::InvalidValue, "need at least 2 observations");
  if (a.size() != nn || x.rows() != nn)
    throw Error(ErrorCode::DimensionMismatch, "y, a, x row counts disagree");
  if (static_cast<Eigen::Index>(col_names.size()) != x.cols())
    throw Error(ErrorCode::DimensionMismatch, "col_names does not match x");
  if (!y.allFinite() || !x.allFinite())
    throw Error(ErrorCode::InvalidValue, "non-finite entry in y or x");
  int treated = 0, control = 0;
  for (Eigen::Index i = 0; i < nn; ++i) {
    if (a[i] == 0.0) ++control;
    else if (a[i] == 1.0) ++treated;
    else throw Error(ErrorCode::NonBinaryTreatment,
                     "treatment must be 0/1, found " + std::to_string(a[i]) +
                     " at row " + std::to_string(i));
  }
  if (treated == 0 || control == 0)
    throw Error(ErrorCode::InvalidValue, "need at least one treated and one control unit");
}

std::vector<int> intersect_sets(const std::vector<std::vector<int>>& sets) {
  if (sets.empty()) return {};
  std::set<int> acc(sets[0].begin(), sets[0].end());
  for (std::size_t k = 1; k < sets.size(); ++k) {
    std::set<int> cur(sets[k].begin(), sets[k].end());
    std::set<int> out;
    std::set_intersection(acc.begin(), acc.end(), cur.begin(), cur.end(),
                          std::inserter(out, out.begin()));
    acc.swap(out);
  }
  return {acc.begin(), acc.end()};
}

void AdjustmentSpec::validate(Eigen::Index p) const {
  if (sets.size() < 2)
    throw Error(ErrorCode::FewerThanTwoSets, "need at least two adjustment sets");
  for (std::size_t k = 0; k < sets.size(); ++k) {
    if (sets[k].empty())
      throw Error(ErrorCode::InvalidValue, "adjustment set " + std::to_string(k + 1) + " is empty");
    std::set<int> seen;
    for (int j : sets[k]) {
      if (j < 0 || j >= p)
        throw Error(ErrorCode::UnknownColumn,
                    "column index " + std::to_string(j) + " out of range");
      if (!seen.insert(j).second)
        throw Error(ErrorCode::DuplicateColumn,
                    "duplicate column in adjustment set " + std::to_string(k + 1));
    }
  }
  if (intersection.empty())
    throw Error(ErrorCode::EmptyIntersection,
                "adjustment sets have empty intersection");
  if (!(overlap_floor > 0.0 && overlap_floor < 0.5))
    throw Error(ErrorCode::InvalidValue, "overlap_floor must lie in (0, 0.5)");
}

void ContrastPanel::validate(Eigen::Index n) const {
  if (tau_hat.rows() != n || tau_aipw.rows() != n || g_hat.rows() != n ||
      proj_tau.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "panel row count mismatch");
  if (!tau_hat.allFinite() || !tau_aipw.allFinite() || !g_hat.allFinite() ||
      !proj_tau.allFinite())
    throw Error(ErrorCode::InvalidValue, "non-finite entry in contrast panel");
}

const char* to_string(TiltStatus s) {
  switch (s) {
    case TiltStatus::Converged: return "converged";
    case TiltStatus::Infeasible: return "infeasible";
    case TiltStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

}  // namespace adjrobust
