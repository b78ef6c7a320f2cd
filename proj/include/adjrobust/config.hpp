#pragma once

#include <cstdint>
#include <string>

#include "adjrobust/types.hpp"

namespace adjrobust {

// Analysis settings parsed from the JSON config:
//   {"adjustment_sets": [[string]], "alpha": number, "method": "lm"|"aipw",
//    "folds": int, "bootstrap": int, "seed": int, "overlap_floor": number,
//    "covariates": [string]}   -- "covariates" optionally restricts the
// covariate universe before name resolution.
struct AnalysisConfig {
  AdjustmentSpec spec;
  double alpha = 0.05;
  std::string method = "lm";  // "lm" or "aipw"
  int folds = 5;
  int bootstrap = 1000;
  std::uint64_t seed = 0;
};

// Resolves adjustment-set column names against the table and enforces the
// AdjustmentSpec invariants (K >= 2, non-empty intersection, no duplicates).
AdjustmentSpec parse_adjustment_config(const std::string& json_text,
                                       const ObservationTable& table);

AnalysisConfig parse_analysis_config(const std::string& json_text,
                                     const ObservationTable& table);

// Default k for the k-NN baseline learner: ceil(n^0.7 / 2); callers cap it by
// training-class size.
int default_knn_k(Eigen::Index n);

}  // namespace adjrobust
