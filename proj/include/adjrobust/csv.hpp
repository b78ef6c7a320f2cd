#pragma once

#include <string>

#include "adjrobust/types.hpp"

namespace adjrobust {

// Reads a comma-separated file with a header row. The named outcome and
// treatment columns become y and a; every other numeric column becomes a
// covariate, in header order. Cells must parse as doubles ('.' decimal
// separator); the offending row/column is reported otherwise.
ObservationTable load_csv(const std::string& path, const std::string& outcome_col,
                          const std::string& treatment_col);

// Writes the table back out with doubles printed to 17 significant digits so
// a round trip through load_csv is bit-exact.
void write_csv(const ObservationTable& table, const std::string& path,
               const std::string& outcome_col = "y",
               const std::string& treatment_col = "a");

}  // namespace adjrobust
