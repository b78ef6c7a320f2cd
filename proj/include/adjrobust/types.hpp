#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace adjrobust {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Typed error codes so callers (and the CLI) can map failures to exit codes
// without parsing messages.
enum class ErrorCode {
  MissingColumn,
  NonBinaryTreatment,
  NonNumericCell,
  EmptyFile,
  UnknownColumn,
  EmptyIntersection,
  FewerThanTwoSets,
  DuplicateColumn,
  InvalidValue,
  RankDeficient,
  DimensionMismatch,
  EmptyTrainingSet,
  FoldTooSmall,
  SingularHessian,
  PropensityOutOfRange,
  SingularGram,
  EmptyList,
  TooManyDegenerateResamples,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// The sample: outcome y, binary treatment a, covariate matrix x with named
// columns. Immutable after validate(); validation enforces finiteness,
// a ∈ {0,1}, and at least one unit per arm.
struct ObservationTable {
  VectorXd y;
  VectorXd a;
  MatrixXd x;
  std::vector<std::string> col_names;

  Eigen::Index n() const { return y.size(); }
  Eigen::Index p() const { return x.cols(); }
  void validate() const;
};

// K candidate adjustment sets (column indices) plus their intersection and
// the overlap floor used for propensity clipping.
struct AdjustmentSpec {
  std::vector<std::vector<int>> sets;
  std::vector<int> intersection;
  double overlap_floor = 0.01;

  int num_sets() const { return static_cast<int>(sets.size()); }
  void validate(Eigen::Index p) const;
};

// Computes the sorted intersection of the given sets.
std::vector<int> intersect_sets(const std::vector<std::vector<int>>& sets);

// Per-unit contrast estimates and derived quantities, one column per set
// (g_hat has K-1 columns: set-1-minus-set-k projections).
struct ContrastPanel {
  MatrixXd tau_hat;   // n x K, out-of-fold plug-in contrasts
  MatrixXd tau_aipw;  // n x K, AIPW pseudo-outcomes
  MatrixXd g_hat;     // n x (K-1)
  MatrixXd proj_tau;  // n x K, E-hat[tau_k | X_common]
  void validate(Eigen::Index n) const;
};

enum class TiltStatus { Converged, Infeasible, MaxIterations };

const char* to_string(TiltStatus s);

struct TiltSolution {
  VectorXd lambda;    // K-1
  VectorXd weights;   // n, mean 1 when converged
  TiltStatus status = TiltStatus::MaxIterations;
  double grad_norm = 0.0;  // sup-norm of the objective gradient at lambda
  int iterations = 0;
};

enum class ArMethod { AipwCrossfit, LinearModel };

struct AREstimate {
  double estimate = 0.0;
  double variance = 0.0;  // n-scaled asymptotic variance estimate
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double level = 0.95;
  VectorXd per_set_reweighted;  // K
  VectorXd nu;                  // K, sums to 1
  double bias_correction = 0.0;
  ArMethod method = ArMethod::LinearModel;
  VectorXd lambda;   // tilt solution
  VectorXd weights;  // per-unit tilt weights
};

struct MethodSummary {
  std::string method;
  double coverage = 0.0;
  double mean_width = 0.0;
  int replications = 0;       // replications that produced a CI
  int infeasible = 0;         // replications skipped as infeasible/degenerate
  double target_ate = 0.0;    // the estimand coverage is measured against
};

struct SimulationReport {
  std::string example;
  int n = 0;
  int requested_replications = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::vector<MethodSummary> methods;
};

}  // namespace adjrobust
