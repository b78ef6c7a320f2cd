#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "adjrobust/types.hpp"

namespace adjrobust {

// ---------------------------------------------------------------------------
// Interacted least squares
// ---------------------------------------------------------------------------

// Coefficients of the regression of y on [1, X_S, A, A*X_S] together with the
// Huber-White sandwich covariance of the full coefficient vector, ordered
// (delta, beta, tau, gamma).
struct InteractedLinearFit {
  double delta = 0.0;
  VectorXd beta;
  double tau = 0.0;
  VectorXd gamma;
  MatrixXd cov_hw;
  int set_index = -1;

  Eigen::Index dim() const { return beta.size(); }
  // Index of tau within the stacked coefficient vector.
  Eigen::Index tau_position() const { return 1 + beta.size(); }
};

InteractedLinearFit fit_interacted_ols(const ObservationTable& table,
                                       const std::vector<int>& set,
                                       int set_index = -1);

// tau + x * gamma per row; x_rows must have |S| columns.
VectorXd predict_contrast(const InteractedLinearFit& fit, const MatrixXd& x_rows);

// General least squares with rank check, shared by the fits above. Throws
// RankDeficient naming the first redundant column.
VectorXd solve_least_squares(const MatrixXd& design, const VectorXd& rhs);

// ---------------------------------------------------------------------------
// Predictors
// ---------------------------------------------------------------------------

class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const = 0;
  VectorXd predict_rows(const MatrixXd& rows) const;
};

// Mean of the targets over the k nearest training rows in Euclidean distance
// after per-column standardization; ties broken by lower training-row index.
class KnnRegressor : public Regressor {
 public:
  KnnRegressor(MatrixXd rows, VectorXd targets, int k);
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const override;
  int k() const { return k_; }

 private:
  MatrixXd rows_;  // standardized
  VectorXd targets_;
  Eigen::RowVectorXd mean_, scale_;
  int k_;
};

// a + x . b, the least-squares linear predictor.
class LinearRegressor : public Regressor {
 public:
  LinearRegressor(const MatrixXd& rows, const VectorXd& targets);
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const override;
  double intercept() const { return intercept_; }
  const VectorXd& slope() const { return slope_; }

 private:
  double intercept_ = 0.0;
  VectorXd slope_;
};

enum class ProjectionMode { Ols, Knn };

// Regression of contrast values onto the common covariates X_common.
std::unique_ptr<Regressor> project_onto_common(const VectorXd& contrasts,
                                               const MatrixXd& rows_common,
                                               ProjectionMode mode, int k_nn);

// Logistic regression by IRLS with a small ridge on the Hessian. Predictions
// are clipped to [floor, 1-floor]; `separation` flags a diverging fit (the
// clipped predictions remain usable).
class LogisticModel {
 public:
  static LogisticModel fit(const MatrixXd& x, const VectorXd& a, double floor);
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  VectorXd predict_rows(const MatrixXd& rows) const;
  bool separation() const { return separation_; }
  const VectorXd& coef() const { return coef_; }  // (intercept, slopes)

 private:
  VectorXd coef_;
  double floor_ = 0.01;
  bool separation_ = false;
};

// ---------------------------------------------------------------------------
// Cross-fitting
// ---------------------------------------------------------------------------

// Per-fold, per-set fitted nuisances plus the out-of-fold per-unit
// predictions Algorithm 1 consumes. Every stored prediction for unit i comes
// from models fit without fold(i).
struct NuisanceFits {
  std::vector<int> fold_assignment;
  int folds = 0;
  // indexed [fold][set]
  std::vector<std::vector<std::unique_ptr<Regressor>>> mu0, mu1, proj;
  std::vector<std::vector<LogisticModel>> propensity;
  // out-of-fold predictions, n x K
  MatrixXd mu0_hat, mu1_hat, e_hat;
  bool any_separation = false;
};

// Seeded uniform random partition into `folds` folds; for each fold and set
// fits mu_0 / mu_1 (k-NN on out-of-fold control/treated units), the
// propensity (logistic on out-of-fold units), and the S_cap-projection of the
// out-of-fold contrast predictions (OLS when |S_cap| <= 3, k-NN otherwise).
NuisanceFits crossfit(const ObservationTable& table, const AdjustmentSpec& spec,
                      int folds, int k_nn, std::uint64_t seed);

// Assembles the per-unit panel (plug-in contrasts, AIPW pseudo-outcomes,
// projections, and g_hat) from cross-fitted nuisances.
ContrastPanel make_contrast_panel(const ObservationTable& table,
                                  const AdjustmentSpec& spec,
                                  const NuisanceFits& fits);

// Gathers the columns in `set` for each row of x.
MatrixXd select_columns(const MatrixXd& x, const std::vector<int>& set);

}  // namespace adjrobust
