#include "adjrobust/nuisance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adjrobust/rng.hpp"

namespace adjrobust {

MatrixXd select_columns(const MatrixXd& x, const std::vector<int>& set) {
  MatrixXd out(x.rows(), static_cast<Eigen::Index>(set.size()));
  for (std::size_t j = 0; j < set.size(); ++j) out.col(j) = x.col(set[j]);
  return out;
}

VectorXd solve_least_squares(const MatrixXd& design, const VectorXd& rhs) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < design.cols()) {
    // First column the pivoting left out of the basis.
    const auto perm = qr.colsPermutation().indices();
    const Eigen::Index offender = perm[qr.rank()];
    throw Error(ErrorCode::RankDeficient,
                "design is rank deficient (column " + std::to_string(offender) +
                " is collinear)");
  }
  return qr.solve(rhs);
}

// ---------------------------------------------------------------------------
// Interacted OLS
// ---------------------------------------------------------------------------

namespace {

MatrixXd interacted_design(const VectorXd& a, const MatrixXd& xs) {
  const Eigen::Index n = xs.rows(), d = xs.cols();
  MatrixXd design(n, 2 * d + 2);
  design.col(0).setOnes();
  design.middleCols(1, d) = xs;
  design.col(d + 1) = a;
  design.middleCols(d + 2, d) = xs.array().colwise() * a.array();
  return design;
}

}  // namespace

InteractedLinearFit fit_interacted_ols(const ObservationTable& table,
                                       const std::vector<int>& set, int set_index) {
  const MatrixXd xs = select_columns(table.x, set);
  const MatrixXd design = interacted_design(table.a, xs);
  const VectorXd coef = solve_least_squares(design, table.y);
  const Eigen::Index d = xs.cols();

  const VectorXd resid = table.y - design * coef;
  const MatrixXd xtx_inv =
      (design.transpose() * design).ldlt().solve(MatrixXd::Identity(design.cols(), design.cols()));
  const MatrixXd meat =
      design.transpose() * (design.array().colwise() * resid.array().square()).matrix();

  InteractedLinearFit fit;
  fit.delta = coef[0];
  fit.beta = coef.segment(1, d);
  fit.tau = coef[d + 1];
  fit.gamma = coef.segment(d + 2, d);
  fit.cov_hw = xtx_inv * meat * xtx_inv;
  fit.set_index = set_index;
  return fit;
}

VectorXd predict_contrast(const InteractedLinearFit& fit, const MatrixXd& x_rows) {
  if (x_rows.cols() != fit.dim())
    throw Error(ErrorCode::DimensionMismatch,
                "predict_contrast: expected " + std::to_string(fit.dim()) +
                " columns, got " + std::to_string(x_rows.cols()));
  return (x_rows * fit.gamma).array() + fit.tau;
}

// ---------------------------------------------------------------------------
// Predictors
// ---------------------------------------------------------------------------

VectorXd Regressor::predict_rows(const MatrixXd& rows) const {
  VectorXd out(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out[i] = predict(rows.row(i));
  return out;
}

KnnRegressor::KnnRegressor(MatrixXd rows, VectorXd targets, int k)
    : rows_(std::move(rows)), targets_(std::move(targets)), k_(k) {
  if (rows_.rows() == 0) throw Error(ErrorCode::EmptyTrainingSet, "k-NN: no training rows");
  if (k_ < 1 || k_ > rows_.rows())
    throw Error(ErrorCode::InvalidValue, "k-NN: k must lie in [1, n_train]");
  mean_ = rows_.colwise().mean();
  scale_.resize(rows_.cols());
  for (Eigen::Index j = 0; j < rows_.cols(); ++j) {
    const double sd = std::sqrt((rows_.col(j).array() - mean_[j]).square().mean());
    scale_[j] = sd > 0.0 ? sd : 1.0;
  }
  rows_ = (rows_.rowwise() - mean_).array().rowwise() / scale_.array();
}

double KnnRegressor::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  const Eigen::RowVectorXd q = (row - mean_).array() / scale_.array();
  const Eigen::Index n = rows_.rows();
  // (distance^2, index); index order breaks ties deterministically
  std::vector<std::pair<double, Eigen::Index>> d2(n);
  for (Eigen::Index i = 0; i < n; ++i)
    d2[i] = {(rows_.row(i) - q).squaredNorm(), i};
  std::nth_element(d2.begin(), d2.begin() + (k_ - 1), d2.end());
  double sum = 0.0;
  for (int i = 0; i < k_; ++i) sum += targets_[d2[i].second];
  return sum / k_;
}

LinearRegressor::LinearRegressor(const MatrixXd& rows, const VectorXd& targets) {
  MatrixXd design(rows.rows(), rows.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(rows.cols()) = rows;
  const VectorXd coef = solve_least_squares(design, targets);
  intercept_ = coef[0];
  slope_ = coef.tail(rows.cols());
}

double LinearRegressor::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  return intercept_ + row.dot(slope_);
}

std::unique_ptr<Regressor> project_onto_common(const VectorXd& contrasts,
                                               const MatrixXd& rows_common,
                                               ProjectionMode mode, int k_nn) {
  if (rows_common.rows() == 0)
    throw Error(ErrorCode::EmptyTrainingSet, "projection: no rows");
  if (mode == ProjectionMode::Ols)
    return std::make_unique<LinearRegressor>(rows_common, contrasts);
  const int k = std::min<int>(k_nn, static_cast<int>(rows_common.rows()));
  return std::make_unique<KnnRegressor>(rows_common, contrasts, k);
}

LogisticModel LogisticModel::fit(const MatrixXd& x, const VectorXd& a, double floor) {
  const Eigen::Index n = x.rows(), d = x.cols();
  if ((a.array() == 1.0).count() == 0 || (a.array() == 0.0).count() == 0)
    throw Error(ErrorCode::FoldTooSmall, "logistic fit needs both classes");
  MatrixXd design(n, d + 1);
  design.col(0).setOnes();
  design.rightCols(d) = x;

  LogisticModel model;
  model.floor_ = floor;
  VectorXd beta = VectorXd::Zero(d + 1);
  constexpr double kGradTol = 1e-8;
  constexpr int kMaxIter = 100;
  constexpr double kCoefBound = 500.0;  // IRLS divergence = separation
  for (int it = 0; it < kMaxIter; ++it) {
    const VectorXd eta = design * beta;
    const VectorXd p = (1.0 / (1.0 + (-eta.array()).exp())).matrix();
    const VectorXd grad = design.transpose() * (a - p);
    if (grad.lpNorm<Eigen::Infinity>() <= kGradTol) break;
    const VectorXd w = (p.array() * (1.0 - p.array())).matrix();
    MatrixXd hess = design.transpose() * (design.array().colwise() * w.array()).matrix();
    hess.diagonal().array() += 1e-8;  // ridge guard near separation
    beta += hess.ldlt().solve(grad);
    if (beta.norm() > kCoefBound) {
      model.separation_ = true;
      break;
    }
  }
  model.coef_ = beta;
  return model;
}

double LogisticModel::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  const double eta = coef_[0] + row.dot(coef_.tail(coef_.size() - 1));
  const double p = 1.0 / (1.0 + std::exp(-eta));
  return std::min(1.0 - floor_, std::max(floor_, p));
}

VectorXd LogisticModel::predict_rows(const MatrixXd& rows) const {
  VectorXd out(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out[i] = predict(rows.row(i));
  return out;
}

// ---------------------------------------------------------------------------
// Cross-fitting
// ---------------------------------------------------------------------------

namespace {

// Seeded Fisher-Yates shuffle dealt round-robin into folds.
std::vector<int> assign_folds(Eigen::Index n, int folds, std::uint64_t seed) {
  std::vector<Eigen::Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  CounterRng gen(seed, 0, /*purpose=*/8);
  std::uint64_t ctr = 0;
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(gen.below(ctr++, static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  std::vector<int> fold(n);
  for (Eigen::Index i = 0; i < n; ++i) fold[perm[i]] = static_cast<int>(i % folds);
  return fold;
}

std::vector<Eigen::Index> rows_where(const std::vector<int>& fold, int f, bool in_fold) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < fold.size(); ++i)
    if ((fold[i] == f) == in_fold) idx.push_back(static_cast<Eigen::Index>(i));
  return idx;
}

MatrixXd take_rows(const MatrixXd& m, const std::vector<Eigen::Index>& idx) {
  MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(i) = m.row(idx[i]);
  return out;
}

VectorXd take(const VectorXd& v, const std::vector<Eigen::Index>& idx) {
  VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

}  // namespace

NuisanceFits crossfit(const ObservationTable& table, const AdjustmentSpec& spec,
                      int folds, int k_nn, std::uint64_t seed) {
  const Eigen::Index n = table.n();
  const int K = spec.num_sets();
  if (folds < 2) throw Error(ErrorCode::InvalidValue, "need at least 2 folds");
  if (folds > n / 4) throw Error(ErrorCode::InvalidValue, "folds must not exceed n/4");

  NuisanceFits fits;
  fits.folds = folds;
  fits.fold_assignment = assign_folds(n, folds, seed);
  fits.mu0.resize(folds);
  fits.mu1.resize(folds);
  fits.proj.resize(folds);
  fits.propensity.assign(folds, {});
  fits.mu0_hat.resize(n, K);
  fits.mu1_hat.resize(n, K);
  fits.e_hat.resize(n, K);

  for (int f = 0; f < folds; ++f) {
    const auto train = rows_where(fits.fold_assignment, f, false);
    const auto test = rows_where(fits.fold_assignment, f, true);
    const VectorXd a_tr = take(table.a, train);
    const VectorXd y_tr = take(table.y, train);

    std::vector<Eigen::Index> treated, control;
    for (std::size_t i = 0; i < train.size(); ++i)
      (a_tr[static_cast<Eigen::Index>(i)] == 1.0 ? treated : control).push_back(train[i]);
    if (treated.empty() || control.empty())
      throw Error(ErrorCode::FoldTooSmall,
                  "fold " + std::to_string(f) + " training split lacks a treatment arm");

    fits.mu0[f].resize(K);
    fits.mu1[f].resize(K);
    fits.propensity[f].reserve(K);
    for (int k = 0; k < K; ++k) {
      const MatrixXd xs_all = select_columns(table.x, spec.sets[k]);
      const int k0 = std::min<int>(k_nn, static_cast<int>(control.size()));
      const int k1 = std::min<int>(k_nn, static_cast<int>(treated.size()));
      fits.mu0[f][k] = std::make_unique<KnnRegressor>(take_rows(xs_all, control),
                                                      take(table.y, control), k0);
      fits.mu1[f][k] = std::make_unique<KnnRegressor>(take_rows(xs_all, treated),
                                                      take(table.y, treated), k1);
      fits.propensity[f].push_back(
          LogisticModel::fit(take_rows(xs_all, train), a_tr, spec.overlap_floor));
      if (fits.propensity[f].back().separation()) fits.any_separation = true;

      for (const auto i : test) {
        fits.mu0_hat(i, k) = fits.mu0[f][k]->predict(xs_all.row(i));
        fits.mu1_hat(i, k) = fits.mu1[f][k]->predict(xs_all.row(i));
        fits.e_hat(i, k) = fits.propensity[f][k].predict(xs_all.row(i));
      }
    }
  }

  // Projection stage: for fold f, regress the (globally out-of-fold) contrast
  // predictions of the training units on their common covariates.
  const MatrixXd x_common = select_columns(table.x, spec.intersection);
  const ProjectionMode mode = spec.intersection.size() <= 3 ? ProjectionMode::Ols
                                                            : ProjectionMode::Knn;
  const MatrixXd tau_all = fits.mu1_hat - fits.mu0_hat;
  for (int f = 0; f < folds; ++f) {
    const auto train = rows_where(fits.fold_assignment, f, false);
    fits.proj[f].resize(K);
    const MatrixXd xc_tr = take_rows(x_common, train);
    for (int k = 0; k < K; ++k)
      fits.proj[f][k] = project_onto_common(take(tau_all.col(k), train), xc_tr, mode, k_nn);
  }
  return fits;
}

ContrastPanel make_contrast_panel(const ObservationTable& table,
                                  const AdjustmentSpec& spec, const NuisanceFits& fits) {
  const Eigen::Index n = table.n();
  const int K = spec.num_sets();
  ContrastPanel panel;
  panel.tau_hat = fits.mu1_hat - fits.mu0_hat;
  panel.tau_aipw.resize(n, K);
  panel.proj_tau.resize(n, K);
  const MatrixXd x_common = select_columns(table.x, spec.intersection);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int f = fits.fold_assignment[i];
    for (int k = 0; k < K; ++k) {
      const double e = fits.e_hat(i, k);
      const double m0 = fits.mu0_hat(i, k), m1 = fits.mu1_hat(i, k);
      panel.tau_aipw(i, k) = (m1 - m0) + table.a[i] * (table.y[i] - m1) / e -
                             (1.0 - table.a[i]) * (table.y[i] - m0) / (1.0 - e);
      panel.proj_tau(i, k) = fits.proj[f][k]->predict(x_common.row(i));
    }
  }
  panel.g_hat.resize(n, K - 1);
  for (int k = 1; k < K; ++k)
    panel.g_hat.col(k - 1) = panel.proj_tau.col(0) - panel.proj_tau.col(k);
  panel.validate(n);
  return panel;
}

}  // namespace adjrobust
