#include "adjrobust/ar_lm.hpp"

#include <cmath>

#include "adjrobust/rng.hpp"
#include "adjrobust/stats.hpp"

namespace adjrobust {

MatrixXd center_columns(const MatrixXd& x) {
  MatrixXd out = x;
  for (int pass = 0; pass < 8; ++pass) {
    const Eigen::RowVectorXd m = out.colwise().mean();
    if ((m.array() == 0.0).all()) break;
    const MatrixXd next = out.rowwise() - m;
    if ((next.array() == out.array()).all()) break;
    out = next;
  }
  return out;
}

namespace {

// One lm-path evaluation. Returns false (rank-deficient design) or fills the
// outcome; `strict` switches between throwing (primary fit) and the fast
// failure path used by bootstrap resamples.
struct LmFit {
  TiltStatus status = TiltStatus::Infeasible;
  double estimate = 0.0;
  VectorXd lambda, weights;
  VectorXd proj_a, proj_b_flat;      // per-set projection coefficients
  std::vector<VectorXd> proj_b;      // per set, |S_cap|
  MatrixXd x_common;                 // centered common covariates
};

bool lm_point(const VectorXd& y, const VectorXd& a, const MatrixXd& x,
              const AdjustmentSpec& spec, bool strict, LmFit& fit) {
  const Eigen::Index n = y.size();
  const int K = spec.num_sets();
  const MatrixXd xc = center_columns(x);

  // Interacted OLS per set via normal equations; LLT failure = rank trouble.
  std::vector<VectorXd> tau_star(K);
  for (int k = 0; k < K; ++k) {
    const auto& set = spec.sets[k];
    const auto d = static_cast<Eigen::Index>(set.size());
    MatrixXd design(n, 2 * d + 2);
    design.col(0).setOnes();
    for (Eigen::Index j = 0; j < d; ++j) design.col(1 + j) = xc.col(set[j]);
    design.col(d + 1) = a;
    for (Eigen::Index j = 0; j < d; ++j)
      design.col(d + 2 + j) = design.col(1 + j).cwiseProduct(a);

    const MatrixXd xtx = design.transpose() * design;
    Eigen::LLT<MatrixXd> llt(xtx);
    VectorXd coef;
    if (llt.info() == Eigen::Success) coef = llt.solve(design.transpose() * y);
    if (llt.info() != Eigen::Success || !coef.allFinite() ||
        xtx.determinant() <= 0.0) {
      if (strict)
        throw Error(ErrorCode::RankDeficient,
                    "interacted design for set " + std::to_string(k + 1) +
                    " is rank deficient");
      return false;
    }
    VectorXd t = VectorXd::Constant(n, coef[d + 1]);
    for (Eigen::Index j = 0; j < d; ++j) t += coef[d + 2 + j] * xc.col(set[j]);
    tau_star[k] = std::move(t);
  }

  // Projection of each fitted contrast onto [1, X_common].
  const auto m = static_cast<Eigen::Index>(spec.intersection.size());
  fit.x_common.resize(n, m);
  for (Eigen::Index j = 0; j < m; ++j) fit.x_common.col(j) = xc.col(spec.intersection[j]);
  MatrixXd pd(n, m + 1);
  pd.col(0).setOnes();
  pd.rightCols(m) = fit.x_common;
  const MatrixXd ptp = pd.transpose() * pd;
  Eigen::LLT<MatrixXd> pllt(ptp);
  if (pllt.info() != Eigen::Success) {
    if (strict)
      throw Error(ErrorCode::RankDeficient, "projection design is rank deficient");
    return false;
  }
  fit.proj_a.resize(K);
  fit.proj_b.assign(K, VectorXd());
  for (int k = 0; k < K; ++k) {
    const VectorXd coef = pllt.solve(pd.transpose() * tau_star[k]);
    if (!coef.allFinite()) {
      if (strict)
        throw Error(ErrorCode::RankDeficient, "projection design is rank deficient");
      return false;
    }
    fit.proj_a[k] = coef[0];
    fit.proj_b[k] = coef.tail(m);
  }

  MatrixXd g(n, K - 1);
  for (int k = 1; k < K; ++k)
    g.col(k - 1) = VectorXd::Constant(n, fit.proj_a[0] - fit.proj_a[k]) +
                   fit.x_common * (fit.proj_b[0] - fit.proj_b[k]);

  TiltSolution tilt = solve_tilt(g);
  fit.status = tilt.status;
  if (tilt.status != TiltStatus::Converged) return true;
  fit.lambda = std::move(tilt.lambda);
  fit.weights = std::move(tilt.weights);
  fit.estimate = fit.proj_a[0] +
                 fit.proj_b[0].dot(fit.x_common.transpose() * fit.weights) /
                     static_cast<double>(n);
  return true;
}

// Gathers a bootstrap resample (with replacement) drawn from the stream
// keyed by (seed, replicate, purpose=9).
void resample(const ObservationTable& table, std::uint64_t seed, std::uint64_t b,
              VectorXd& y, VectorXd& a, MatrixXd& x) {
  const Eigen::Index n = table.n();
  const CounterRng gen(seed, b, /*purpose=*/9);
  y.resize(n);
  a.resize(n);
  x.resize(n, table.p());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = static_cast<Eigen::Index>(
        gen.below(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(n)));
    y[i] = table.y[j];
    a[i] = table.a[j];
    x.row(i) = table.x.row(j);
  }
}

double bootstrap_variance_around(const ObservationTable& table,
                                 const AdjustmentSpec& spec, int B,
                                 std::uint64_t seed, double center) {
  if (B < 100)
    throw Error(ErrorCode::InvalidValue, "bootstrap needs at least 100 resamples");
  VectorXd yb;
  VectorXd ab;
  MatrixXd xb;
  LmFit fitb;
  double sumsq = 0.0;
  int used = 0, skipped = 0;
  for (int b = 0; b < B; ++b) {
    resample(table, seed, static_cast<std::uint64_t>(b), yb, ab, xb);
    if (!lm_point(yb, ab, xb, spec, /*strict=*/false, fitb) ||
        fitb.status != TiltStatus::Converged) {
      ++skipped;
      continue;
    }
    const double dev = fitb.estimate - center;
    sumsq += dev * dev;
    ++used;
  }
  if (skipped > 0.05 * B)
    throw Error(ErrorCode::TooManyDegenerateResamples,
                std::to_string(skipped) + " of " + std::to_string(B) +
                " bootstrap resamples were degenerate");
  return static_cast<double>(table.n()) * sumsq / static_cast<double>(used);
}

}  // namespace

ArOutcome ar_estimate_lm(const ObservationTable& table, const AdjustmentSpec& spec,
                         const ArLmOptions& opts) {
  spec.validate(table.p());
  LmFit fit;
  lm_point(table.y, table.a, table.x, spec, /*strict=*/true, fit);

  ArOutcome out;
  out.tilt_status = fit.status;
  if (fit.status != TiltStatus::Converged) return out;

  const Eigen::Index n = table.n();
  const int K = spec.num_sets();
  AREstimate& est = out.estimate;
  est.method = ArMethod::LinearModel;
  est.level = 1.0 - opts.alpha;
  est.estimate = fit.estimate;
  est.lambda = fit.lambda;
  est.weights = fit.weights;
  est.bias_correction = 0.0;
  est.nu = VectorXd::Zero(K);
  est.nu[0] = 1.0;
  est.per_set_reweighted.resize(K);
  const VectorXd wx = fit.x_common.transpose() * fit.weights / static_cast<double>(n);
  for (int k = 0; k < K; ++k)
    est.per_set_reweighted[k] = fit.proj_a[k] + fit.proj_b[k].dot(wx);

  if (opts.with_variance) {
    est.variance = bootstrap_variance_around(table, spec, opts.bootstrap, opts.seed,
                                             fit.estimate);
    const double half = z_two_sided(opts.alpha) * std::sqrt(est.variance / static_cast<double>(n));
    est.ci_lo = est.estimate - half;
    est.ci_hi = est.estimate + half;
  } else {
    est.variance = 0.0;
    est.ci_lo = est.ci_hi = est.estimate;
  }
  return out;
}

double bootstrap_variance(const ObservationTable& table, const AdjustmentSpec& spec,
                          int B, std::uint64_t seed) {
  LmFit fit;
  lm_point(table.y, table.a, table.x, spec, /*strict=*/true, fit);
  if (fit.status != TiltStatus::Converged)
    throw Error(ErrorCode::InvalidValue, "bootstrap_variance: tilt did not converge");
  return bootstrap_variance_around(table, spec, B, seed, fit.estimate);
}

}  // namespace adjrobust
