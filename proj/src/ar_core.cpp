#include "adjrobust/ar_core.hpp"

#include <cmath>

#include "adjrobust/stats.hpp"

namespace adjrobust {

double aipw_pseudo(double y, double a, double mu0, double mu1, double e) {
  if (!(e > 0.0 && e < 1.0))
    throw Error(ErrorCode::PropensityOutOfRange,
                "propensity " + std::to_string(e) + " outside (0,1)");
  return (mu1 - mu0) + a * (y - mu1) / e - (1.0 - a) * (y - mu0) / (1.0 - e);
}

VectorXd compute_nu(const VectorXd& weights, const MatrixXd& g_hat,
                    const VectorXd& tau_s1, double tau1_r) {
  const Eigen::Index n = g_hat.rows(), d = g_hat.cols();
  const double dn = static_cast<double>(n);
  const MatrixXd wg = g_hat.array().colwise() * weights.array();
  const MatrixXd gram = wg.transpose() * g_hat / dn;
  const VectorXd rhs = wg.transpose() * (tau_s1.array() - tau1_r).matrix() / dn;

  VectorXd nu_tail;
  const Eigen::JacobiSVD<MatrixXd> svd(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(d - 1);
  if (smax == 0.0) {
    // g identically zero (degenerate set duplication): zero right-hand side,
    // so nu collapses onto set 1.
    nu_tail = VectorXd::Zero(d);
  } else if (!(smin > 0.0) || smax / smin > 1e12) {
    throw Error(ErrorCode::SingularGram,
                "weighted Gram matrix singular (condition " +
                std::to_string(smax / std::max(smin, 1e-300)) + ")");
  } else {
    nu_tail = svd.solve(rhs);
  }

  VectorXd nu(d + 1);
  nu[0] = 1.0 - nu_tail.sum();
  nu.tail(d) = nu_tail;
  return nu;
}

double bias_correction(const VectorXd& weights, const VectorXd& lambda,
                       const MatrixXd& g_hat, const MatrixXd& delta_aipw,
                       const MatrixXd& proj_tau, const VectorXd& nu, double tau1_r) {
  const Eigen::Index n = g_hat.rows();
  const VectorXd comb = proj_tau * nu;  // sum_k nu_k proj_k per unit
  const VectorXd scale =
      weights.array() * (comb.array() - tau1_r);  // w_i (comb_i - tau1_r)
  const VectorXd moment =
      (delta_aipw - g_hat).transpose() * scale / static_cast<double>(n);
  return lambda.dot(moment);
}

double plugin_variance(const VectorXd& weights, const VectorXd& lambda,
                       const MatrixXd& g_hat, const MatrixXd& tau_aipw,
                       const MatrixXd& delta_aipw, const MatrixXd& proj_tau,
                       const VectorXd& nu, double ar_estimate) {
  const VectorXd comb_aipw = tau_aipw * nu;
  const VectorXd comb_proj = proj_tau * nu;
  const VectorXd lam_part = (delta_aipw - g_hat) * lambda;
  const VectorXd score =
      weights.array() * ((comb_aipw.array() - ar_estimate) +
                         lam_part.array() * (comb_proj.array() - ar_estimate));
  return empirical_variance(score);
}

ArOutcome ar_estimate_from_panel(const ContrastPanel& panel, double alpha) {
  const Eigen::Index n = panel.tau_aipw.rows();
  const int K = static_cast<int>(panel.tau_aipw.cols());
  const double dn = static_cast<double>(n);

  ArOutcome out;
  TiltSolution tilt = solve_tilt(panel.g_hat);
  out.tilt_status = tilt.status;
  if (tilt.status != TiltStatus::Converged) return out;

  AREstimate& est = out.estimate;
  est.method = ArMethod::AipwCrossfit;
  est.level = 1.0 - alpha;
  est.lambda = tilt.lambda;
  est.weights = tilt.weights;

  est.per_set_reweighted = panel.tau_aipw.transpose() * tilt.weights / dn;
  const double tau1_r = est.per_set_reweighted[0];
  est.nu = compute_nu(tilt.weights, panel.g_hat, panel.tau_hat.col(0), tau1_r);

  MatrixXd delta_aipw(n, K - 1);
  for (int k = 1; k < K; ++k)
    delta_aipw.col(k - 1) = panel.tau_aipw.col(0) - panel.tau_aipw.col(k);
  est.bias_correction = bias_correction(tilt.weights, tilt.lambda, panel.g_hat,
                                        delta_aipw, panel.proj_tau, est.nu, tau1_r);
  est.estimate = est.nu.dot(est.per_set_reweighted) + est.bias_correction;
  est.variance = plugin_variance(tilt.weights, tilt.lambda, panel.g_hat,
                                 panel.tau_aipw, delta_aipw, panel.proj_tau,
                                 est.nu, est.estimate);
  const double half = z_two_sided(alpha) * std::sqrt(est.variance / dn);
  est.ci_lo = est.estimate - half;
  est.ci_hi = est.estimate + half;
  return out;
}

ArOutcome ar_estimate_aipw(const ObservationTable& table, const AdjustmentSpec& spec,
                           const NuisanceFits& nuisances, double alpha) {
  return ar_estimate_from_panel(make_contrast_panel(table, spec, nuisances), alpha);
}

}  // namespace adjrobust
