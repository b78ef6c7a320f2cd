#pragma once

#include "adjrobust/nuisance.hpp"
#include "adjrobust/tilt.hpp"
#include "adjrobust/types.hpp"

namespace adjrobust {

// Doubly-robust pseudo-outcome:
//   (mu1 - mu0) + a (y - mu1)/e - (1-a) (y - mu0)/(1-e),  e in (0,1).
double aipw_pseudo(double y, double a, double mu0, double mu1, double e);

// Combination coefficients: nu_{2:K} solves the weighted Gram system
//   (P_n[w g g^T]) nu_{2:K} = P_n[w g (tau_s1 - tau1_r)],  nu_1 = 1 - sum.
// tau_s1 is the per-unit plug-in contrast for set 1 and tau1_r the reweighted
// AIPW estimate for set 1. Throws SingularGram (with a condition estimate)
// when the weighted Gram matrix is numerically singular.
VectorXd compute_nu(const VectorXd& weights, const MatrixXd& g_hat,
                    const VectorXd& tau_s1, double tau1_r);

// Debiasing term:
//   B_n = lambda^T P_n[ w (delta_{2:K} - g) (sum_k nu_k proj_k - tau1_r) ],
// with delta column k-1 the AIPW contrast of set 1 minus set k.
double bias_correction(const VectorXd& weights, const VectorXd& lambda,
                       const MatrixXd& g_hat, const MatrixXd& delta_aipw,
                       const MatrixXd& proj_tau, const VectorXd& nu, double tau1_r);

// Empirical variance of the per-unit score
//   w_i (sum_k nu_k aipw_{ik} - est)
//     + lambda^T w_i (delta_i - g_i) (sum_k nu_k proj_{ik} - est).
double plugin_variance(const VectorXd& weights, const VectorXd& lambda,
                       const MatrixXd& g_hat, const MatrixXd& tau_aipw,
                       const MatrixXd& delta_aipw, const MatrixXd& proj_tau,
                       const VectorXd& nu, double ar_estimate);

// An infeasible tilt is an outcome, not an exception: `estimate` is only
// meaningful when tilt_status == Converged.
struct ArOutcome {
  TiltStatus tilt_status = TiltStatus::Infeasible;
  AREstimate estimate;
  bool ok() const { return tilt_status == TiltStatus::Converged; }
};

// Steps 2-8 on an assembled panel (also used by tests that inject externally
// fitted nuisances).
ArOutcome ar_estimate_from_panel(const ContrastPanel& panel, double alpha);

// Full Algorithm-1 path on cross-fitted nuisances.
ArOutcome ar_estimate_aipw(const ObservationTable& table, const AdjustmentSpec& spec,
                           const NuisanceFits& nuisances, double alpha);

}  // namespace adjrobust
