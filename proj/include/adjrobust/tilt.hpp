#pragma once

#include "adjrobust/types.hpp"

namespace adjrobust {

struct TiltObjective {
  double value;      // (1/n) sum exp(g_i . lambda)
  VectorXd gradient; // (1/n) sum exp(g_i . lambda) g_i
  MatrixXd hessian;  // (1/n) sum exp(g_i . lambda) g_i g_i^T
};

// Value, gradient and Hessian of the empirical tilt objective. Exponents are
// shifted by their maximum internally and the shift compensated in the
// outputs, so moderate overflow in g.lambda does not poison the ratios.
TiltObjective tilt_objective(const MatrixXd& g_hat, const VectorXd& lambda);

struct TiltOptions {
  double tol = 1e-10;       // sup-norm gradient tolerance
  int max_iter = 200;
  double lambda_bound = 50.0;  // ||lambda||_2 beyond this = infeasible
  double armijo = 1e-4;
};

// Damped Newton from lambda = 0 with Armijo backtracking (halving) on the
// log objective. Infeasible when ||lambda|| exceeds the bound or the
// objective drops below max(1e-12, 1/(2n)): any interior minimizer satisfies
// L* >= 1/n (the first-order condition forces some g_i.lambda >= 0), so an
// observed value under 1/(2n) proves the infimum-0 runaway of a violated
// sign condition. Weights are exp(g.lambda) normalized to mean one.
TiltSolution solve_tilt(const MatrixXd& g_hat, const TiltOptions& opts = {});

}  // namespace adjrobust
