#include "adjrobust/tilt.hpp"

#include <cmath>

namespace adjrobust {

namespace {

// log L(lambda) and the softmax-normalized gradient/hessian:
//   phi = log((1/n) sum exp(t_i)),  grad_phi = sum p_i g_i,
//   hess_ratio = Hess(L)/L = sum p_i g_i g_i^T,  p_i = softmax(t_i).
struct LogEval {
  double log_value;
  VectorXd grad_phi;
  MatrixXd hess_ratio;
};

double log_value_only(const MatrixXd& g, const VectorXd& lambda) {
  const VectorXd t = g * lambda;
  const double m = t.maxCoeff();
  const double s = (t.array() - m).exp().sum();
  return m + std::log(s / static_cast<double>(g.rows()));
}

LogEval log_eval(const MatrixXd& g, const VectorXd& lambda) {
  const Eigen::Index n = g.rows(), d = g.cols();
  const VectorXd t = g * lambda;
  const double m = t.maxCoeff();
  VectorXd e = (t.array() - m).exp();
  const double s = e.sum();
  LogEval out;
  out.log_value = m + std::log(s / static_cast<double>(n));
  e /= s;  // softmax weights
  out.grad_phi = g.transpose() * e;
  out.hess_ratio.setZero(d, d);
  out.hess_ratio = g.transpose() * (g.array().colwise() * e.array()).matrix();
  return out;
}

}  // namespace

TiltObjective tilt_objective(const MatrixXd& g_hat, const VectorXd& lambda) {
  if (lambda.size() != g_hat.cols())
    throw Error(ErrorCode::DimensionMismatch, "tilt_objective: lambda has wrong length");
  const LogEval ev = log_eval(g_hat, lambda);
  const double value = std::exp(ev.log_value);
  TiltObjective obj;
  obj.value = value;
  obj.gradient = value * ev.grad_phi;
  obj.hessian = value * ev.hess_ratio;
  return obj;
}

TiltSolution solve_tilt(const MatrixXd& g_hat, const TiltOptions& opts) {
  const Eigen::Index n = g_hat.rows(), d = g_hat.cols();
  if (!g_hat.allFinite())
    throw Error(ErrorCode::InvalidValue, "solve_tilt: non-finite g");
  if (n < d + 1)
    throw Error(ErrorCode::InvalidValue, "solve_tilt: need n >= K");

  TiltSolution sol;
  sol.lambda = VectorXd::Zero(d);
  const double runaway_floor = std::max(1e-12, 0.5 / static_cast<double>(n));

  LogEval ev = log_eval(g_hat, sol.lambda);
  for (int it = 0; it < opts.max_iter; ++it) {
    sol.iterations = it;
    const double value = std::exp(ev.log_value);
    sol.grad_norm = (value * ev.grad_phi).lpNorm<Eigen::Infinity>();

    if (value < runaway_floor) {  // objective infimum 0: no interior minimizer
      sol.status = TiltStatus::Infeasible;
      return sol;
    }
    if (sol.grad_norm <= opts.tol) {
      sol.status = TiltStatus::Converged;
      sol.weights = ((g_hat * sol.lambda).array() - ev.log_value).exp();
      return sol;
    }

    // Newton direction on L: -(Hess/L)^{-1} (grad/L); ridge retry if singular.
    MatrixXd h = ev.hess_ratio;
    Eigen::LDLT<MatrixXd> ldlt(h);
    VectorXd dir = -ldlt.solve(ev.grad_phi);
    if (ldlt.info() != Eigen::Success || !dir.allFinite() ||
        ev.grad_phi.dot(dir) >= 0.0) {
      h.diagonal().array() += 1e-12;
      Eigen::LDLT<MatrixXd> retry(h);
      dir = -retry.solve(ev.grad_phi);
      if (retry.info() != Eigen::Success || !dir.allFinite() ||
          ev.grad_phi.dot(dir) >= 0.0) {
        const double cond = h.norm() > 0 ? h.norm() / std::max(h.diagonal().minCoeff(), 1e-300)
                                         : 0.0;
        throw Error(ErrorCode::SingularHessian,
                    "tilt Hessian singular (condition estimate " + std::to_string(cond) +
                    "); g is degenerate");
      }
    }

    // Armijo on the log scale: log L(x+sd) <= log(L + c s grad.dir)
    //                                      = log L + log1p(c s grad.dir / L).
    const double slope = ev.grad_phi.dot(dir);  // (grad.dir)/L < 0
    double step = 1.0;
    VectorXd next = sol.lambda + dir;
    double next_log = log_value_only(g_hat, next);
    for (int ls = 0; ls < 60; ++ls) {
      const double rhs_ratio = std::max(opts.armijo * step * slope, -0.999999999999);
      if (next_log <= ev.log_value + std::log1p(rhs_ratio)) break;
      step *= 0.5;
      next = sol.lambda + step * dir;
      next_log = log_value_only(g_hat, next);
    }
    sol.lambda = next;
    if (sol.lambda.norm() > opts.lambda_bound) {
      sol.status = TiltStatus::Infeasible;
      sol.iterations = it + 1;
      return sol;
    }
    ev = log_eval(g_hat, sol.lambda);
  }
  sol.iterations = opts.max_iter;
  const double value = std::exp(ev.log_value);
  sol.grad_norm = (value * ev.grad_phi).lpNorm<Eigen::Infinity>();
  sol.status = value < runaway_floor ? TiltStatus::Infeasible : TiltStatus::MaxIterations;
  return sol;
}

}  // namespace adjrobust
