#include "supertoroid/optimizer.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace supertoroid {

namespace {

void clip_and_project(const BoundedLsqProblem& problem, Eigen::VectorXd& x) {
  x = x.cwiseMax(problem.lower).cwiseMin(problem.upper);
  if (problem.project) problem.project(x);
}

double cost_of(const Eigen::VectorXd& r) {
  const double c = r.squaredNorm();
  return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
}

}  // namespace

LmResult minimize_bounded_lsq(const BoundedLsqProblem& problem, Eigen::VectorXd x0,
                              const LmOptions& options) {
  const Eigen::Index n = x0.size();
  LmResult result;
  clip_and_project(problem, x0);
  result.x = x0;

  Eigen::VectorXd r;
  problem.residuals(result.x, r);
  ++result.evaluations;
  double cost = cost_of(r);
  result.initial_cost = cost;
  result.final_cost = cost;
  if (!std::isfinite(cost)) return result;
  if (cost == 0.0) {
    result.converged = true;
    return result;
  }

  Eigen::MatrixXd jac(r.size(), n);
  Eigen::VectorXd r_step(r.size());
  double damping = options.initial_damping;

  for (int iter = 0; iter < options.max_iters; ++iter) {
    result.iterations = iter + 1;

    // Forward differences, stepping inward at an upper bound.
    for (Eigen::Index k = 0; k < n; ++k) {
      Eigen::VectorXd xs = result.x;
      double h = problem.fd_rel * problem.scale[k];
      if (xs[k] + h > problem.upper[k]) h = -h;
      xs[k] += h;
      problem.residuals(xs, r_step);
      ++result.evaluations;
      jac.col(k) = (r_step - r) / h;
    }

    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    const Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-12 * std::max(1.0, jtj.diagonal().maxCoeff()));

    bool accepted = false;
    while (damping <= options.max_damping) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal() += damping * diag;
      const Eigen::VectorXd step = lhs.ldlt().solve(-grad);
      Eigen::VectorXd trial = result.x + step;
      clip_and_project(problem, trial);
      problem.residuals(trial, r_step);
      ++result.evaluations;
      const double trial_cost = cost_of(r_step);
      if (trial_cost < cost) {
        const double decrease = cost - trial_cost;
        result.x = trial;
        r = r_step;
        cost = trial_cost;
        damping = std::max(damping * 0.3, 1e-12);
        accepted = true;
        if (decrease <= options.tol * cost || cost == 0.0) {
          result.converged = true;
        }
        break;
      }
      damping *= 10.0;
    }
    result.final_cost = cost;
    if (!accepted) {
      // No descent direction left at any damping: a local minimum to
      // working precision.
      result.converged = true;
      break;
    }
    if (result.converged) break;
  }
  return result;
}

}  // namespace supertoroid
