#pragma once

// Bounded Levenberg-Marquardt with forward-difference Jacobians.
//
// Minimizes |r(x)|^2 subject to lower <= x <= upper. Trial steps are clipped
// to the box and passed through an optional projection (used to renormalize
// quaternions); a step is accepted only if it lowers the cost.

#include <Eigen/Core>

#include <functional>
#include <limits>

namespace supertoroid {

struct BoundedLsqProblem {
  /// Fills `residuals`; its size is fixed by the first call.
  std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& residuals)> residuals;
  /// Applied to every trial point after clipping.
  std::function<void(Eigen::VectorXd& x)> project;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  /// Finite-difference step for parameter k is fd_rel * scale[k].
  Eigen::VectorXd scale;
  double fd_rel = 1e-7;
};

struct LmOptions {
  int max_iters = 200;
  /// Stop when an accepted step lowers the cost by less than tol * cost.
  double tol = 1e-10;
  double initial_damping = 1e-3;
  double max_damping = 1e12;
};

struct LmResult {
  Eigen::VectorXd x;
  double initial_cost = std::numeric_limits<double>::infinity();
  double final_cost = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

LmResult minimize_bounded_lsq(const BoundedLsqProblem& problem, Eigen::VectorXd x0,
                              const LmOptions& options = {});

}  // namespace supertoroid
