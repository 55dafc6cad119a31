#pragma once

#include <Eigen/Core>
#include <functional>

namespace skewsphere {

struct SimplexOptions {
  int max_iters = 5000;
  double x_tol = 1e-8;      // largest vertex distance from the best vertex (sup norm)
  double initial_step = 0.25;
  int restarts = 2;         // fresh simplices built around the optimum after convergence
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iters = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead minimization with dimension-adaptive coefficients. The
/// objective may return +inf to reject a point.
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective, const Eigen::VectorXd& x0,
                          const SimplexOptions& options);

}  // namespace skewsphere
