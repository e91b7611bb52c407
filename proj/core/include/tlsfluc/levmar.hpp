#pragma once

#include <Eigen/Dense>
#include <functional>

namespace tlsfluc {

struct LevmarOptions {
  int max_iterations = 300;
  double ftol = 1e-12;            // relative cost reduction
  double xtol = 1e-13;            // relative step size
  double initial_lambda = 1e-3;
  double jacobian_rel_step = 3e-6;  // central differences
  // Absolute cost below which the fit counts as exact (0 disables). Callers
  // set this from the data scale so zero-residual fits terminate instead of
  // chasing rounding dust.
  double cost_floor = 0.0;
};

struct LevmarResult {
  Eigen::VectorXd x;
  bool converged = false;
  int iterations = 0;
  double rss = 0.0;       // sum of squared residuals at x
  Eigen::MatrixXd jtj;    // J^T J at x, for covariance estimates
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

// Dense Levenberg-Marquardt with optional box projection. Steps solve
// (J^T J + lambda diag(J^T J)) dx = J^T r, so the damping is invariant under
// per-parameter rescaling. The Jacobian is computed by central differences
// unless an analytic one is supplied; sharply scaled parameters (such as a
// resonance frequency) need the analytic form for a trustworthy covariance.
LevmarResult levmar(const ResidualFn& residuals, Eigen::VectorXd x0,
                    const LevmarOptions& opts = {},
                    const Eigen::VectorXd* lower = nullptr,
                    const Eigen::VectorXd* upper = nullptr,
                    const JacobianFn* jacobian = nullptr);

// sigma^2 (J^T J)^{-1} with sigma^2 = rss / (n_residuals - n_params); falls
// back to a pseudo-inverse when J^T J is singular.
Eigen::MatrixXd covariance_from_jtj(const Eigen::MatrixXd& jtj, double rss,
                                    int n_residuals);

}  // namespace tlsfluc
