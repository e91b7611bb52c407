#include "tlsfluc/levmar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tlsfluc/errors.hpp"

namespace tlsfluc {

namespace {

void project(Eigen::VectorXd& x, const Eigen::VectorXd* lower,
             const Eigen::VectorXd* upper) {
  if (lower != nullptr) x = x.cwiseMax(*lower);
  if (upper != nullptr) x = x.cwiseMin(*upper);
}

Eigen::MatrixXd numeric_jacobian(const ResidualFn& residuals,
                                 const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& r0, double rel_step,
                                 const Eigen::VectorXd* lower,
                                 const Eigen::VectorXd* upper) {
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(r0.size());
  Eigen::MatrixXd jac(m, n);
  for (int j = 0; j < n; ++j) {
    double h = rel_step * std::max(std::abs(x[j]), 1e-12);
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[j] += h;
    xm[j] -= h;
    // Stay one-sided at an active bound.
    bool clipped = false;
    if (lower != nullptr && xm[j] < (*lower)[j]) { xm[j] = x[j]; clipped = true; }
    if (upper != nullptr && xp[j] > (*upper)[j]) { xp[j] = x[j]; clipped = true; }
    const double denom = xp[j] - xm[j];
    if (denom == 0.0) {
      jac.col(j).setZero();
      continue;
    }
    if (clipped) {
      const Eigen::VectorXd rp = (xp[j] == x[j]) ? r0 : residuals(xp);
      const Eigen::VectorXd rm = (xm[j] == x[j]) ? r0 : residuals(xm);
      jac.col(j) = (rp - rm) / denom;
    } else {
      jac.col(j) = (residuals(xp) - residuals(xm)) / denom;
    }
  }
  return jac;
}

}  // namespace

LevmarResult levmar(const ResidualFn& residuals, Eigen::VectorXd x0,
                    const LevmarOptions& opts, const Eigen::VectorXd* lower,
                    const Eigen::VectorXd* upper, const JacobianFn* jacobian) {
  project(x0, lower, upper);
  Eigen::VectorXd x = x0;
  Eigen::VectorXd r = residuals(x);
  double cost = r.squaredNorm();
  double lambda = opts.initial_lambda;

  LevmarResult result;
  result.x = x;
  result.rss = cost;

  // Below this the residual is rounding dust and further descent means nothing.
  const double cost_floor = std::max(opts.cost_floor, cost * 1e-24);
  const bool already_exact = cost <= cost_floor;
  if (already_exact) result.converged = true;

  auto compute_jacobian = [&](const Eigen::VectorXd& at, const Eigen::VectorXd& r_at) {
    if (jacobian != nullptr) return (*jacobian)(at);
    return numeric_jacobian(residuals, at, r_at, opts.jacobian_rel_step, lower, upper);
  };

  Eigen::MatrixXd jac;
  bool jac_fresh = false;
  int tiny_streak = 0;

  int iter = 0;
  for (; !already_exact && iter < opts.max_iterations; ++iter) {
    if (!jac_fresh) {
      jac = compute_jacobian(x, r);
      jac_fresh = true;
    }
    Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::VectorXd jtr = jac.transpose() * r;

    if (jtr.lpNorm<Eigen::Infinity>() <= 1e-300) {
      result.converged = true;
      break;
    }

    // Column scaling: parameters of wildly different sensitivity (a delay in
    // seconds against a frequency in Hz) otherwise push J^T J past double
    // precision. The damped system becomes A' + lambda I on unit-diagonal A'.
    const int np = static_cast<int>(x.size());
    Eigen::VectorXd scale(np);
    for (int d = 0; d < np; ++d) scale[d] = std::sqrt(std::max(jtj(d, d), 1e-300));
    Eigen::MatrixXd jtj_s(np, np);
    for (int i = 0; i < np; ++i) {
      for (int j = 0; j < np; ++j) jtj_s(i, j) = jtj(i, j) / (scale[i] * scale[j]);
    }
    const Eigen::VectorXd jtr_s = jtr.cwiseQuotient(scale);

    bool accepted = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd damped = jtj_s;
      for (int d = 0; d < np; ++d) damped(d, d) += lambda;
      Eigen::VectorXd dx = damped.ldlt().solve(jtr_s).cwiseQuotient(scale);
      if (!dx.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      Eigen::VectorXd x_try = x - dx;
      project(x_try, lower, upper);
      Eigen::VectorXd r_try = residuals(x_try);
      const double cost_try = r_try.squaredNorm();
      if (cost_try < cost) {
        const double reduction = (cost - cost_try) / std::max(cost, 1e-300);
        const double step = (x_try - x).cwiseQuotient(
            x.cwiseAbs().cwiseMax(1e-12)).lpNorm<Eigen::Infinity>();
        x = x_try;
        r = r_try;
        cost = cost_try;
        lambda = std::max(lambda * 0.3, 1e-12);
        jac_fresh = false;
        accepted = true;
        if (cost <= cost_floor || reduction < opts.ftol || step < opts.xtol) {
          result.converged = true;
        } else if (reduction < 1e4 * opts.ftol) {
          // A run of marginal improvements is numerical crawl at the optimum.
          if (++tiny_streak >= 3) result.converged = true;
        } else {
          tiny_streak = 0;
        }
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }

    if (!accepted) {
      // No downhill step exists at any damping: the current point is a local
      // minimum at numerical resolution.
      result.converged = true;
      break;
    }
    if (result.converged) break;
  }
  if (iter >= opts.max_iterations && !already_exact) result.converged = false;

  result.x = x;
  result.rss = cost;
  result.iterations = iter;
  if (!jac_fresh) jac = compute_jacobian(x, r);
  result.jtj = jac.transpose() * jac;
  return result;
}

Eigen::MatrixXd covariance_from_jtj(const Eigen::MatrixXd& jtj, double rss,
                                    int n_residuals) {
  const int n_params = static_cast<int>(jtj.rows());
  const int dof = std::max(n_residuals - n_params, 1);
  const double sigma2 = rss / static_cast<double>(dof);

  // Invert in column-scaled coordinates; see the solver above.
  Eigen::VectorXd scale(n_params);
  for (int d = 0; d < n_params; ++d) {
    scale[d] = std::sqrt(std::max(jtj(d, d), 1e-300));
  }
  Eigen::MatrixXd jtj_s(n_params, n_params);
  for (int i = 0; i < n_params; ++i) {
    for (int j = 0; j < n_params; ++j) {
      jtj_s(i, j) = jtj(i, j) / (scale[i] * scale[j]);
    }
  }

  Eigen::MatrixXd inv_s;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(jtj_s);
  bool ok = false;
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    inv_s = ldlt.solve(Eigen::MatrixXd::Identity(n_params, n_params));
    ok = inv_s.allFinite();
  }
  if (!ok) {
    // Pseudo-inverse fallback for singular fits (unidentifiable parameters).
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jtj_s,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double tol = 1e-14 * svd.singularValues().maxCoeff();
    Eigen::VectorXd inv_sv = svd.singularValues();
    for (int i = 0; i < inv_sv.size(); ++i) {
      inv_sv[i] = inv_sv[i] > tol ? 1.0 / inv_sv[i] : 0.0;
    }
    inv_s = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
  }

  Eigen::MatrixXd cov(n_params, n_params);
  for (int i = 0; i < n_params; ++i) {
    for (int j = 0; j < n_params; ++j) {
      cov(i, j) = sigma2 * inv_s(i, j) / (scale[i] * scale[j]);
    }
  }
  return cov;
}

}  // namespace tlsfluc
