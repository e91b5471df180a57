#include "dvsg/detail/bfgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dvsg/errors.hpp"

namespace dvsg::detail {

namespace {

double safe_eval(const Objective& objective, const Vector& x, Vector& grad) {
  try {
    const double v = objective(x, grad);
    if (!std::isfinite(v) || !grad.allFinite()) return std::numeric_limits<double>::infinity();
    return v;
  } catch (const dvsg::Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

BfgsResult bfgs_minimize(const Objective& objective, Vector x0, const BfgsOptions& opts) {
  const Eigen::Index n = x0.size();
  BfgsResult res;
  res.x = std::move(x0);
  res.gradient = Vector::Zero(n);
  res.value = safe_eval(objective, res.x, res.gradient);
  if (!std::isfinite(res.value)) throw InvalidArgument("BFGS started outside the objective domain");
  res.gradient_norm = res.gradient.cwiseAbs().maxCoeff();

  Matrix hinv = Matrix::Identity(n, n);
  Vector trial_grad(n);
  for (; res.iterations < opts.max_iterations; ++res.iterations) {
    if (res.gradient_norm <= opts.gradient_tolerance) {
      res.converged = true;
      return res;
    }
    Vector dir = -hinv * res.gradient;
    double slope = dir.dot(res.gradient);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      dir = -res.gradient;
      slope = dir.dot(res.gradient);
    }

    double step = 1.0;
    double trial_value = std::numeric_limits<double>::infinity();
    Vector trial_x;
    bool accepted = false;
    const double noise = opts.value_noise * std::max(1.0, std::abs(res.value));
    for (int k = 0; k < opts.max_backtracks; ++k, step *= 0.5) {
      trial_x = res.x + step * dir;
      trial_value = safe_eval(objective, trial_x, trial_grad);
      if (trial_value <= res.value + opts.armijo * step * slope) {
        accepted = true;
        break;
      }
      if (std::isfinite(trial_value) && trial_value <= res.value + noise) {
        const double trial_slope = trial_grad.dot(dir);
        if (trial_slope >= opts.curvature * slope && trial_slope <= (2.0 * opts.armijo - 1.0) * slope) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      // A steepest-descent retry before giving up on a stale curvature model.
      if (!hinv.isIdentity()) {
        hinv.setIdentity();
        continue;
      }
      break;
    }

    const Vector s = trial_x - res.x;
    const Vector y = trial_grad - res.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      if (res.iterations == 0 || hinv.isIdentity()) hinv *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Matrix ident = Matrix::Identity(n, n);
      hinv = (ident - rho * s * y.transpose()) * hinv * (ident - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    res.x = std::move(trial_x);
    res.value = trial_value;
    res.gradient = trial_grad;
    res.gradient_norm = res.gradient.cwiseAbs().maxCoeff();
  }
  res.converged = res.gradient_norm <= opts.gradient_tolerance;
  return res;
}

Vector softmax(const Vector& theta) {
  const double top = theta.maxCoeff();
  Vector p = (theta.array() - top).exp().matrix();
  return p / p.sum();
}

Vector softmax_pullback(const Vector& p, const Vector& grad_p) {
  return p.cwiseProduct((grad_p.array() - p.dot(grad_p)).matrix());
}

}  // namespace dvsg::detail
