#pragma once

#include <functional>

#include "dvsg/types.hpp"

namespace dvsg::detail {

// Value and gradient of a smooth objective. May return +inf (or throw
// dvsg::Error) outside its domain; the line search then backtracks.
using Objective = std::function<double(const Vector& x, Vector& grad)>;

struct BfgsOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-10;  // on ||grad||_inf
  double armijo = 1e-4;
  // Approximate Wolfe fallback: once the decrease is below rounding, a step is
  // accepted if the value rises by at most value_noise * max(1, |f|) and the
  // directional derivative lies in [curvature, 2 armijo - 1] times the initial one.
  double value_noise = 1e-12;
  double curvature = 0.9;
  int max_backtracks = 60;
};

struct BfgsResult {
  Vector x;
  double value = 0.0;
  Vector gradient;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Inverse-Hessian BFGS with Armijo backtracking (approximate Wolfe near the
// optimum). The update is skipped when the
// curvature condition fails; the approximation is reset to the identity when a
// search direction stops being a descent direction.
BfgsResult bfgs_minimize(const Objective& objective, Vector x0, const BfgsOptions& opts = {});

// softmax(theta)_i = exp(theta_i) / sum_j exp(theta_j), computed stably.
Vector softmax(const Vector& theta);

// Pullback of a gradient through softmax: (J^T g)_k = p_k (g_k - p.g).
Vector softmax_pullback(const Vector& p, const Vector& grad_p);

}  // namespace dvsg::detail
