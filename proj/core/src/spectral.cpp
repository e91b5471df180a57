#include "dvsg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dvsg/errors.hpp"
#include "dvsg/expm.hpp"

namespace dvsg {

namespace {

// Shifted inverse iteration toward the eigenvalue nearest `lambda`.
// `transpose` selects the left eigenvector.
Vector inverse_iterate(const Matrix& m, double lambda, Vector x, bool transpose, int steps) {
  const double shift = lambda + 1e-10 * scale_of(m);
  Matrix a = transpose ? Matrix(m.transpose()) : m;
  a.diagonal().array() -= shift;
  const Eigen::PartialPivLU<Matrix> lu(a);
  for (int k = 0; k < steps; ++k) {
    Vector y = lu.solve(x);
    if (!y.allFinite()) break;
    const double s = y.sum();
    if (s == 0.0) break;
    x = y / s;
  }
  return x;
}

double two_sided_rayleigh(const Matrix& m, const Vector& right, const Vector& left) {
  return left.dot(m * right) / left.dot(right);
}

}  // namespace

GroundData principal_eigen(const Generator& q, const Potential& v, const SpectralOptions& opts) {
  return principal_eigen(SchrodingerOperator(q, v), opts);
}

GroundData principal_eigen(const SchrodingerOperator& op, const SpectralOptions& opts) {
  const Eigen::Index d = op.dim();
  const Matrix& m = op.matrix();
  GroundData gd;
  if (d == 1) {
    gd.lambda = m(0, 0);
    gd.psi = Vector::Ones(1);
    gd.pi = ProbMeasure::uniform(1);
    gd.mu = ProbMeasure::uniform(1);
    return gd;
  }
  if (!strongly_connected(op.generator()))
    throw NotIrreducible("principal eigenpair needs a strongly connected generator");

  const double diag_max = m.diagonal().cwiseAbs().maxCoeff();
  const double h = diag_max > 0.0 ? 1.0 / diag_max : 1.0;
  Matrix shifted = m;
  shifted.diagonal().array() -= op.potential().max();
  const Matrix step = expm(shifted, h);
  const Matrix step_t = step.transpose();

  Vector right = Vector::Constant(d, 1.0 / static_cast<double>(d));
  Vector left = right;
  double best_change = std::numeric_limits<double>::infinity();
  int since_best = 0;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    Vector r = step * right;
    Vector l = step_t * left;
    r /= r.sum();
    l /= l.sum();
    const double change =
        std::max((r - right).cwiseAbs().maxCoeff(), (l - left).cwiseAbs().maxCoeff());
    right = std::move(r);
    left = std::move(l);
    if (change <= opts.power_tolerance) break;
    if (change < best_change) {
      best_change = change;
      since_best = 0;
    } else if (++since_best >= opts.plateau_window) {
      break;
    }
  }
  gd.iterations = it;

  double lambda = two_sided_rayleigh(m, right, left);
  right = inverse_iterate(m, lambda, right, false, 2);
  left = inverse_iterate(m, lambda, left, true, 2);
  lambda = two_sided_rayleigh(m, right, left);

  const double scale = op.scale();
  const double res = std::max(ground_state_residual(op, lambda, right),
                              ground_measure_residual(op, lambda, left));
  if (!std::isfinite(res) || res > opts.residual_tolerance * scale || right.minCoeff() <= 0.0 ||
      left.minCoeff() <= 0.0)
    throw ConvergenceFailure(gd.iterations, res);

  Vector pi = left / left.sum();
  Vector psi = right / right.dot(pi);
  gd.lambda = lambda;
  gd.psi = psi;
  gd.pi = ProbMeasure::normalized(pi);
  gd.mu = ProbMeasure::normalized(psi.cwiseProduct(pi));
  gd.residual = res;
  return gd;
}

double ground_state_residual(const SchrodingerOperator& op, double lambda, const Vector& psi) {
  if (psi.size() != op.dim())
    throw DimensionMismatch(static_cast<std::size_t>(op.dim()),
                            static_cast<std::size_t>(psi.size()), "ground state");
  return (op.matrix() * psi - lambda * psi).cwiseAbs().maxCoeff();
}

double ground_measure_residual(const SchrodingerOperator& op, double lambda, const Vector& pi) {
  if (pi.size() != op.dim())
    throw DimensionMismatch(static_cast<std::size_t>(op.dim()),
                            static_cast<std::size_t>(pi.size()), "ground measure");
  return (op.matrix().transpose() * pi - lambda * pi).cwiseAbs().maxCoeff();
}

double finite_time_growth_rate(const SchrodingerOperator& op, double t) {
  if (!(t > 0.0)) throw InvalidArgument("growth rate needs t > 0");
  // Shift by max V so that exp(tM) cannot overflow before the logarithm.
  Matrix shifted = op.matrix();
  const double c = op.potential().max();
  shifted.diagonal().array() -= c;
  const Vector growth = expm(shifted, t) * Vector::Ones(op.dim());
  return c + std::log(growth.maxCoeff()) / t;
}

Generator doob_transform(const Generator& q, const Potential& v, const GroundData& gd) {
  const Eigen::Index d = q.dim();
  if (v.dim() != d || gd.psi.size() != d)
    throw DimensionMismatch(static_cast<std::size_t>(d), static_cast<std::size_t>(gd.psi.size()),
                            "Doob transform");
  Matrix dm = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double out = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      dm(i, j) = gd.psi[j] * q(i, j) / gd.psi[i];
      out += dm(i, j);
    }
    dm(i, i) = -out;
  }
  return validate_generator(dm);
}

ProbMeasure ground_measure_by_averaging(const Generator& q, const Potential& v,
                                        const ProbMeasure& mu0, double horizon, int n_grid) {
  const SchrodingerOperator op(q, v);
  return ground_measure_by_averaging(op, principal_eigen(op).lambda, mu0, horizon, n_grid);
}

ProbMeasure ground_measure_by_averaging(const SchrodingerOperator& op, double lambda,
                                        const ProbMeasure& mu0, double horizon, int n_grid) {
  if (mu0.dim() != op.dim())
    throw DimensionMismatch(static_cast<std::size_t>(op.dim()),
                            static_cast<std::size_t>(mu0.dim()), "initial measure");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw InvalidArgument("averaging horizon must be positive");
  if (n_grid < 2) throw InvalidArgument("averaging needs at least two grid points");

  Matrix shifted = op.matrix();
  shifted.diagonal().array() -= lambda;
  const double h = horizon / (n_grid - 1);
  const Matrix step_t = expm(shifted, h).transpose();

  Vector mu_t = mu0.weights();
  Vector acc = 0.5 * mu_t;
  for (int k = 1; k < n_grid; ++k) {
    mu_t = step_t * mu_t;
    acc += (k == n_grid - 1 ? 0.5 : 1.0) * mu_t;
  }
  if (!acc.allFinite()) throw NonFinite("time average overflowed");
  return ProbMeasure::normalized(acc.cwiseMax(0.0));
}

ProbMeasure stationary_distribution(const Generator& q) {
  return principal_eigen(q, Potential::zero(q.dim())).pi;
}

}  // namespace dvsg
