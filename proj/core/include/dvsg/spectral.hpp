#pragma once

#include "dvsg/generator.hpp"
#include "dvsg/semigroup.hpp"
#include "dvsg/tolerances.hpp"
#include "dvsg/types.hpp"

namespace dvsg {

// Perron data of M = Q + diag(V).
//   M psi = lambda psi,  pi^T M = lambda pi^T,
//   sum pi = 1,  sum psi * pi = 1,  mu = psi * pi.
struct GroundData {
  double lambda = 0.0;
  Vector psi;       // ground state
  ProbMeasure pi;   // ground measure
  ProbMeasure mu;   // equilibrium measure
  int iterations = 0;
  double residual = 0.0;  // max of right and left eigen-residuals
};

struct SpectralOptions {
  int max_iterations = 10000;
  // Stop the power phase when the iterate change has not improved for this many steps.
  int plateau_window = 50;
  double power_tolerance = 1e-13;
  // Accepted eigen-residual, relative to scale(M).
  double residual_tolerance = tol::kEigenResidual;
};

// Power iteration on exp(hM), h = 1 / max |M_ii|, from the uniform vector for
// both the right and the left Perron vectors, then shifted inverse iteration
// and a two-sided Rayleigh quotient. Deterministic.
// Throws NotIrreducible when Q is not strongly connected and
// ConvergenceFailure when the final residual exceeds the tolerance.
GroundData principal_eigen(const Generator& q, const Potential& v,
                           const SpectralOptions& opts = {});
GroundData principal_eigen(const SchrodingerOperator& op, const SpectralOptions& opts = {});

// ||(M - lambda) psi||_inf
double ground_state_residual(const SchrodingerOperator& op, double lambda, const Vector& psi);
// ||pi^T (M - lambda)||_inf
double ground_measure_residual(const SchrodingerOperator& op, double lambda, const Vector& pi);

// (1/t) log max_x (exp(tM) 1)(x); tends to lambda as t grows.
double finite_time_growth_rate(const SchrodingerOperator& op, double t);

// D = diag(psi)^{-1} (M - lambda) diag(psi), assembled from the off-diagonal
// part with the diagonal set so that D 1 = 0 exactly. The equilibrium measure
// is invariant for D.
Generator doob_transform(const Generator& q, const Potential& v, const GroundData& gd);

// Normalized time average over [0, T] of t -> e^{-lambda t} mu0^T exp(tM),
// by the trapezoid rule on n_grid equally spaced points.
ProbMeasure ground_measure_by_averaging(const Generator& q, const Potential& v,
                                        const ProbMeasure& mu0, double horizon, int n_grid);
ProbMeasure ground_measure_by_averaging(const SchrodingerOperator& op, double lambda,
                                        const ProbMeasure& mu0, double horizon, int n_grid);

// Stationary distribution of Q (the ground measure for V = 0).
ProbMeasure stationary_distribution(const Generator& q);

}  // namespace dvsg
