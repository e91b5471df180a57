#pragma once

#include <optional>
#include <string_view>

#include "dvsg/multiparticle.hpp"
#include "dvsg/rate_function.hpp"
#include "dvsg/spectral.hpp"
#include "dvsg/tolerances.hpp"

namespace dvsg {

// Equilibrium data of QN + V0 + sep(v): the symmetrized equilibrium measure
// and its one-particle marginal.
struct ForwardResult {
  double lambda = 0.0;
  ProbMeasure mu;
  ProbMeasure rho;
};

ForwardResult equilibrium_marginal(const TensorSystem& sys, const Potential& v0, const Potential& v);

enum class HKConclusion { kSamePotentialUpToConstant, kDistinctMarginals, kViolation };

std::string_view to_string(HKConclusion c);

struct HKReport {
  double marginal_distance = 0.0;   // TV(rho1, rho2)
  double potential_residual = 0.0;  // max |(v1 - v2) - mean(v1 - v2)|
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  ProbMeasure rho1;
  ProbMeasure rho2;
  // Slacks of the strict inequalities
  //   rho1(v2 - v1) < lambda2 - lambda1,  rho2(v1 - v2) < lambda1 - lambda2;
  // positive when they hold.
  double slack1 = 0.0;
  double slack2 = 0.0;
  // potential_residual / marginal_distance when the latter is positive:
  // an empirical local Lipschitz constant of the inverse map. Logged only.
  double kappa = 0.0;
  HKConclusion conclusion = HKConclusion::kViolation;
};

// Compares the marginals of the equilibrium measures for V0 + sep(v1) and
// V0 + sep(v2). Potentials whose difference has residual <= tol count as
// equal up to a constant.
HKReport hk_verify(const TensorSystem& sys, const Potential& v0, const Potential& v1,
                   const Potential& v2, double tol = tol::kHK);

struct InversionOptions {
  double step = 0.5;
  double tolerance = tol::kInversion;  // on TV(rho(v), rho_target)
  int max_iterations = 500;
  std::optional<Vector> initial;  // starting single-particle potential
  bool throw_on_failure = true;
};

struct InversionResult {
  Vector v_recovered;  // mean zero
  int iterations = 0;
  double marginal_error = 0.0;
  bool converged = false;
};

// Damped log-density fixed point v <- v + alpha (log rho_target - log rho(v)),
// re-centered to mean zero each step; alpha halves whenever the TV error would
// increase (the step is then retried).
// Throws NotConverged unless opts.throw_on_failure is false.
InversionResult invert_potential(const TensorSystem& sys, const Potential& v0,
                                 const ProbMeasure& rho_target, const InversionOptions& opts = {});

inline constexpr std::size_t kIhkStateCap = 256;

struct IhkOptions {
  std::size_t state_cap = kIhkStateCap;
  double feasibility_tolerance = 1e-10;  // ||marginal(mu) - rho||_inf
  double gradient_tolerance = 1e-10;     // inner BFGS on orbit parameters
  double initial_penalty = 10.0;
  int max_outer = 60;
  int max_inner = 400;
  // Warm starts for nested use: orbit log-weights and marginal multipliers.
  std::optional<Vector> warm_theta;
  std::optional<Vector> warm_multipliers;
};

struct IhkResult {
  double value = 0.0;           // I(mu) - mu(V0) at the minimizer
  ProbMeasure mu;               // symmetric minimizer
  Vector multipliers;           // marginal-constraint multipliers, mean zero
  Vector theta;                 // orbit log-weights
  double constraint_violation = 0.0;
  int outer_iterations = 0;
};

// inf { I(mu) - mu(V0) : mu symmetric on d^N, marginal(mu) = rho }, by an
// augmented Lagrangian on the marginal constraint with mu parametrized by a
// softmax over permutation orbits. Starts from the product measure rho^N.
IhkResult i_hk(const TensorSystem& sys, const Potential& v0, const ProbMeasure& rho,
               const IhkOptions& opts = {});

struct ReducedOptions {
  double tolerance = tol::kReduced;
  double gradient_tolerance = 1e-9;
  int max_iterations = 200;
  IhkOptions inner;
};

struct ReducedResult {
  double lambda_hat = 0.0;
  ProbMeasure rho_star;
  // mu(V0 + V) - I(mu) at the final inner minimizer; <= lambda by the
  // variational formula.
  double lower_bound = 0.0;
  int iterations = 0;
};

// sup over rho in the simplex interior of rho(v) - I_HK(rho).
ReducedResult reduced_variational(const TensorSystem& sys, const Potential& v0, const Potential& v,
                                  const ReducedOptions& opts = {});

// sum_x mu(x) Gamma(psi1 / psi2)(x), with psi_i the ground states of Q + V_i
// and mu the equilibrium measure of Q + V1. Zero iff V2 - V1 is constant.
double gamma_uniqueness_check(const Generator& q, const Potential& v1, const Potential& v2);

}  // namespace dvsg
