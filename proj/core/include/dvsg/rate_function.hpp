#pragma once

#include <cstdint>
#include <optional>

#include "dvsg/generator.hpp"
#include "dvsg/semigroup.hpp"
#include "dvsg/spectral.hpp"
#include "dvsg/tolerances.hpp"
#include "dvsg/types.hpp"

namespace dvsg {

// Donsker-Varadhan rate function
//   I(mu) = -inf_{u > 0} sum_i mu_i (Lu/u)_i = -min_w F(w),
//   F(w)  = sum_i mu_i sum_j Q_ij exp(w_j - w_i),
// with w = log u gauge-fixed to mean zero (per connected block of the support).

enum class BoundaryPolicy {
  kReject,    // measures with zero entries are an error
  kRestrict,  // minimize over supp(mu); terms leaving the support go to their infimum 0
};

struct RateOptions {
  double tolerance = tol::kRateGradient;  // on ||grad F||_inf
  int max_iterations = 200;
  BoundaryPolicy boundary = BoundaryPolicy::kReject;
  // Optional starting log u (length d); zero when absent.
  std::optional<Vector> warm_start;
};

struct RateResult {
  double value = 0.0;
  // Gauge-fixed log of the optimal u; -infinity off the support.
  Vector minimizer_logu;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

// F(w) for full-support evaluation; the rate objective.
double rate_objective(const Generator& q, const ProbMeasure& mu, const Vector& w);

// Damped Newton on F with an explicit Hessian (a weighted graph Laplacian),
// Armijo backtracking, and gradient-descent fallback.
// Throws UnsupportedSupport (zeros under kReject) or NotConverged.
RateResult rate_I(const Generator& q, const ProbMeasure& mu, const RateOptions& opts = {});

// Tilted rate I^V(mu) = I(mu) - mu(V) + lambda_V. Zero exactly at the
// equilibrium measure.
double rate_IV(const Generator& q, const Potential& v, const ProbMeasure& mu,
               const RateOptions& opts = {});
double rate_IV(const Generator& q, const Potential& v, double lambda, const ProbMeasure& mu,
               const RateOptions& opts = {});

struct DualOptions {
  double gradient_tolerance = 1e-10;  // on the softmax-parameter gradient
  int max_iterations = 500;
  int restarts = 3;  // first start is uniform, the rest are seeded normal draws
  std::uint64_t seed = 20240601;
  double inner_tolerance = 1e-12;
};

struct DualResult {
  double lambda_hat = 0.0;
  ProbMeasure mu_star;
  double gradient_norm = 0.0;
  int iterations = 0;
};

// sup over the simplex interior of mu(V) - I(mu), parametrized by mu = softmax(theta)
// and ascended with the envelope gradient V + Lu/u. Best of opts.restarts starts.
DualResult dv_sup(const Generator& q, const Potential& v, const DualOptions& opts = {});

struct LegendreOptions {
  double gradient_tolerance = tol::kLegendreGradient;  // on ||mu - mu(V)||_inf
  int max_iterations = 500;
};

struct LegendreResult {
  double value = 0.0;
  Vector potential;  // maximizing V, mean zero
  double gradient_norm = 0.0;
  int iterations = 0;
};

// I(mu) = sup_V (mu(V) - lambda_V), ascended with gradient mu - mu_eq(V) where
// mu_eq(V) comes from principal_eigen. Independent of rate_I.
LegendreResult legendre_I(const Generator& q, const ProbMeasure& mu,
                          const LegendreOptions& opts = {});

// sum_i mu_i log(mu_i / pi_i), with 0 log 0 = 0 and +infinity when mu is not
// absolutely continuous with respect to pi.
double relative_entropy(const ProbMeasure& mu, const ProbMeasure& pi);

// sum_i mu_i log((e^{-lambda t} P_t^V u)_i / u_i) for u > 0; bounded below by
// -t I^V(mu).
double dv_log_functional(const SchrodingerOperator& op, double lambda, const ProbMeasure& mu,
                         const Vector& u, double t);

}  // namespace dvsg
