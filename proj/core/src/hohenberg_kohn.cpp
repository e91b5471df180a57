#include "dvsg/hohenberg_kohn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "dvsg/detail/bfgs.hpp"
#include "dvsg/errors.hpp"

namespace dvsg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_sites(const TensorSystem& sys, Eigen::Index n, const char* what) {
  if (static_cast<std::size_t>(n) != sys.sites())
    throw DimensionMismatch(sys.sites(), static_cast<std::size_t>(n), what);
}

void require_states(const TensorSystem& sys, Eigen::Index n, const char* what) {
  if (static_cast<std::size_t>(n) != sys.states())
    throw DimensionMismatch(sys.states(), static_cast<std::size_t>(n), what);
}

Vector centered(Vector v) {
  v.array() -= v.mean();
  return v;
}

double centered_residual(const Vector& a, const Vector& b) {
  return centered(a - b).cwiseAbs().maxCoeff();
}

// Orbits of the coordinate-permutation action on d^N, keyed by the sorted
// configuration. share(a, o) is the fraction of coordinates of any member of
// orbit o equal to a, so that marginal(mu) = share * p for orbit masses p.
struct Orbits {
  std::vector<int> of_state;
  std::vector<std::vector<std::size_t>> members;
  Matrix share;

  explicit Orbits(const TensorSystem& sys) {
    std::map<std::vector<std::size_t>, int> index;
    of_state.resize(sys.states());
    for (std::size_t x = 0; x < sys.states(); ++x) {
      auto c = sys.config(x);
      std::sort(c.begin(), c.end());
      const auto [it, inserted] = index.emplace(c, static_cast<int>(members.size()));
      if (inserted) members.emplace_back();
      members[static_cast<std::size_t>(it->second)].push_back(x);
      of_state[x] = it->second;
    }
    share = Matrix::Zero(static_cast<Eigen::Index>(sys.sites()), count());
    for (const auto& [c, o] : index)
      for (const std::size_t a : c)
        share(static_cast<Eigen::Index>(a), o) += 1.0 / static_cast<double>(sys.particles());
  }

  Eigen::Index count() const { return static_cast<Eigen::Index>(members.size()); }

  Vector spread(const Vector& mass) const {
    Vector mu(static_cast<Eigen::Index>(of_state.size()));
    for (std::size_t x = 0; x < of_state.size(); ++x) {
      const auto o = static_cast<std::size_t>(of_state[x]);
      mu[static_cast<Eigen::Index>(x)] =
          mass[static_cast<Eigen::Index>(o)] / static_cast<double>(members[o].size());
    }
    return mu;
  }

  // d/d(mass_o) of a function of mu = spread(mass) with state gradient g.
  Vector pull(const Vector& g) const {
    Vector out(count());
    for (Eigen::Index o = 0; o < count(); ++o) {
      double acc = 0.0;
      for (const std::size_t x : members[static_cast<std::size_t>(o)]) acc += g[static_cast<Eigen::Index>(x)];
      out[o] = acc / static_cast<double>(members[static_cast<std::size_t>(o)].size());
    }
    return out;
  }
};

// (Lu/u)_x at the rate_I minimizer.
Vector log_drift(const Generator& q, const Vector& w) {
  const Eigen::Index n = q.dim();
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = q(i, i);
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i && q(i, j) > 0.0) acc += q(i, j) * std::exp(w[j] - w[i]);
    out[i] = acc;
  }
  return out;
}

}  // namespace

ForwardResult equilibrium_marginal(const TensorSystem& sys, const Potential& v0, const Potential& v) {
  require_states(sys, v0.dim(), "interaction potential");
  require_sites(sys, v.dim(), "single-particle potential");
  const GroundData gd = principal_eigen(sys.product(), v0 + separable_potential(v, sys));
  ForwardResult out;
  out.lambda = gd.lambda;
  out.mu = symmetrize_measure(gd.mu, sys);
  out.rho = marginal(out.mu, sys);
  return out;
}

std::string_view to_string(HKConclusion c) {
  switch (c) {
    case HKConclusion::kSamePotentialUpToConstant:
      return "SamePotentialUpToConstant";
    case HKConclusion::kDistinctMarginals:
      return "DistinctMarginals";
    case HKConclusion::kViolation:
      return "Violation";
  }
  return "Violation";
}

HKReport hk_verify(const TensorSystem& sys, const Potential& v0, const Potential& v1,
                   const Potential& v2, double tol) {
  require_sites(sys, v1.dim(), "hk_verify v1");
  require_sites(sys, v2.dim(), "hk_verify v2");
  if (!is_symmetric(v0.values(), sys, tol::kSymmetry * std::max(1.0, v0.values().cwiseAbs().maxCoeff())))
    throw InvalidArgument("hk_verify needs a permutation-symmetric interaction V0");

  const ForwardResult f1 = equilibrium_marginal(sys, v0, v1);
  const ForwardResult f2 = equilibrium_marginal(sys, v0, v2);

  HKReport r;
  r.lambda1 = f1.lambda;
  r.lambda2 = f2.lambda;
  r.rho1 = f1.rho;
  r.rho2 = f2.rho;
  r.marginal_distance = total_variation(f1.rho, f2.rho);
  r.potential_residual = centered_residual(v1.values(), v2.values());
  const Vector dv = v2.values() - v1.values();
  r.slack1 = (r.lambda2 - r.lambda1) - f1.rho.integrate(dv);
  r.slack2 = (r.lambda1 - r.lambda2) + f2.rho.integrate(dv);
  r.kappa = r.marginal_distance > 0.0 ? r.potential_residual / r.marginal_distance : 0.0;

  const bool same_marginal = r.marginal_distance <= tol;
  const bool same_potential = r.potential_residual <= tol;
  if (same_potential)
    r.conclusion = same_marginal ? HKConclusion::kSamePotentialUpToConstant : HKConclusion::kViolation;
  else
    r.conclusion = (!same_marginal && r.slack1 > 0.0 && r.slack2 > 0.0)
                       ? HKConclusion::kDistinctMarginals
                       : HKConclusion::kViolation;
  return r;
}

InversionResult invert_potential(const TensorSystem& sys, const Potential& v0,
                                 const ProbMeasure& rho_target, const InversionOptions& opts) {
  require_sites(sys, rho_target.dim(), "inversion target");
  if (!rho_target.strictly_positive())
    throw InvalidArgument("inversion target must be strictly positive");
  if (!(opts.step > 0.0)) throw InvalidArgument("inversion step must be positive");

  const auto d = static_cast<Eigen::Index>(sys.sites());
  Vector v = Vector::Zero(d);
  if (opts.initial) {
    require_sites(sys, opts.initial->size(), "inversion initial potential");
    v = centered(*opts.initial);
  }
  const Vector log_target = rho_target.weights().array().log();

  ProbMeasure rho = equilibrium_marginal(sys, v0, Potential(v)).rho;
  double err = total_variation(rho, rho_target);
  double alpha = opts.step;
  int it = 0;
  while (err > opts.tolerance && it < opts.max_iterations && alpha > 1e-14) {
    ++it;
    const Vector trial = centered(v + alpha * (log_target - rho.weights().array().log().matrix()));
    const ProbMeasure trial_rho = equilibrium_marginal(sys, v0, Potential(trial)).rho;
    const double trial_err = total_variation(trial_rho, rho_target);
    if (trial_err > err) {
      alpha *= 0.5;
      continue;
    }
    v = trial;
    rho = trial_rho;
    err = trial_err;
  }

  InversionResult out{v, it, err, err <= opts.tolerance};
  if (!out.converged && opts.throw_on_failure)
    throw NotConverged("invert_potential", err, err, it);
  return out;
}

IhkResult i_hk(const TensorSystem& sys, const Potential& v0, const ProbMeasure& rho,
               const IhkOptions& opts) {
  require_states(sys, v0.dim(), "interaction potential");
  require_sites(sys, rho.dim(), "i_hk marginal");
  if (sys.states() > opts.state_cap) throw StateSpaceTooLarge(sys.states(), opts.state_cap);
  if (!rho.strictly_positive()) throw InvalidArgument("i_hk needs a strictly positive marginal");

  const Generator& q = sys.product();
  const auto d = static_cast<Eigen::Index>(sys.sites());

  if (sys.particles() == 1) {
    IhkResult out;
    out.value = rate_I(q, rho).value - rho.integrate(v0.values());
    out.mu = rho;
    out.multipliers = Vector::Zero(d);
    out.theta = rho.weights().array().log();
    return out;
  }

  const Orbits orbits(sys);
  const Eigen::Index m = orbits.count();

  // Product measure rho^N, feasible by construction.
  Vector theta(m);
  if (opts.warm_theta && opts.warm_theta->size() == m) {
    theta = *opts.warm_theta;
  } else {
    for (Eigen::Index o = 0; o < m; ++o) {
      const auto& ms = orbits.members[static_cast<std::size_t>(o)];
      double logp = std::log(static_cast<double>(ms.size()));
      for (const std::size_t a : sys.config(ms.front())) logp += std::log(rho[static_cast<Eigen::Index>(a)]);
      theta[o] = logp;
    }
  }
  Vector y = Vector::Zero(d);
  if (opts.warm_multipliers && opts.warm_multipliers->size() == d) y = *opts.warm_multipliers;
  double c = opts.initial_penalty;

  Vector last_logu = Vector::Zero(q.dim());
  double last_value = kInf;
  Vector last_mu;
  const auto lagrangian = [&](const Vector& th, Vector& grad) {
    const Vector p = detail::softmax(th);
    if (p.minCoeff() <= 0.0) return kInf;
    const Vector mu_w = orbits.spread(p);
    const ProbMeasure mu = ProbMeasure::normalized(mu_w);
    RateOptions ro;
    ro.tolerance = 1e-12;
    ro.warm_start = last_logu;
    const RateResult rr = rate_I(q, mu, ro);
    last_logu = rr.minimizer_logu;
    const double f = rr.value - mu.integrate(v0.values());
    const Vector r = orbits.share * p - rho.weights();
    // Envelope gradient of I(mu) - mu(V0) over states, then over orbit masses.
    const Vector g_state = -log_drift(q, rr.minimizer_logu) - v0.values();
    const Vector g_mass = orbits.pull(g_state) + orbits.share.transpose() * (y + c * r);
    grad = detail::softmax_pullback(p, g_mass);
    last_value = f;
    last_mu = mu_w;
    return f + y.dot(r) + 0.5 * c * r.squaredNorm();
  };

  detail::BfgsOptions bo;
  bo.gradient_tolerance = opts.gradient_tolerance;
  bo.max_iterations = opts.max_inner;

  double violation = kInf;
  double previous = kInf;
  int outer = 0;
  for (; outer < opts.max_outer; ++outer) {
    const detail::BfgsResult run = detail::bfgs_minimize(lagrangian, theta, bo);
    theta = run.x;
    Vector g;
    lagrangian(theta, g);  // refresh last_value / last_mu at the accepted point
    const Vector p = detail::softmax(theta);
    const Vector r = orbits.share * p - rho.weights();
    violation = r.cwiseAbs().maxCoeff();
    y += c * r;
    y.array() -= y.mean();
    if (violation <= opts.feasibility_tolerance && run.gradient_norm <= 100.0 * opts.gradient_tolerance) {
      ++outer;
      break;
    }
    if (violation > 0.25 * previous) c *= 2.0;
    previous = violation;
  }
  if (violation > opts.feasibility_tolerance)
    throw NotConverged("i_hk", last_value, violation, outer);

  IhkResult out;
  out.value = last_value;
  out.mu = ProbMeasure::normalized(last_mu);
  out.multipliers = y;
  out.theta = theta;
  out.constraint_violation = violation;
  out.outer_iterations = outer;
  return out;
}

ReducedResult reduced_variational(const TensorSystem& sys, const Potential& v0, const Potential& v,
                                  const ReducedOptions& opts) {
  require_sites(sys, v.dim(), "reduced variational potential");
  const auto d = static_cast<Eigen::Index>(sys.sites());

  IhkOptions inner = opts.inner;
  IhkResult last;
  bool have_last = false;
  // Negated objective I_HK(rho) - rho(v); d I_HK / d rho = -multipliers.
  const auto negated = [&](const Vector& phi, Vector& grad) {
    const Vector p = detail::softmax(phi);
    if (p.minCoeff() <= 0.0) return kInf;
    const ProbMeasure rho(p);
    if (have_last) {
      inner.warm_theta = last.theta;
      inner.warm_multipliers = last.multipliers;
    }
    IhkResult r = i_hk(sys, v0, rho, inner);
    grad = detail::softmax_pullback(p, -r.multipliers - v.values());
    const double value = r.value - rho.integrate(v.values());
    last = std::move(r);
    have_last = true;
    return value;
  };

  detail::BfgsOptions bo;
  bo.gradient_tolerance = opts.gradient_tolerance;
  bo.max_iterations = opts.max_iterations;
  const detail::BfgsResult run = detail::bfgs_minimize(negated, Vector::Zero(d), bo);

  Vector g;
  negated(run.x, g);
  ReducedResult out;
  out.lambda_hat = -run.value;
  out.rho_star = ProbMeasure(detail::softmax(run.x));
  out.iterations = run.iterations;
  const Potential total = v0 + separable_potential(v, sys);
  out.lower_bound = last.mu.integrate(total.values()) - rate_I(sys.product(), last.mu).value;
  if (!std::isfinite(out.lambda_hat))
    throw NotConverged("reduced_variational", out.lambda_hat, run.gradient_norm, run.iterations);
  return out;
}

double gamma_uniqueness_check(const Generator& q, const Potential& v1, const Potential& v2) {
  const GroundData g1 = principal_eigen(q, v1);
  const GroundData g2 = principal_eigen(q, v2);
  const Vector ratio = g1.psi.cwiseQuotient(g2.psi);
  return g1.mu.integrate(carre_du_champ(q, ratio));
}

}  // namespace dvsg
