#include <gtest/gtest.h>

#include <random>

#include "dvsg/errors.hpp"
#include "dvsg/hohenberg_kohn.hpp"
#include "instances.hpp"

namespace dvsg {
namespace {

using testing::random_generator;
using testing::random_measure;
using testing::random_vector;
using testing::two_state;

struct Pair {
  TensorSystem sys;
  Potential v0;
};

Pair demo_pair() {
  Matrix w(2, 2);
  w << 0.0, 1.0, 1.0, 0.5;
  TensorSystem sys = kronecker_sum(validate_generator(two_state(1.0, 2.0)), 2);
  Potential v0 = pairwise_interaction(w, sys);
  return {std::move(sys), std::move(v0)};
}

Pair random_pair(std::mt19937_64& rng, Eigen::Index d) {
  Matrix w = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j) w(i, j) = w(j, i) = random_vector(rng, 1)[0];
  TensorSystem sys = kronecker_sum(random_generator(rng, d), 2);
  Potential v0 = pairwise_interaction(w, sys);
  return {std::move(sys), std::move(v0)};
}

Potential pot(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const double x : xs) v[i++] = x;
  return Potential(v);
}

TEST(EquilibriumMarginal, ForwardResultIsSymmetric) {
  const Pair p = demo_pair();
  const ForwardResult f = equilibrium_marginal(p.sys, p.v0, pot({0.0, 1.0}));
  EXPECT_TRUE(is_symmetric(f.mu.weights(), p.sys, 1e-12));
  EXPECT_NEAR(f.rho.weights().sum(), 1.0, 1e-15);
}

TEST(HkVerify, ConstantShiftGivesSamePotential) {
  const Pair p = demo_pair();
  const HKReport r = hk_verify(p.sys, p.v0, pot({0.0, 1.0}), pot({3.0, 4.0}));
  EXPECT_EQ(r.conclusion, HKConclusion::kSamePotentialUpToConstant);
  EXPECT_LE(r.marginal_distance, 1e-10);
  EXPECT_LE(r.potential_residual, 1e-12);
  EXPECT_NEAR(r.lambda2 - r.lambda1, 3.0, 1e-12);
}

TEST(HkVerify, IdenticalPotentials) {
  const Pair p = demo_pair();
  const HKReport r = hk_verify(p.sys, p.v0, pot({0.0, 1.0}), pot({0.0, 1.0}));
  EXPECT_EQ(r.conclusion, HKConclusion::kSamePotentialUpToConstant);
  EXPECT_EQ(r.marginal_distance, 0.0);
  EXPECT_EQ(r.lambda1, r.lambda2);
}

// Oracle: both 4-state systems solved directly by Eigen's eigensolver, the
// marginals read off the Perron vectors.
TEST(HkVerify, DistinctMarginalsWithStrictProofInequalities) {
  const Pair p = demo_pair();
  const Potential v1 = pot({0.0, 1.0}), v2 = pot({0.0, 2.0});
  const HKReport r = hk_verify(p.sys, p.v0, v1, v2);
  EXPECT_EQ(r.conclusion, HKConclusion::kDistinctMarginals);
  EXPECT_GT(r.slack1, 0.0);
  EXPECT_GT(r.slack2, 0.0);

  const Matrix m1 = p.sys.product().rates() + Matrix((p.v0 + separable_potential(v1, p.sys)).values().asDiagonal());
  const Matrix m2 = p.sys.product().rates() + Matrix((p.v0 + separable_potential(v2, p.sys)).values().asDiagonal());
  const double l1 = testing::eigen_oracle_lambda(m1), l2 = testing::eigen_oracle_lambda(m2);
  EXPECT_NEAR(r.lambda1, l1, 1e-12);
  EXPECT_NEAR(r.lambda2, l2, 1e-12);
  EXPECT_NEAR(r.slack1, (l2 - l1) - r.rho1.integrate(v2.values() - v1.values()), 1e-12);
  EXPECT_GT(r.kappa, 0.0);
}

TEST(HkVerify, RandomNonConstantDifferencesSeparate) {
  std::mt19937_64 rng(131);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index d = 2 + trial % 2;
    const Pair p = random_pair(rng, d);
    const Potential v1(random_vector(rng, d, -1, 1)), v2(random_vector(rng, d, -1, 1));
    const HKReport r = hk_verify(p.sys, p.v0, v1, v2);
    EXPECT_GT(r.marginal_distance, 0.0);
    EXPECT_GT(r.slack1, 0.0);
    EXPECT_GT(r.slack2, 0.0);
    EXPECT_NE(r.conclusion, HKConclusion::kViolation);
  }
}

TEST(HkVerify, RejectsAsymmetricInteraction) {
  const Pair p = demo_pair();
  Vector v0 = Vector::Zero(4);
  v0[1] = 1.0;
  EXPECT_THROW(hk_verify(p.sys, Potential(v0), pot({0, 1}), pot({0, 2})), InvalidArgument);
}

TEST(InvertPotential, RecoversGeneratingPotential) {
  const Pair p = demo_pair();
  const Potential vstar = pot({0.3, 1.3});
  const ProbMeasure target = equilibrium_marginal(p.sys, p.v0, vstar).rho;
  const InversionResult inv = invert_potential(p.sys, p.v0, target);
  EXPECT_TRUE(inv.converged);
  EXPECT_LE(inv.marginal_error, 1e-8);
  EXPECT_LE(inv.iterations, 500);
  Vector ref = vstar.values();
  ref.array() -= ref.mean();
  EXPECT_LE((inv.v_recovered - ref).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(InvertPotential, ZeroPotentialIsAFixedPoint) {
  const Pair p = demo_pair();
  const ProbMeasure target = equilibrium_marginal(p.sys, p.v0, Potential::zero(2)).rho;
  const InversionResult inv = invert_potential(p.sys, p.v0, target);
  EXPECT_LE(inv.v_recovered.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(InvertPotential, RoundTripIsStable) {
  std::mt19937_64 rng(137);
  const Pair p = random_pair(rng, 3);
  const Potential vstar(random_vector(rng, 3, -2, 2));
  const ProbMeasure target = equilibrium_marginal(p.sys, p.v0, vstar).rho;
  const InversionResult first = invert_potential(p.sys, p.v0, target);
  const ProbMeasure again = equilibrium_marginal(p.sys, p.v0, Potential(first.v_recovered)).rho;
  EXPECT_LE(total_variation(again, target), 1e-8);
  const InversionResult second = invert_potential(p.sys, p.v0, again);
  EXPECT_LE((second.v_recovered - first.v_recovered).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(InvertPotential, ReportsNonConvergence) {
  const Pair p = demo_pair();
  const ProbMeasure target = equilibrium_marginal(p.sys, p.v0, pot({0.0, 1.5})).rho;
  InversionOptions o;
  o.max_iterations = 2;
  EXPECT_THROW(invert_potential(p.sys, p.v0, target, o), NotConverged);
  o.throw_on_failure = false;
  const InversionResult r = invert_potential(p.sys, p.v0, target, o);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.marginal_error, 1e-8);
}

TEST(Ihk, SingleParticleReducesToRateFunction) {
  std::mt19937_64 rng(139);
  const Generator q = random_generator(rng, 3);
  const TensorSystem sys = kronecker_sum(q, 1);
  const Potential v0(random_vector(rng, 3));
  const ProbMeasure rho = random_measure(rng, 3);
  EXPECT_NEAR(i_hk(sys, v0, rho).value, rate_I(q, rho).value - rho.integrate(v0.values()), 1e-12);
}

TEST(Ihk, VanishesAtStationaryMarginalWithoutInteraction) {
  std::mt19937_64 rng(149);
  const Generator q = random_generator(rng, 3);
  const TensorSystem sys = kronecker_sum(q, 2);
  const ProbMeasure pi = stationary_distribution(q);
  const IhkResult r = i_hk(sys, Potential::zero(9), pi);
  EXPECT_NEAR(r.value, 0.0, 1e-9);
  // The product of stationaries is stationary for the Kronecker sum.
  EXPECT_LE(rate_I(sys.product(), stationary_distribution(sys.product())).value, 1e-12);
}

// Oracle by convex duality: I_HK(rho) = rho(v) - lambda(V0 + sep v) where v is
// the potential whose equilibrium marginal is rho.
TEST(Ihk, MatchesDualFormula) {
  std::mt19937_64 rng(151);
  for (int trial = 0; trial < 6; ++trial) {
    const Eigen::Index d = 2 + trial % 2;
    const Pair p = random_pair(rng, d);
    const Potential vstar(random_vector(rng, d, -1, 1));
    const ForwardResult f = equilibrium_marginal(p.sys, p.v0, vstar);
    const double dual = f.rho.integrate(vstar.values()) - f.lambda;
    const IhkResult r = i_hk(p.sys, p.v0, f.rho);
    EXPECT_NEAR(r.value, dual, 1e-7);
    EXPECT_LE(r.constraint_violation, 1e-10);
    EXPECT_LE(total_variation(r.mu, f.mu), 1e-4);
  }
}

TEST(Ihk, ProductMeasureIsAnUpperBound) {
  std::mt19937_64 rng(157);
  const Pair p = random_pair(rng, 3);
  const ProbMeasure rho = random_measure(rng, 3);
  Vector prod(9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) prod[3 * a + b] = rho[a] * rho[b];
  const ProbMeasure mu(prod);
  const double upper = rate_I(p.sys.product(), mu).value - mu.integrate(p.v0.values());
  EXPECT_LE(i_hk(p.sys, p.v0, rho).value, upper + 1e-10);
}

TEST(Ihk, StateCapAndPositivity) {
  std::mt19937_64 rng(163);
  const TensorSystem sys = kronecker_sum(random_generator(rng, 3), 2);
  IhkOptions o;
  o.state_cap = 8;
  EXPECT_THROW(i_hk(sys, Potential::zero(9), ProbMeasure::uniform(3), o), StateSpaceTooLarge);
  EXPECT_THROW(i_hk(sys, Potential::zero(9), ProbMeasure::dirac(3, 0)), InvalidArgument);
}

TEST(ReducedVariational, MatchesSpectralLambda) {
  const Pair p = demo_pair();
  const Potential v = pot({0.0, 1.0});
  const ReducedResult r = reduced_variational(p.sys, p.v0, v);
  const ForwardResult f = equilibrium_marginal(p.sys, p.v0, v);
  EXPECT_NEAR(r.lambda_hat, f.lambda, 1e-4);
  EXPECT_LE(total_variation(r.rho_star, f.rho), 1e-3);
  EXPECT_LE(r.lower_bound, f.lambda + 1e-10);
}

TEST(ReducedVariational, ConstantPotentialWithoutInteraction) {
  std::mt19937_64 rng(167);
  const TensorSystem sys = kronecker_sum(random_generator(rng, 2), 2);
  const ReducedResult r = reduced_variational(sys, Potential::zero(4), Potential::constant(2, 1.7));
  EXPECT_NEAR(r.lambda_hat, 1.7, 1e-8);
}

TEST(GammaUniqueness, ZeroForShiftsPositiveOtherwise) {
  std::mt19937_64 rng(173);
  const Generator q = random_generator(rng, 3);
  const Potential v1(random_vector(rng, 3));
  EXPECT_LE(gamma_uniqueness_check(q, v1, v1.shifted(3.0)), 1e-10);
  Vector bump = Vector::Zero(3);
  bump[1] = 0.1;
  EXPECT_GT(gamma_uniqueness_check(q, v1, Potential(v1.values() + bump)), 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Potential a(random_vector(rng, 3)), b(random_vector(rng, 3));
    EXPECT_GE(gamma_uniqueness_check(q, a, b), -1e-12);
  }
}

}  // namespace
}  // namespace dvsg
