#include <gtest/gtest.h>

#include <random>

#include "dvsg/errors.hpp"
#include "dvsg/expm.hpp"
#include "dvsg/multiparticle.hpp"
#include "dvsg/spectral.hpp"
#include "instances.hpp"

namespace dvsg {
namespace {

using testing::random_generator;
using testing::random_measure;
using testing::random_vector;

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

TEST(KroneckerSum, MatchesIdentityTensorConstruction) {
  std::mt19937_64 rng(11);
  const Generator q = random_generator(rng, 3);
  const Matrix i3 = Matrix::Identity(3, 3);
  const Matrix oracle2 = kron(q.rates(), i3) + kron(i3, q.rates());
  EXPECT_LE((kronecker_sum(q, 2).product().rates() - oracle2).cwiseAbs().maxCoeff(), 1e-15);
  const Matrix oracle3 = kron(kron(q.rates(), i3), i3) + kron(kron(i3, q.rates()), i3) + kron(kron(i3, i3), q.rates());
  EXPECT_LE((kronecker_sum(q, 3).product().rates() - oracle3).cwiseAbs().maxCoeff(), 1e-15);
}

// Non-interacting particles evolve independently: exp(t QN) = exp(tQ) x exp(tQ).
TEST(KroneckerSum, SemigroupFactorizes) {
  std::mt19937_64 rng(13);
  const Generator q = random_generator(rng, 3);
  const TensorSystem sys = kronecker_sum(q, 2);
  const Matrix p = expm(q.rates(), 0.7);
  EXPECT_LE((expm(sys.product().rates(), 0.7) - kron(p, p)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(KroneckerSum, SpectralQuantitiesFactorize) {
  std::mt19937_64 rng(17);
  const Generator q = random_generator(rng, 3);
  const Potential v(random_vector(rng, 3));
  const TensorSystem sys = kronecker_sum(q, 2);
  const GroundData one = principal_eigen(q, Potential(v.values() / 2.0));
  const GroundData two = principal_eigen(sys.product(), separable_potential(v, sys));
  EXPECT_NEAR(two.lambda, 2.0 * one.lambda, 1e-12);
  EXPECT_LE(total_variation(marginal(two.mu, sys), one.mu), 1e-10);
}

TEST(KroneckerSum, StateCap) {
  std::mt19937_64 rng(19);
  const Generator q = random_generator(rng, 10);
  EXPECT_THROW(kronecker_sum(q, 5), StateSpaceTooLarge);
  EXPECT_NO_THROW(kronecker_sum(q, 4));
  EXPECT_THROW(kronecker_sum(q, 0), InvalidArgument);
}

TEST(Indexing, FlatAndConfigAreInverse) {
  std::mt19937_64 rng(23);
  const TensorSystem sys = kronecker_sum(random_generator(rng, 3), 3);
  for (std::size_t x = 0; x < sys.states(); ++x) EXPECT_EQ(sys.flat(sys.config(x)), x);
  EXPECT_EQ(sys.flat({1, 0, 2}), 1u * 9 + 0u * 3 + 2u);
  EXPECT_EQ(sys.permuted(sys.flat({1, 0, 2}), {2, 0, 1}), sys.flat({2, 1, 0}));
}

TEST(SeparablePotential, AveragesSingleParticleValues) {
  Vector v(2);
  v << 0.0, 3.0;
  std::mt19937_64 rng(29);
  const TensorSystem sys = kronecker_sum(random_generator(rng, 2), 3);
  const Potential sep = separable_potential(Potential(v), sys);
  EXPECT_DOUBLE_EQ(sep[sys.flat({1, 0, 1})], 2.0);
  EXPECT_DOUBLE_EQ(sep[sys.flat({0, 0, 0})], 0.0);
  EXPECT_EQ(separable_potential(Potential(v), 3).values(), sep.values());
}

TEST(PairwiseInteraction, NormalizedAndSymmetric) {
  Matrix w(2, 2);
  w << 1.0, 2.0, 2.0, 4.0;
  std::mt19937_64 rng(31);
  const TensorSystem sys = kronecker_sum(random_generator(rng, 2), 3);
  const Potential v0 = pairwise_interaction(w, sys);
  // Pairs of (0, 1, 1): w01 + w01 + w11 = 8 over 3 pairs.
  EXPECT_DOUBLE_EQ(v0[sys.flat({0, 1, 1})], 8.0 / 3.0);
  EXPECT_TRUE(is_symmetric(v0.values(), sys));
  const TensorSystem single = kronecker_sum(random_generator(rng, 2), 1);
  EXPECT_EQ(pairwise_interaction(w, single).values(), Vector::Zero(2));
  Matrix bad = w;
  bad(0, 1) = 0.0;
  EXPECT_THROW(pairwise_interaction(bad, sys), InvalidArgument);
}

TEST(Symmetrize, IdempotentAndSymmetric) {
  std::mt19937_64 rng(37);
  const TensorSystem sys = kronecker_sum(random_generator(rng, 3), 3);
  const ProbMeasure mu = random_measure(rng, static_cast<Eigen::Index>(sys.states()));
  const ProbMeasure s = symmetrize_measure(mu, sys);
  EXPECT_TRUE(is_symmetric(s.weights(), sys, 1e-15));
  EXPECT_LE((symmetrize_measure(s, sys).weights() - s.weights()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_FALSE(is_symmetric(mu.weights(), sys));
}

TEST(Marginal, SymmetrizedMarginalIsCoordinateAverage) {
  std::mt19937_64 rng(41);
  const TensorSystem sys = kronecker_sum(random_generator(rng, 3), 3);
  const ProbMeasure mu = random_measure(rng, static_cast<Eigen::Index>(sys.states()));
  Vector avg = Vector::Zero(3);
  for (std::size_t k = 0; k < 3; ++k) avg += marginal(mu, sys, k).weights() / 3.0;
  EXPECT_LE((marginal(symmetrize_measure(mu, sys), sys).weights() - avg).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Marginal, ProductMeasureMarginal) {
  std::mt19937_64 rng(43);
  const TensorSystem sys = kronecker_sum(random_generator(rng, 3), 2);
  const Vector r = random_measure(rng, 3).weights();
  Vector prod(9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) prod[3 * a + b] = r[a] * r[b];
  const ProbMeasure mu(prod);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_LE((marginal(mu, sys, k).weights() - r).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Permutations, CountsAndLimit) {
  EXPECT_EQ(permutations(1).size(), 1u);
  EXPECT_EQ(permutations(4).size(), 24u);
  EXPECT_THROW(permutations(7), InvalidArgument);
}

}  // namespace
}  // namespace dvsg
