#pragma once

#include <cstddef>
#include <vector>

#include "dvsg/generator.hpp"
#include "dvsg/types.hpp"

namespace dvsg {

inline constexpr std::size_t kDefaultStateCap = 20000;

// N identical non-interacting particles on d sites: the generator on the d^N
// product space is the Kronecker sum sum_i I x ... x Q1 x ... x I.
//
// Flat indices are row-major with coordinate 1 slowest, so configuration
// (x_1, ..., x_N) maps to x_1 d^{N-1} + ... + x_N and the marginal over x_1
// is a sum over contiguous blocks.
class TensorSystem {
 public:
  std::size_t sites() const { return sites_; }
  std::size_t particles() const { return particles_; }
  std::size_t states() const { return states_; }
  const Generator& single() const { return single_; }
  const Generator& product() const { return product_; }

  std::size_t flat(const std::vector<std::size_t>& config) const;
  std::vector<std::size_t> config(std::size_t flat_index) const;

  // Flat index of the configuration with coordinates permuted:
  // y_i = x_{perm[i]}.
  std::size_t permuted(std::size_t flat_index, const std::vector<std::size_t>& perm) const;

 private:
  friend TensorSystem kronecker_sum(const Generator& q1, std::size_t particles, std::size_t cap);
  TensorSystem(Generator single, Generator product, std::size_t particles);

  Generator single_;
  Generator product_;
  std::size_t sites_;
  std::size_t particles_;
  std::size_t states_;
};

// Throws StateSpaceTooLarge when d^N > cap.
TensorSystem kronecker_sum(const Generator& q1, std::size_t particles,
                           std::size_t cap = kDefaultStateCap);

// V(x_1, ..., x_N) = (v(x_1) + ... + v(x_N)) / N
Potential separable_potential(const Potential& v, const TensorSystem& sys);
Potential separable_potential(const Potential& v, std::size_t particles,
                              std::size_t cap = kDefaultStateCap);

// V0(x) = sum_{i<j} w(x_i, x_j) / binom(N, 2) for a symmetric d x d matrix w;
// identically zero when N = 1.
Potential pairwise_interaction(const Matrix& w, const TensorSystem& sys);

// (1 / N!) sum over permutations of mu^sigma. Idempotent, output symmetric.
ProbMeasure symmetrize_measure(const ProbMeasure& mu, const TensorSystem& sys);
// Same averaging for an arbitrary vector on the product space.
Vector symmetrize(const Vector& values, const TensorSystem& sys);

// One-particle marginal over coordinate `coordinate` (0 = x_1).
ProbMeasure marginal(const ProbMeasure& mu, const TensorSystem& sys, std::size_t coordinate = 0);

// Invariant under every coordinate permutation within tol (exact enumeration,
// N <= 6).
bool is_symmetric(const Vector& values, const TensorSystem& sys, double tol = 1e-12);

// All permutations of {0, ..., n-1} in lexicographic order; n <= 6.
std::vector<std::vector<std::size_t>> permutations(std::size_t n);

}  // namespace dvsg
