#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dvsg/generator.hpp"
#include "dvsg/types.hpp"

namespace dvsg {

struct PathSample {
  std::vector<Eigen::Index> states;
  std::vector<double> holding_times;  // last entry truncated at the horizon
  double total_time = 0.0;
  double weight_exponent = 0.0;  // int_0^t V(X_s) ds, filled by estimate_lambda
};

// Gillespie simulation of the chain with generator q from x0 up to time t.
// States with zero exit rate hold forever. Deterministic given (seed, stream).
PathSample simulate_ctmc(const Generator& q, Eigen::Index x0, double t, std::uint64_t seed,
                         std::uint64_t stream = 0);

// sum_k v[s_k] * holding_k, exact for piecewise-constant paths.
double path_integral(const PathSample& path, const Potential& v);

// log(mean(exp(a_i))), stable under large exponents.
double log_mean_exp(std::span<const double> a);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// (1/t) log E[exp(int_0^t V(X_s) ds)] with X_0 uniform, from n_paths paths.
// Path k uses the stream (seed, k), so results do not depend on `threads`.
// The standard error is the delta-method error of the log of the sample mean.
McEstimate estimate_lambda(const Generator& q, const Potential& v, double t, std::size_t n_paths,
                           std::uint64_t seed, unsigned threads = 1);

}  // namespace dvsg
