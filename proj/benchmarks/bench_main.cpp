#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "dvsg/expm.hpp"
#include "dvsg/feynman_kac.hpp"
#include "dvsg/generator.hpp"
#include "dvsg/rate_function.hpp"
#include "dvsg/spectral.hpp"

namespace {

using namespace dvsg;

Generator dense_generator(Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rate(0.1, 2.0);
  Matrix q(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double out = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      q(i, j) = rate(rng);
      out += q(i, j);
    }
    q(i, i) = -out;
  }
  return validate_generator(q);
}

Potential smooth_potential(Eigen::Index d) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = std::sin(0.7 * static_cast<double>(i));
  return Potential(v);
}

void BM_Expm(benchmark::State& state) {
  const auto q = dense_generator(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(expm(q.rates(), 3.0));
}
BENCHMARK(BM_Expm)->Arg(4)->Arg(16)->Arg(64);

void BM_PrincipalEigen(benchmark::State& state) {
  const auto d = state.range(0);
  const auto q = dense_generator(d, 2);
  const auto v = smooth_potential(d);
  for (auto _ : state) benchmark::DoNotOptimize(principal_eigen(q, v).lambda);
}
BENCHMARK(BM_PrincipalEigen)->Arg(4)->Arg(16)->Arg(64);

void BM_RateI(benchmark::State& state) {
  const auto d = state.range(0);
  const auto q = dense_generator(d, 3);
  Vector w(d);
  for (Eigen::Index i = 0; i < d; ++i) w[i] = 1.0 + 0.5 * std::cos(static_cast<double>(i));
  const auto mu = ProbMeasure::normalized(w);
  for (auto _ : state) benchmark::DoNotOptimize(rate_I(q, mu).value);
}
BENCHMARK(BM_RateI)->Arg(4)->Arg(16)->Arg(64);

void BM_EstimateLambda(benchmark::State& state) {
  const auto q = dense_generator(4, 4);
  const auto v = smooth_potential(4);
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_lambda(q, v, 20.0, 2000, 7, threads).estimate);
}
BENCHMARK(BM_EstimateLambda)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
