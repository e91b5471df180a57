#include "dvsg/feynman_kac.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "dvsg/errors.hpp"
#include "dvsg/random.hpp"

namespace dvsg {

namespace {

// Pairwise summation keeps the reduction independent of thread layout.
double pairwise_sum(std::span<const double> a) {
  if (a.size() <= 8) {
    double s = 0.0;
    for (const double x : a) s += x;
    return s;
  }
  const std::size_t half = a.size() / 2;
  return pairwise_sum(a.first(half)) + pairwise_sum(a.subspan(half));
}

}  // namespace

PathSample simulate_ctmc(const Generator& q, Eigen::Index x0, double t, std::uint64_t seed,
                         std::uint64_t stream) {
  if (x0 < 0 || x0 >= q.dim()) throw InvalidArgument("initial state out of range");
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("simulation horizon must be positive");
  CounterRng rng(seed, stream);
  PathSample path;
  Eigen::Index x = x0;
  double now = 0.0;
  while (true) {
    const double rate = -q(x, x);
    const double hold = rate > 0.0 ? rng.exponential(rate) : t - now;
    path.states.push_back(x);
    if (now + hold >= t) {
      path.holding_times.push_back(t - now);
      break;
    }
    path.holding_times.push_back(hold);
    now += hold;
    // Jump to j with probability Q_xj / rate.
    double target = rng.uniform() * rate;
    Eigen::Index next = x;
    for (Eigen::Index j = 0; j < q.dim(); ++j) {
      if (j == x || q(x, j) <= 0.0) continue;
      next = j;
      target -= q(x, j);
      if (target < 0.0) break;
    }
    x = next;
  }
  path.total_time = t;
  return path;
}

double path_integral(const PathSample& path, const Potential& v) {
  double acc = 0.0;
  for (std::size_t k = 0; k < path.states.size(); ++k) acc += v[path.states[k]] * path.holding_times[k];
  return acc;
}

double log_mean_exp(std::span<const double> a) {
  if (a.empty()) throw InvalidArgument("log_mean_exp of an empty sample");
  const double m = *std::max_element(a.begin(), a.end());
  if (!std::isfinite(m)) return m;
  std::vector<double> e(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) e[i] = std::exp(a[i] - m);
  return m + std::log(pairwise_sum(e) / static_cast<double>(a.size()));
}

McEstimate estimate_lambda(const Generator& q, const Potential& v, double t, std::size_t n_paths,
                           std::uint64_t seed, unsigned threads) {
  if (v.dim() != q.dim())
    throw DimensionMismatch(static_cast<std::size_t>(q.dim()), static_cast<std::size_t>(v.dim()),
                            "Monte Carlo potential");
  if (n_paths < 2) throw InvalidArgument("estimate_lambda needs at least two paths");
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("estimate_lambda needs t > 0");

  // Exponent = t v_ref + delta with delta = int (V - v_ref); for constant V
  // every delta is exactly zero and the estimate is exactly v_ref.
  const double v_ref = v[0];
  const Potential dv = v.shifted(-v_ref);
  const auto d = static_cast<std::uint64_t>(q.dim());

  std::vector<double> delta(n_paths);
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      CounterRng start(seed, 2 * k + 1);
      const auto x0 = static_cast<Eigen::Index>(start() % d);
      delta[k] = path_integral(simulate_ctmc(q, x0, t, seed, 2 * k), dv);
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_paths)));
  if (threads == 1) {
    work(0, n_paths);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_paths + threads - 1) / threads;
    for (std::size_t b = 0; b < n_paths; b += chunk) pool.emplace_back(work, b, std::min(n_paths, b + chunk));
    for (auto& th : pool) th.join();
  }

  const double m = *std::max_element(delta.begin(), delta.end());
  std::vector<double> w(n_paths), w2(n_paths);
  for (std::size_t k = 0; k < n_paths; ++k) {
    w[k] = std::exp(delta[k] - m);
    w2[k] = w[k] * w[k];
  }
  const double n = static_cast<double>(n_paths);
  const double mean = pairwise_sum(w) / n;
  const double var = std::max(0.0, (pairwise_sum(w2) - n * mean * mean) / (n - 1.0));

  McEstimate out;
  out.estimate = v_ref + (m + std::log(mean)) / t;
  out.std_error = std::sqrt(var / n) / (mean * t);
  return out;
}

}  // namespace dvsg
