#include "dvsg/multiparticle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dvsg/errors.hpp"

namespace dvsg {

namespace {

constexpr std::size_t kMaxPermutedParticles = 6;

std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t out = 1;
  for (std::size_t k = 0; k < exp; ++k) {
    if (base != 0 && out > cap / base) throw StateSpaceTooLarge(cap + 1, cap);
    out *= base;
  }
  if (out > cap) throw StateSpaceTooLarge(out, cap);
  return out;
}

void require_states(const TensorSystem& sys, Eigen::Index n, const char* what) {
  if (static_cast<std::size_t>(n) != sys.states())
    throw DimensionMismatch(sys.states(), static_cast<std::size_t>(n), what);
}

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
  return f;
}

}  // namespace

TensorSystem::TensorSystem(Generator single, Generator product, std::size_t particles)
    : single_(std::move(single)),
      product_(std::move(product)),
      sites_(static_cast<std::size_t>(single_.dim())),
      particles_(particles),
      states_(static_cast<std::size_t>(product_.dim())) {}

std::size_t TensorSystem::flat(const std::vector<std::size_t>& config) const {
  if (config.size() != particles_)
    throw DimensionMismatch(particles_, config.size(), "configuration length");
  std::size_t idx = 0;
  for (const std::size_t x : config) {
    if (x >= sites_) throw InvalidArgument("site index out of range");
    idx = idx * sites_ + x;
  }
  return idx;
}

std::vector<std::size_t> TensorSystem::config(std::size_t flat_index) const {
  if (flat_index >= states_) throw InvalidArgument("flat index out of range");
  std::vector<std::size_t> out(particles_);
  for (std::size_t k = particles_; k-- > 0;) {
    out[k] = flat_index % sites_;
    flat_index /= sites_;
  }
  return out;
}

std::size_t TensorSystem::permuted(std::size_t flat_index, const std::vector<std::size_t>& perm) const {
  const auto x = config(flat_index);
  std::vector<std::size_t> y(particles_);
  for (std::size_t i = 0; i < particles_; ++i) y[i] = x[perm[i]];
  return flat(y);
}

TensorSystem kronecker_sum(const Generator& q1, std::size_t particles, std::size_t cap) {
  if (particles < 1) throw InvalidArgument("need at least one particle");
  const auto d = static_cast<std::size_t>(q1.dim());
  const std::size_t n = checked_power(d, particles, cap);

  Matrix qn = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::size_t> stride(particles, 1);
  for (std::size_t k = particles - 1; k-- > 0;) stride[k] = stride[k + 1] * d;

  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t k = 0; k < particles; ++k) {
      const std::size_t xk = (x / stride[k]) % d;
      for (std::size_t yk = 0; yk < d; ++yk) {
        const double rate = q1(static_cast<Eigen::Index>(xk), static_cast<Eigen::Index>(yk));
        const std::size_t y = x - xk * stride[k] + yk * stride[k];
        qn(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) += rate;
      }
    }
  }
  return TensorSystem(q1, validate_generator(qn), particles);
}

Potential separable_potential(const Potential& v, const TensorSystem& sys) {
  if (static_cast<std::size_t>(v.dim()) != sys.sites())
    throw DimensionMismatch(sys.sites(), static_cast<std::size_t>(v.dim()), "single-particle potential");
  Vector out(static_cast<Eigen::Index>(sys.states()));
  const double n = static_cast<double>(sys.particles());
  for (std::size_t x = 0; x < sys.states(); ++x) {
    double acc = 0.0;
    for (const std::size_t xi : sys.config(x)) acc += v[static_cast<Eigen::Index>(xi)];
    out[static_cast<Eigen::Index>(x)] = acc / n;
  }
  return Potential(std::move(out));
}

Potential separable_potential(const Potential& v, std::size_t particles, std::size_t cap) {
  if (particles < 1) throw InvalidArgument("need at least one particle");
  const auto d = static_cast<std::size_t>(v.dim());
  const std::size_t n = checked_power(d, particles, cap);
  Vector out(static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x) {
    double acc = 0.0;
    std::size_t rest = x;
    for (std::size_t k = 0; k < particles; ++k) {
      acc += v[static_cast<Eigen::Index>(rest % d)];
      rest /= d;
    }
    out[static_cast<Eigen::Index>(x)] = acc / static_cast<double>(particles);
  }
  return Potential(std::move(out));
}

Potential pairwise_interaction(const Matrix& w, const TensorSystem& sys) {
  const auto d = static_cast<Eigen::Index>(sys.sites());
  if (w.rows() != d || w.cols() != d)
    throw DimensionMismatch(sys.sites(), static_cast<std::size_t>(w.rows()), "pairwise interaction");
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale_of(w))
    throw InvalidArgument("pairwise interaction matrix must be symmetric");
  const std::size_t n = sys.particles();
  Vector out = Vector::Zero(static_cast<Eigen::Index>(sys.states()));
  if (n < 2) return Potential(std::move(out));
  const double pairs = static_cast<double>(n * (n - 1) / 2);
  for (std::size_t x = 0; x < sys.states(); ++x) {
    const auto c = sys.config(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        acc += w(static_cast<Eigen::Index>(c[i]), static_cast<Eigen::Index>(c[j]));
    out[static_cast<Eigen::Index>(x)] = acc / pairs;
  }
  return Potential(std::move(out));
}

std::vector<std::vector<std::size_t>> permutations(std::size_t n) {
  if (n > kMaxPermutedParticles)
    throw InvalidArgument("permutation enumeration is limited to N <= 6");
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

Vector symmetrize(const Vector& values, const TensorSystem& sys) {
  require_states(sys, values.size(), "symmetrize");
  const auto perms = permutations(sys.particles());
  Vector out = Vector::Zero(values.size());
  for (std::size_t x = 0; x < sys.states(); ++x)
    for (const auto& p : perms)
      out[static_cast<Eigen::Index>(sys.permuted(x, p))] += values[static_cast<Eigen::Index>(x)];
  return out / factorial(sys.particles());
}

ProbMeasure symmetrize_measure(const ProbMeasure& mu, const TensorSystem& sys) {
  return ProbMeasure::normalized(symmetrize(mu.weights(), sys));
}

ProbMeasure marginal(const ProbMeasure& mu, const TensorSystem& sys, std::size_t coordinate) {
  require_states(sys, mu.dim(), "marginal");
  if (coordinate >= sys.particles()) throw InvalidArgument("marginal coordinate out of range");
  Vector rho = Vector::Zero(static_cast<Eigen::Index>(sys.sites()));
  std::size_t stride = 1;
  for (std::size_t k = coordinate + 1; k < sys.particles(); ++k) stride *= sys.sites();
  for (std::size_t x = 0; x < sys.states(); ++x)
    rho[static_cast<Eigen::Index>((x / stride) % sys.sites())] += mu[static_cast<Eigen::Index>(x)];
  return ProbMeasure::normalized(rho);
}

bool is_symmetric(const Vector& values, const TensorSystem& sys, double tol) {
  require_states(sys, values.size(), "is_symmetric");
  const auto perms = permutations(sys.particles());
  for (std::size_t x = 0; x < sys.states(); ++x)
    for (const auto& p : perms)
      if (std::abs(values[static_cast<Eigen::Index>(sys.permuted(x, p))] -
                   values[static_cast<Eigen::Index>(x)]) > tol)
        return false;
  return true;
}

}  // namespace dvsg
