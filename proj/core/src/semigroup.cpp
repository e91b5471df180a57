#include "dvsg/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dvsg/errors.hpp"
#include "dvsg/expm.hpp"
#include "dvsg/tolerances.hpp"

namespace dvsg {

namespace {

void require_length(Eigen::Index d, const Vector& f, const char* what) {
  if (f.size() != d)
    throw DimensionMismatch(static_cast<std::size_t>(d), static_cast<std::size_t>(f.size()), what);
}

void require_time(double t) {
  if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("time must be finite and nonnegative");
}

Vector apply_exp(const Matrix& a, double t, const Vector& f) {
  Vector out = expm(a, t) * f;
  if (!out.allFinite()) throw NonFinite("semigroup evolution overflowed");
  if (f.size() > 0 && f.minCoeff() >= 0.0) {
    const double band = tol::kClamp * std::max(1.0, out.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < out.size(); ++i)
      if (out[i] < 0.0 && out[i] >= -band) out[i] = 0.0;
  }
  return out;
}

}  // namespace

SchrodingerOperator::SchrodingerOperator(Generator q, Potential v)
    : q_(std::move(q)), v_(std::move(v)) {
  if (v_.dim() != q_.dim())
    throw DimensionMismatch(static_cast<std::size_t>(q_.dim()),
                            static_cast<std::size_t>(v_.dim()), "potential length");
  m_ = q_.rates();
  m_.diagonal() += v_.values();
  scale_ = scale_of(m_);
}

Vector evolve(const SchrodingerOperator& op, double t, const Vector& f) {
  require_time(t);
  require_length(op.dim(), f, "evolve");
  return apply_exp(op.matrix(), t, f);
}

Vector evolve(const Generator& q, double t, const Vector& f) {
  require_time(t);
  require_length(q.dim(), f, "evolve");
  return apply_exp(q.rates(), t, f);
}

double duhamel_residual(const SchrodingerOperator& op, double t, const Vector& f, int n_steps) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("Duhamel residual needs t > 0");
  if (n_steps < 2) throw InvalidArgument("Duhamel residual needs at least two panels");
  require_length(op.dim(), f, "duhamel_residual");

  const int nodes = 2 * n_steps + 1;
  const double half = t / (2.0 * n_steps);
  const Matrix step_q = expm(op.generator().rates(), half);
  const Matrix step_m = expm(op.matrix(), half);
  const Vector& v = op.potential().values();

  // Horner form of sum_k w_k P_{t - s_k} V u(s_k): s_k = k * half, P_{t-s_k} = step_q^{2n-k}.
  Vector u = f;
  Vector acc = Vector::Zero(op.dim());
  for (int k = 0; k < nodes; ++k) {
    const double w = (k == 0 || k == nodes - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    if (k > 0) {
      acc = step_q * acc;
      u = step_m * u;
    }
    acc += (w * half / 3.0) * v.cwiseProduct(u);
  }
  if (!acc.allFinite()) throw NonFinite("Duhamel quadrature overflowed");

  const Vector ut = evolve(op, t, f);
  const Vector pt = evolve(op.generator(), t, f);
  return (ut - pt - acc).cwiseAbs().maxCoeff();
}

bool sandwich_check(const SchrodingerOperator& op, double t, const Vector& f) {
  require_time(t);
  require_length(op.dim(), f, "sandwich_check");
  if (f.minCoeff() < 0.0) throw NegativeInput("sandwich bounds need a nonnegative function");
  const Vector pv = evolve(op, t, f);
  const Vector p = evolve(op.generator(), t, f);
  const Vector lower = std::exp(t * op.potential().min()) * p;
  const Vector upper = std::exp(t * op.potential().max()) * p;
  for (Eigen::Index i = 0; i < op.dim(); ++i) {
    const double tol = 1e-12 * std::max(1.0, std::abs(upper[i]));
    if (pv[i] < lower[i] - tol || pv[i] > upper[i] + tol) return false;
  }
  return true;
}

double growth_bound(const SchrodingerOperator& op, double lambda, std::span<const double> t_grid) {
  if (t_grid.empty()) throw InvalidArgument("growth bound needs a nonempty time grid");
  Matrix shifted = op.matrix();
  shifted.diagonal().array() -= lambda;
  const Vector ones = Vector::Ones(op.dim());
  double best = 0.0;
  for (const double t : t_grid) {
    require_time(t);
    best = std::max(best, apply_exp(shifted, t, ones).maxCoeff());
  }
  return best;
}

double growth_bound_upper(const SchrodingerOperator& op, double horizon) {
  const double eps = check_condition_A(op.generator(), horizon);
  if (!(eps > 0.0)) return std::numeric_limits<double>::infinity();
  const double spread = op.potential().max() - op.potential().min();
  return std::exp(2.0 * horizon * spread) / eps;
}

bool strongly_connected(const Generator& q) {
  const Eigen::Index d = q.dim();
  auto reaches_all = [&](bool forward) {
    std::vector<char> seen(static_cast<std::size_t>(d), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    Eigen::Index count = 1;
    while (!stack.empty()) {
      const Eigen::Index i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < d; ++j) {
        const double rate = forward ? q(i, j) : q(j, i);
        if (j != i && rate > 0.0 && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = 1;
          ++count;
          stack.push_back(j);
        }
      }
    }
    return count == d;
  };
  return reaches_all(true) && reaches_all(false);
}

bool check_condition_B(const Generator& q, double horizon) {
  if (!(horizon > 0.0)) throw InvalidArgument("condition (B) needs a positive horizon");
  // Structural zeros of exp(TQ) can come back from the Pade solve as +-1e-18
  // round-off, so the numerical test is gated on reachability.
  return strongly_connected(q) && expm(q.rates(), horizon).minCoeff() > 0.0;
}

}  // namespace dvsg
