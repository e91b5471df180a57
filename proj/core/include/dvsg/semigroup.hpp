#pragma once

#include <span>

#include "dvsg/generator.hpp"
#include "dvsg/types.hpp"

namespace dvsg {

// L + V on a finite state space: M = Q + diag(V).
class SchrodingerOperator {
 public:
  SchrodingerOperator(Generator q, Potential v);

  const Generator& generator() const { return q_; }
  const Potential& potential() const { return v_; }
  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return q_.dim(); }
  // max(1, max |M_ij|)
  double scale() const { return scale_; }

 private:
  Generator q_;
  Potential v_;
  Matrix m_;
  double scale_;
};

// P_t^V f = exp(tM) f. For f >= 0, round-off negatives within
// 1e-14 * max(1, |result|_inf) are clamped to zero.
Vector evolve(const SchrodingerOperator& op, double t, const Vector& f);

// Markov semigroup action P_t f = exp(tQ) f.
Vector evolve(const Generator& q, double t, const Vector& f);

// || u(t) - P_t f - int_0^t P_{t-s} V u(s) ds ||_inf with u(s) = P_s^V f and the
// integral by composite Simpson over n_steps panels (2 n_steps + 1 nodes).
double duhamel_residual(const SchrodingerOperator& op, double t, const Vector& f, int n_steps);

// e^{t min V} P_t f <= P_t^V f <= e^{t max V} P_t f entrywise, within
// 1e-12 * max(1, |bound|). Throws NegativeInput if f has a negative entry.
bool sandwich_check(const SchrodingerOperator& op, double t, const Vector& f);

// max_{t in grid} e^{-lambda t} max_x (exp(tM) 1)(x): a lower bound for
// C = sup_t e^{-lambda t} ||P_t^V||.
double growth_bound(const SchrodingerOperator& op, double lambda, std::span<const double> t_grid);

// Upper bound 1/eps' for the same constant, eps' = eps(T) e^{2T(min V - max V)}
// with eps(T) from condition (A). Infinite when eps(T) = 0.
double growth_bound_upper(const SchrodingerOperator& op, double horizon);

// Every state reaches every other along positive rates.
bool strongly_connected(const Generator& q);

// Condition (B): exp(TQ) has all entries strictly positive.
bool check_condition_B(const Generator& q, double horizon);

}  // namespace dvsg
