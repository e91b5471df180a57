#pragma once

#include <cstddef>
#include <vector>

#include "dvsg/tolerances.hpp"
#include "dvsg/types.hpp"

namespace dvsg {

// Rate matrix of a continuous-time Markov chain on {0, ..., d-1}: nonnegative
// off-diagonal rates, zero row sums, connected (undirected) support graph.
// Only constructible through validate_generator.
class Generator {
 public:
  Eigen::Index dim() const { return rates_.rows(); }
  const Matrix& rates() const { return rates_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return rates_(i, j); }
  // max(1, max |Q_ij|)
  double scale() const { return scale_; }

  // (Lg)(i) = sum_j Q_ij g_j
  Vector apply(const Vector& g) const;

 private:
  friend Generator validate_generator(const Matrix& raw, double tol_row);
  explicit Generator(Matrix rates);

  Matrix rates_;
  double scale_ = 1.0;
};

// Returns a Generator exactly when all three invariants hold. Rows whose sum is
// within tol_row * scale get their diagonal recomputed as -sum_{j != i} Q_ij.
// Throws NegativeOffDiagonal, RowSumNonzero or GraphDisconnected.
Generator validate_generator(const Matrix& raw, double tol_row = tol::kRowSum);

// Connected components of the undirected support graph of a square matrix
// (edge {i,j} when raw_ij > 0 or raw_ji > 0). Components are sorted.
std::vector<std::vector<std::size_t>> support_components(const Matrix& raw);

// Gamma(g)_i = sum_j Q_ij (g_j - g_i)^2, the carre du champ L(g^2) - 2 g Lg.
Vector carre_du_champ(const Generator& q, const Vector& g);

// The middle term L(f g^2) - 2 g L(f g) + g^2 L f of the Gamma sandwich.
Vector gamma_sandwich_middle(const Generator& q, const Vector& f, const Vector& g);

// max f * Gamma(g) >= L(fg^2) - 2gL(fg) + g^2 Lf >= min f * Gamma(g), entrywise,
// within 1e-10 times the magnitude of the terms involved.
bool gamma_sandwich_check(const Generator& q, const Vector& f, const Vector& g);

// Uniform positivity constant of P_T = exp(TQ):
//   eps = min_j (min_x P_xj / max_y P_yj),
// the largest eps with P_T|f|(x) >= eps P_T|f|(y) for all x, y, f.
double check_condition_A(const Generator& q, double horizon);

// Finite-state nondegeneracy: Gamma(g) == 0 forces g constant exactly when the
// undirected support graph is connected. Accepts raw (unvalidated) matrices.
bool check_condition_D(const Matrix& raw);
bool check_condition_D(const Generator& q);

}  // namespace dvsg
