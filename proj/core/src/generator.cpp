#include "dvsg/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dvsg/errors.hpp"
#include "dvsg/expm.hpp"

namespace dvsg {

namespace {

void require_length(const Generator& q, const Vector& v, const char* what) {
  if (v.size() != q.dim())
    throw DimensionMismatch(static_cast<std::size_t>(q.dim()), static_cast<std::size_t>(v.size()),
                            what);
}

}  // namespace

Generator::Generator(Matrix rates) : rates_(std::move(rates)), scale_(scale_of(rates_)) {}

Vector Generator::apply(const Vector& g) const {
  require_length(*this, g, "generator apply");
  return rates_ * g;
}

std::vector<std::vector<std::size_t>> support_components(const Matrix& raw) {
  const auto d = static_cast<std::size_t>(raw.rows());
  std::vector<std::size_t> parent(d);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      if (raw(i, j) > 0.0 || raw(j, i) > 0.0) parent[find(i)] = find(j);

  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::ptrdiff_t> slot(d, -1);
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::ptrdiff_t>(comps.size());
      comps.emplace_back();
    }
    comps[static_cast<std::size_t>(slot[root])].push_back(i);
  }
  return comps;
}

Generator validate_generator(const Matrix& raw, double tol_row) {
  if (raw.rows() != raw.cols())
    throw DimensionMismatch(static_cast<std::size_t>(raw.rows()),
                            static_cast<std::size_t>(raw.cols()), "generator must be square");
  if (raw.rows() < 1) throw InvalidArgument("generator needs at least one state");
  if (!raw.allFinite()) throw NonFinite("generator has non-finite entries");

  const Eigen::Index d = raw.rows();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (i != j && raw(i, j) < 0.0)
        throw NegativeOffDiagonal(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                  raw(i, j));

  const double band = tol_row * scale_of(raw);
  Matrix q = raw;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double sum = raw.row(i).sum();
    if (std::abs(sum) > band) throw RowSumNonzero(static_cast<std::size_t>(i), sum);
    q(i, i) = 0.0;
    q(i, i) = -q.row(i).sum();
  }

  auto comps = support_components(q);
  if (comps.size() > 1) throw GraphDisconnected(std::move(comps));
  return Generator(std::move(q));
}

Vector carre_du_champ(const Generator& q, const Vector& g) {
  require_length(q, g, "carre du champ");
  const Eigen::Index d = q.dim();
  Vector out = Vector::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j == i) continue;
      const double diff = g[j] - g[i];
      acc += q(i, j) * diff * diff;
    }
    out[i] = acc;
  }
  return out;
}

Vector gamma_sandwich_middle(const Generator& q, const Vector& f, const Vector& g) {
  require_length(q, f, "gamma sandwich (f)");
  require_length(q, g, "gamma sandwich (g)");
  const Vector fg = f.cwiseProduct(g);
  const Vector fg2 = fg.cwiseProduct(g);
  return q.apply(fg2) - 2.0 * g.cwiseProduct(q.apply(fg)) +
         g.cwiseProduct(g).cwiseProduct(q.apply(f));
}

bool gamma_sandwich_check(const Generator& q, const Vector& f, const Vector& g) {
  const Vector middle = gamma_sandwich_middle(q, f, g);
  const Vector gamma = carre_du_champ(q, g);
  const double fmax = f.maxCoeff();
  const double fmin = f.minCoeff();
  const double gnorm = std::max(1.0, g.cwiseAbs().maxCoeff());
  const double tol =
      1e-10 * q.scale() * std::max(1.0, f.cwiseAbs().maxCoeff()) * gnorm * gnorm;
  for (Eigen::Index i = 0; i < q.dim(); ++i) {
    if (middle[i] > fmax * gamma[i] + tol) return false;
    if (middle[i] < fmin * gamma[i] - tol) return false;
  }
  return true;
}

double check_condition_A(const Generator& q, double horizon) {
  if (!(horizon > 0.0)) throw InvalidArgument("condition (A) needs a positive horizon");
  if (q.dim() == 1) return 1.0;
  const Matrix p = expm(q.rates(), horizon);
  double eps = 1.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    const double hi = p.col(j).maxCoeff();
    const double lo = std::max(0.0, p.col(j).minCoeff());
    eps = std::min(eps, hi > 0.0 ? lo / hi : 0.0);
  }
  return eps;
}

bool check_condition_D(const Matrix& raw) {
  if (raw.rows() != raw.cols())
    throw DimensionMismatch(static_cast<std::size_t>(raw.rows()),
                            static_cast<std::size_t>(raw.cols()), "condition (D) needs a square matrix");
  return support_components(raw).size() <= 1;
}

bool check_condition_D(const Generator& q) { return check_condition_D(q.rates()); }

}  // namespace dvsg
