#include "dvsg/expm.hpp"

#include <array>
#include <cmath>

#include "dvsg/errors.hpp"

namespace dvsg {

namespace {

// c_k = (2q - k)! q! / ((2q)! k! (q - k)!) for q = 6
constexpr std::array<double, 7> kPade6 = {
    1.0,
    1.0 / 2.0,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
};

constexpr double kScaledNorm = 0.5;

}  // namespace

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols())
    throw DimensionMismatch(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()),
                            "expm of non-square matrix");
  if (!a.allFinite()) throw NonFinite("expm argument has non-finite entries");
  const Eigen::Index n = a.rows();
  if (n == 0) return Matrix(0, 0);

  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > kScaledNorm) squarings = static_cast<int>(std::ceil(std::log2(norm / kScaledNorm)));
  const Matrix s = a / std::ldexp(1.0, squarings);

  const Matrix ident = Matrix::Identity(n, n);
  const Matrix s2 = s * s;
  const Matrix s4 = s2 * s2;
  const Matrix s6 = s4 * s2;
  const Matrix even = kPade6[0] * ident + kPade6[2] * s2 + kPade6[4] * s4 + kPade6[6] * s6;
  const Matrix odd = s * (kPade6[1] * ident + kPade6[3] * s2 + kPade6[5] * s4);

  // r = (even - odd)^{-1} (even + odd)
  Matrix r = (even - odd).partialPivLu().solve(even + odd);
  for (int k = 0; k < squarings; ++k) {
    r = r * r;
    if (!r.allFinite()) break;
  }
  if (!r.allFinite()) throw NonFinite("matrix exponential overflowed");
  return r;
}

Matrix expm(const Matrix& a, double t) {
  if (!std::isfinite(t)) throw NonFinite("non-finite time in expm");
  if (t == 0.0) return Matrix::Identity(a.rows(), a.cols());
  return expm(t * a);
}

}  // namespace dvsg
