#pragma once

#include "dvsg/types.hpp"

namespace dvsg {

// Dense matrix exponential by scaling and squaring with a diagonal [6/6] Pade
// approximant. The argument is scaled by 2^-s so that ||A / 2^s||_1 <= 1/2,
// where the truncation error of the approximant is below 1e-19 relative.
// Throws NonFinite when the result overflows.
Matrix expm(const Matrix& a);

// exp(t A); t may be zero (returns the identity exactly).
Matrix expm(const Matrix& a, double t);

}  // namespace dvsg
