#pragma once

// Default numerical tolerances. Every entry is overridable through the
// per-operation options structs and, in the CLI, through the scenario
// "tolerances" map (key in brackets).
//
//   value                          default   meaning
//   kRowSum          [row_sum]     1e-12     generator row-sum repair band, relative to scale
//   kClamp                         1e-14     round-off band clamped to zero on nonnegative evolutions
//   kEigenResidual   [eigen]       1e-9      ||(M - lambda)psi||, ||pi^T(M - lambda)|| relative to scale
//   kRateGradient    [rate]        1e-10     ||grad F||_inf when minimizing the rate objective
//   kDualGap         [dual]        1e-8      |dv_sup lambda - spectral lambda|
//   kLegendreGradient [legendre]   1e-11     ||mu - mu(V)||_inf in the Legendre ascent
//   kInversion       [inversion]   1e-8      TV(rho(v), rho_target) stopping threshold
//   kHK              [hk]          1e-10     marginal / potential residual threshold in hk_verify
//   kReduced         [reduced]     1e-4      reduced variational principle vs spectral lambda
//   kSymmetry        [symmetry]    1e-12     permutation-invariance check
namespace dvsg::tol {

inline constexpr double kRowSum = 1e-12;
inline constexpr double kClamp = 1e-14;
inline constexpr double kEigenResidual = 1e-9;
inline constexpr double kRateGradient = 1e-10;
inline constexpr double kDualGap = 1e-8;
inline constexpr double kLegendreGradient = 1e-11;
inline constexpr double kInversion = 1e-8;
inline constexpr double kHK = 1e-10;
inline constexpr double kReduced = 1e-4;
inline constexpr double kSymmetry = 1e-12;

}  // namespace dvsg::tol
