#pragma once

#include <Eigen/Dense>

namespace bstar {

// Invertibility limit for I - A: beyond this condition number the reduced form
// is treated as non-existent.
inline constexpr double kConditionLimit = 1e12;

// A reduced form counts as stable only when its spectral radius stays below
// 1 - kStabilityMargin.
inline constexpr double kStabilityMargin = 1e-8;

// Relative cutoff below which trailing diagonal entries of the pivoted
// factorization are treated as zero in the row regressions.
inline constexpr double kRankTolerance = 1e-10;

// Largest singular value, by power iteration on M^T M with relative tolerance
// 1e-8 and a fixed deterministic start vector.
double op_norm(const Eigen::MatrixXd& m);

// Largest eigenvalue modulus.
double spectral_radius(const Eigen::MatrixXd& m);

// Solves X = D X D^T + Q for symmetric Q by squared Smith iteration.
// Requires spectral_radius(D) < 1.
Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& d, const Eigen::MatrixXd& q);

// Symmetric positive semidefinite square root.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& s);

// (I - A)^{-1}; NumericError when I - A is singular or its condition estimate
// exceeds kConditionLimit.
Eigen::MatrixXd inv_i_minus(const Eigen::MatrixXd& a);

}  // namespace bstar
