#pragma once

// Shared fixtures and independent reference implementations for the test
// suite. Everything here recomputes quantities from first principles (plain
// loops, Kronecker algebra, dense SVD) so library results are checked against
// a second, unrelated code path.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bstar/model.hpp"
#include "bstar/rng.hpp"
#include "bstar/simulate.hpp"

namespace oracle {

// (1/n) sum_{t=2..n} y_{t-1} y_{t-1}^T by explicit loops.
inline Eigen::MatrixXd autocov0(const Eigen::MatrixXd& y) {
  const int p = static_cast<int>(y.rows());
  const int n = static_cast<int>(y.cols());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
  for (int t = 1; t < n; ++t)
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) s(i, j) += y(i, t - 1) * y(j, t - 1);
  return s / static_cast<double>(n);
}

// (1/n) sum_{t=j+1..n} y_t y_{t-j}^T by explicit loops.
inline Eigen::MatrixXd autocov(const Eigen::MatrixXd& y, int lag) {
  const int p = static_cast<int>(y.rows());
  const int n = static_cast<int>(y.cols());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
  for (int t = lag; t < n; ++t)
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) s(i, j) += y(i, t) * y(j, t - lag);
  return s / static_cast<double>(n);
}

// The stacked regressor matrix built the "corrected covariance" way: block
// row j is [ autocov(j)^T , autocov(j-1)^T - y_{n-j+1} y_n^T / n ], with the
// truncated autocov0 filling the correction at j = 1. The library assembles
// the same matrix from running sums instead, which is what makes this an
// independent cross-check.
inline Eigen::MatrixXd corrected_design(const Eigen::MatrixXd& y, int r) {
  const int p = static_cast<int>(y.rows());
  const int n = static_cast<int>(y.cols());
  Eigen::MatrixXd g(r * p, 2 * p);
  for (int j = 1; j <= r; ++j) {
    g.block((j - 1) * p, 0, p, p) = autocov(y, j).transpose();
    if (j == 1) {
      g.block(0, p, p, p) = autocov0(y);
    } else {
      g.block((j - 1) * p, p, p, p) =
          autocov(y, j - 1).transpose() -
          y.col(n - j) * y.col(n - 1).transpose() / static_cast<double>(n);
    }
  }
  return g;
}

// Stationary covariance by Kronecker vectorization: vec(S) solves
// (I - D (x) D) vec(S) = vec(Q). Only sensible for small p.
inline Eigen::MatrixXd kron_lyapunov(const Eigen::MatrixXd& d, const Eigen::MatrixXd& q) {
  const int p = static_cast<int>(d.rows());
  // vec(S) uses column-major order: entry (i, j) of S sits at j*p + i. The
  // map S -> D S D^T sends that entry through d(i,a) d(j,b) S(a,b).
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(p * p, p * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) op(j * p + i, b * p + a) = d(i, a) * d(j, b);
  Eigen::VectorXd vq(p * p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < p; ++i) vq(j * p + i) = q(i, j);
  const Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(p * p, p * p) - op;
  const Eigen::VectorXd vs = sys.fullPivLu().solve(vq);
  Eigen::MatrixXd s(p, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < p; ++i) s(i, j) = vs(j * p + i);
  return s;
}

// Spectral radius via normalized repeated squaring: ||M^(2^m)||^(1/2^m)
// converges to rho(M) without forming eigenvalues.
inline double gelfand_rho(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd x = m;
  double log_scale = 0.0;
  double weight = 1.0;
  for (int it = 0; it < 18; ++it) {
    const double nrm = x.norm();
    if (!(nrm > 0.0)) return 0.0;
    log_scale += weight * std::log(nrm);
    x /= nrm;
    x = (x * x).eval();
    weight /= 2.0;
  }
  log_scale += weight * std::log(std::max(x.norm(), 1e-300));
  return std::exp(log_scale);
}

inline double svd_opnorm(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

// Time-domain least squares of y_{i,t} on the contemporaneous band neighbours
// and the lagged band, t = 2..n. This is the (inconsistent under endogeneity)
// regression the moment-based estimator exists to avoid.
inline Eigen::VectorXd naive_ls_row(const Eigen::MatrixXd& y, int row, int k) {
  const int p = static_cast<int>(y.rows());
  const int n = static_cast<int>(y.cols());
  const bstar::BandSupport s = bstar::band_support(p, k, row);
  const int tau = s.n_params();
  Eigen::MatrixXd x(n - 1, tau);
  Eigen::VectorXd z(n - 1);
  for (int t = 1; t < n; ++t) {
    int c = 0;
    for (int j : s.spatial_cols) x(t - 1, c++) = y(j, t);
    for (int j : s.lag_cols) x(t - 1, c++) = y(j, t - 1);
    z(t - 1) = y(row, t);
  }
  return x.colPivHouseholderQr().solve(z);
}

}  // namespace oracle

namespace fixtures {

inline Eigen::MatrixXd white_noise(std::uint64_t seed, int p, int n) {
  bstar::SplitMix64 rng(seed);
  Eigen::MatrixXd y(p, n);
  for (int t = 0; t < n; ++t)
    for (int i = 0; i < p; ++i) y(i, t) = rng.normal();
  return y;
}

inline bstar::BandedModel stable_model(std::uint64_t seed, int p, int k0,
                                       bstar::DesignCase design = bstar::DesignCase::Uniform) {
  bstar::SimConfig cfg;
  cfg.p = p;
  cfg.k0 = k0;
  cfg.n = 8;
  cfg.design = design;
  cfg.seed = seed;
  return bstar::draw_stable_model(cfg).first;
}

// Rows whose moment regression has a provably full-rank design at k = k0:
// the exact edge rows and rows at least 2 k0 positions from either edge. The
// strip in between inherits a linear dependence from the edge equations.
inline bool identifiable_row(int p, int k0, int row) {
  const int edge = std::min(row, p - 1 - row);
  return edge == 0 || edge >= 2 * k0;
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace fixtures
