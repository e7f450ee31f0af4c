#include "bstar/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "bstar/errors.hpp"
#include "bstar/rng.hpp"

namespace bstar {

double op_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  SplitMix64 rng(0x5eedc0de0b57a7ULL);
  Eigen::VectorXd v(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1.0, 1.0);
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXd w = m.transpose() * (m * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    const double next = std::sqrt(nw);
    if (it > 0 && std::abs(next - sigma) <= 1e-8 * next) return next;
    sigma = next;
  }
  return sigma;
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DomainError("spectral_radius: matrix must be square");
  if (m.rows() == 1) return std::abs(m(0, 0));
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  if (es.info() != Eigen::Success) throw NumericError("spectral_radius: eigenvalue iteration failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& d, const Eigen::MatrixXd& q) {
  if (d.rows() != d.cols() || q.rows() != q.cols() || d.rows() != q.rows())
    throw DomainError("solve_discrete_lyapunov: dimension mismatch");
  const double rho = spectral_radius(d);
  if (rho >= 1.0 - kStabilityMargin)
    throw NumericError("solve_discrete_lyapunov: spectral radius " + std::to_string(rho) +
                       " is not below 1");
  Eigen::MatrixXd x = q;
  Eigen::MatrixXd a = d;
  for (int it = 0; it < 128; ++it) {
    const Eigen::MatrixXd update = a * x * a.transpose();
    x += update;
    if (update.norm() <= 1e-16 * std::max(1.0, x.norm())) break;
    a = a * a;
  }
  return 0.5 * (x + x.transpose());
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) throw DomainError("spd_sqrt: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) throw NumericError("spd_sqrt: eigendecomposition failed");
  Eigen::VectorXd lam = es.eigenvalues();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < -1e-10 * scale)
      throw NumericError("spd_sqrt: matrix is not positive semidefinite");
    lam[i] = std::sqrt(std::max(lam[i], 0.0));
  }
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd inv_i_minus(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DomainError("inv_i_minus: matrix must be square");
  const Eigen::Index p = a.rows();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(p, p) - a);
  const double rc = lu.rcond();
  if (!(rc > 1.0 / kConditionLimit)) {
    const std::string cond = rc > 0.0 ? std::to_string(1.0 / rc) : "infinite";
    throw NumericError("matrix I - A is singular or ill-conditioned (condition estimate " + cond + ")");
  }
  return lu.inverse();
}

}  // namespace bstar
