#include "bstar/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "bstar/errors.hpp"
#include "bstar/linalg.hpp"

namespace bstar {

BandSupport band_support(int p, int k, int row) {
  if (p < 1) throw DomainError("band_support: p must be positive");
  if (k < 0 || k >= p) throw DomainError("band_support: need 0 <= k < p");
  if (row < 0 || row >= p) throw DomainError("band_support: row out of range");
  BandSupport s;
  s.p = p;
  s.k = k;
  s.row = row;
  const int lo = std::max(0, row - k);
  const int hi = std::min(p - 1, row + k);
  for (int j = lo; j <= hi; ++j) {
    if (j != row) s.spatial_cols.push_back(j);
    s.lag_cols.push_back(j);
  }
  return s;
}

int max_feasible_bandwidth(int p) {
  if (p < 1) throw DomainError("max_feasible_bandwidth: p must be positive");
  // The widest row has 2 * min(2k, p - 1) + 1 free coefficients; that stays
  // within p exactly when k <= (p - 1) / 4.
  return (p - 1) / 4;
}

BandedModel::BandedModel(int k0, Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd sigma_eps)
    : k0_(k0), a_(std::move(a)), b_(std::move(b)), sigma_eps_(std::move(sigma_eps)) {
  validate();
}

BandedModel::BandedModel(int k0, Eigen::MatrixXd a, Eigen::MatrixXd b)
    : k0_(k0), a_(std::move(a)), b_(std::move(b)) {
  sigma_eps_ = Eigen::MatrixXd::Identity(a_.rows(), a_.rows());
  validate();
}

void BandedModel::validate() const {
  const Eigen::Index p = a_.rows();
  if (p < 1) throw DomainError("BandedModel: p must be positive");
  if (a_.cols() != p || b_.rows() != p || b_.cols() != p || sigma_eps_.rows() != p ||
      sigma_eps_.cols() != p)
    throw DomainError("BandedModel: A, B and sigma_eps must be square with matching size");
  if (k0_ < 0 || k0_ >= p) throw DomainError("BandedModel: need 0 <= k0 < p");
  if (!a_.allFinite() || !b_.allFinite() || !sigma_eps_.allFinite())
    throw DomainError("BandedModel: coefficients must be finite");
  for (Eigen::Index i = 0; i < p; ++i) {
    if (a_(i, i) != 0.0) throw DomainError("BandedModel: diagonal of A must be zero");
    for (Eigen::Index j = 0; j < p; ++j) {
      if (std::abs(static_cast<long>(i - j)) > k0_ && (a_(i, j) != 0.0 || b_(i, j) != 0.0))
        throw DomainError("BandedModel: nonzero entry outside the band at (" +
                          std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")");
    }
  }
  const double scale = std::max(1.0, sigma_eps_.cwiseAbs().maxCoeff());
  if ((sigma_eps_ - sigma_eps_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw DomainError("BandedModel: sigma_eps must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_eps_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw DomainError("BandedModel: sigma_eps must be positive definite");
}

Eigen::MatrixXd reduced_form(const BandedModel& m) { return inv_i_minus(m.a()) * m.b(); }

Stability check_stability(const BandedModel& m) {
  const double rho = spectral_radius(reduced_form(m));
  return {rho < 1.0 - kStabilityMargin, rho};
}

Eigen::VectorXd pack_beta(const BandedModel& m, int row) {
  const BandSupport s = band_support(m.p(), m.k0(), row);
  Eigen::VectorXd beta(s.n_params());
  int c = 0;
  for (int j : s.spatial_cols) beta[c++] = m.a()(row, j);
  for (int j : s.lag_cols) beta[c++] = m.b()(row, j);
  return beta;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> unpack_beta(const Eigen::VectorXd& beta,
                                                        const BandSupport& support) {
  if (beta.size() != support.n_params())
    throw DomainError("unpack_beta: expected " + std::to_string(support.n_params()) +
                      " coefficients, got " + std::to_string(beta.size()));
  Eigen::VectorXd a_row = Eigen::VectorXd::Zero(support.p);
  Eigen::VectorXd b_row = Eigen::VectorXd::Zero(support.p);
  int c = 0;
  for (int j : support.spatial_cols) a_row[j] = beta[c++];
  for (int j : support.lag_cols) b_row[j] = beta[c++];
  return {std::move(a_row), std::move(b_row)};
}

PanelSeries::PanelSeries(Eigen::MatrixXd data, bool centered)
    : PanelSeries(std::move(data), centered, {}) {}

PanelSeries::PanelSeries(Eigen::MatrixXd data, bool centered, std::vector<int> ordering)
    : data_(std::move(data)), centered_(centered), ordering_(std::move(ordering)) {
  const int p = static_cast<int>(data_.rows());
  if (p < 1 || data_.cols() < 1) throw DomainError("PanelSeries: empty data");
  if (!data_.allFinite()) throw DomainError("PanelSeries: data must be finite");
  if (ordering_.empty()) {
    ordering_.resize(p);
    for (int i = 0; i < p; ++i) ordering_[i] = i;
  } else {
    if (static_cast<int>(ordering_.size()) != p)
      throw DomainError("PanelSeries: ordering length must equal p");
    std::vector<char> seen(p, 0);
    for (int v : ordering_) {
      if (v < 0 || v >= p || seen[v]) throw DomainError("PanelSeries: ordering must be a permutation");
      seen[v] = 1;
    }
  }
}

}  // namespace bstar
