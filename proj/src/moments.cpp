#include "bstar/moments.hpp"

#include <string>

#include "bstar/errors.hpp"
#include "bstar/linalg.hpp"

namespace bstar {

namespace {

void require_usable(const PanelSeries& y) {
  if (!y.centered()) throw DomainError("moments: series must be centered");
  if (y.n() < 2) throw DomainError("moments: need at least two time points");
}

// (1/n) sum_{t=j+1..n} y_{t-j} y_{t-1}^T: the lagged regressor block of the
// j-th stacked equation. For j = 1 this is exactly the truncated lag-0 moment.
Eigen::MatrixXd lagged_block(const Eigen::MatrixXd& y, int j) {
  const Eigen::Index n = y.cols();
  const Eigen::Index len = n - j;
  return (y.middleCols(0, len) * y.middleCols(j - 1, len).transpose()) / static_cast<double>(n);
}

Eigen::MatrixXd cross_moment(const Eigen::MatrixXd& y, int j) {
  const Eigen::Index n = y.cols();
  const Eigen::Index len = n - j;
  return (y.middleCols(j, len) * y.middleCols(0, len).transpose()) / static_cast<double>(n);
}

Eigen::MatrixXd assemble_design(const Eigen::MatrixXd& y, const std::vector<Eigen::MatrixXd>& cov) {
  const Eigen::Index p = y.rows();
  const int r = static_cast<int>(cov.size());
  Eigen::MatrixXd g(r * p, 2 * p);
  for (int j = 1; j <= r; ++j) {
    g.block((j - 1) * p, 0, p, p) = cov[j - 1].transpose();
    g.block((j - 1) * p, p, p, p) = lagged_block(y, j);
  }
  return g;
}

}  // namespace

Eigen::MatrixXd sample_autocov0(const PanelSeries& y) {
  require_usable(y);
  return lagged_block(y.data(), 1);
}

Eigen::MatrixXd sample_autocov(const PanelSeries& y, int lag) {
  require_usable(y);
  if (lag < 1) throw DomainError("sample_autocov: lag must be at least 1");
  if (lag >= y.n())
    throw DomainError("sample_autocov: lag " + std::to_string(lag) + " is not below the series length " +
                      std::to_string(y.n()));
  return cross_moment(y.data(), lag);
}

Eigen::MatrixXd build_design(const PanelSeries& y, int r) {
  require_usable(y);
  if (r < 1) throw DomainError("build_design: r must be at least 1");
  if (y.n() <= r + 1) throw DomainError("build_design: need n > r + 1");
  std::vector<Eigen::MatrixXd> cov;
  cov.reserve(r);
  for (int j = 1; j <= r; ++j) cov.push_back(cross_moment(y.data(), j));
  return assemble_design(y.data(), cov);
}

MomentSet MomentSet::from_series(const PanelSeries& y, int max_lag) {
  require_usable(y);
  if (max_lag < 1) throw DomainError("MomentSet: max_lag must be at least 1");
  if (y.n() <= max_lag + 1) throw DomainError("MomentSet: need n > max_lag + 1");
  MomentSet m;
  m.n_ = y.n();
  m.cov0_ = lagged_block(y.data(), 1);
  m.cov_.reserve(max_lag);
  for (int j = 1; j <= max_lag; ++j) m.cov_.push_back(cross_moment(y.data(), j));
  m.design_ = assemble_design(y.data(), m.cov_);
  return m;
}

MomentSet MomentSet::population(const BandedModel& model, int max_lag) {
  if (max_lag < 1) throw DomainError("MomentSet: max_lag must be at least 1");
  const Eigen::MatrixXd inv = inv_i_minus(model.a());
  const Eigen::MatrixXd d = inv * model.b();
  const Eigen::MatrixXd sigma_xi = inv * model.sigma_eps() * inv.transpose();
  MomentSet m;
  m.n_ = 0;
  m.cov0_ = solve_discrete_lyapunov(d, sigma_xi);
  m.cov_.reserve(max_lag);
  Eigen::MatrixXd prev = m.cov0_;
  for (int j = 1; j <= max_lag; ++j) {
    m.cov_.push_back(d * prev);
    prev = m.cov_.back();
  }
  const int p = model.p();
  m.design_.resize(max_lag * p, 2 * p);
  for (int j = 1; j <= max_lag; ++j) {
    m.design_.block((j - 1) * p, 0, p, p) = m.cov_[j - 1].transpose();
    const Eigen::MatrixXd& lower = (j == 1) ? m.cov0_ : m.cov_[j - 2];
    m.design_.block((j - 1) * p, p, p, p) = lower.transpose();
  }
  return m;
}

const Eigen::MatrixXd& MomentSet::cov(int lag) const {
  if (lag < 1 || lag > max_lag())
    throw DomainError("MomentSet: lag " + std::to_string(lag) + " not materialized");
  return cov_[lag - 1];
}

}  // namespace bstar
