#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bstar/model.hpp"

namespace bstar {

// Lag-0 sample second moment (1/n) sum_{t=2..n} y_{t-1} y_{t-1}^T: the final
// observation never enters, and the divisor is n, not n - 1.
Eigen::MatrixXd sample_autocov0(const PanelSeries& y);

// Lag-j sample second moment (1/n) sum_{t=j+1..n} y_t y_{t-j}^T for j >= 1.
Eigen::MatrixXd sample_autocov(const PanelSeries& y, int lag);

// Stacked regressor matrix of the r-equation moment system (r*p x 2p). Block
// row j is [ transposed lag-j moment | lagged second moment with the terminal
// term dropped ]; its columns line up with (spatial, lagged) coefficients.
Eigen::MatrixXd build_design(const PanelSeries& y, int r);

// Second moments consumed by the row regressions. from_series holds the
// truncated sample versions; population holds the exact moments implied by a
// stable model, with the same layout, so estimator oracles can share code.
class MomentSet {
 public:
  static MomentSet from_series(const PanelSeries& y, int max_lag = 1);
  static MomentSet population(const BandedModel& m, int max_lag = 1);

  int p() const { return static_cast<int>(cov0_.rows()); }
  int n() const { return n_; }  // 0 for population moments
  int max_lag() const { return static_cast<int>(cov_.size()); }
  const Eigen::MatrixXd& cov0() const { return cov0_; }
  const Eigen::MatrixXd& cov(int lag) const;
  const Eigen::MatrixXd& design() const { return design_; }

 private:
  MomentSet() = default;

  int n_ = 0;
  Eigen::MatrixXd cov0_;
  std::vector<Eigen::MatrixXd> cov_;  // lags 1..max_lag
  Eigen::MatrixXd design_;
};

}  // namespace bstar
