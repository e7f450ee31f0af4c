#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bstar {

// Free coefficient positions of one row of the banded autoregression.
// spatial_cols are the within-time neighbours j with 1 <= |j - row| <= k
// (entries of A); lag_cols are the lagged neighbours with |j - row| <= k
// (entries of B). Indices are 0-based and ascending; both sets clip at the
// panel edge.
struct BandSupport {
  int p = 0;
  int k = 0;
  int row = 0;
  std::vector<int> spatial_cols;
  std::vector<int> lag_cols;

  int n_params() const { return static_cast<int>(spatial_cols.size() + lag_cols.size()); }
};

BandSupport band_support(int p, int k, int row);

// Largest bandwidth for which every row keeps n_params() <= p, so the one-lag
// row regressions stay determined.
int max_feasible_bandwidth(int p);

// y_t = A y_t + B y_{t-1} + eps_t with A and B banded to width k0 and
// diag(A) = 0. Validated on construction, immutable afterwards.
class BandedModel {
 public:
  BandedModel(int k0, Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd sigma_eps);
  BandedModel(int k0, Eigen::MatrixXd a, Eigen::MatrixXd b);

  int p() const { return static_cast<int>(a_.rows()); }
  int k0() const { return k0_; }
  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::MatrixXd& b() const { return b_; }
  const Eigen::MatrixXd& sigma_eps() const { return sigma_eps_; }

 private:
  void validate() const;

  int k0_;
  Eigen::MatrixXd a_;
  Eigen::MatrixXd b_;
  Eigen::MatrixXd sigma_eps_;
};

// (I - A)^{-1} B.
Eigen::MatrixXd reduced_form(const BandedModel& m);

struct Stability {
  bool stable = false;
  double spectral_radius = 0.0;
};

// Spectral radius of the reduced form, compared against 1 - kStabilityMargin.
Stability check_stability(const BandedModel& m);

// Stacks the free coefficients of one row: A entries over spatial_cols
// ascending, then B entries over lag_cols ascending.
Eigen::VectorXd pack_beta(const BandedModel& m, int row);

// Scatters a stacked coefficient vector back into full-length rows of A and B.
std::pair<Eigen::VectorXd, Eigen::VectorXd> unpack_beta(const Eigen::VectorXd& beta,
                                                        const BandSupport& support);

// One p x n block of panel observations, one column per time point.
// `centered` records that the rows may be treated as mean zero: simulated
// series are mean zero by construction, ingested data is centered explicitly.
// `ordering` maps model rows to source rows (row r holds source row
// ordering[r]).
class PanelSeries {
 public:
  PanelSeries(Eigen::MatrixXd data, bool centered);
  PanelSeries(Eigen::MatrixXd data, bool centered, std::vector<int> ordering);

  int p() const { return static_cast<int>(data_.rows()); }
  int n() const { return static_cast<int>(data_.cols()); }
  const Eigen::MatrixXd& data() const { return data_; }
  bool centered() const { return centered_; }
  const std::vector<int>& ordering() const { return ordering_; }

 private:
  Eigen::MatrixXd data_;
  bool centered_;
  std::vector<int> ordering_;
};

}  // namespace bstar
