#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bstar/moments.hpp"

namespace bstar {

struct SelectOptions {
  std::optional<int> K;      // largest candidate; default min(floor(sqrt(n)), max_feasible_bandwidth(p))
  double C = 1.0;            // ridge constant in w_n = C / n
  bool median_vote = false;  // aggregate row picks by lower median instead of max
  int threads = 1;
};

// Residual profile and ratio votes of one row.
struct RatioProfile {
  int row = 0;
  double w_n = 0.0;
  Eigen::VectorXd rss;     // rss[k] for k = 0..K
  Eigen::VectorXd ratios;  // ratios[k-1] = (rss[k-1] + w_n) / (rss[k] + w_n) for k = 1..K
  int k_pick = 0;          // this row's argmax; ties resolve to the smaller k
};

struct BandwidthSelection {
  int k_hat = 0;
  int K = 0;
  double w_n = 0.0;
  std::vector<RatioProfile> profiles;  // one per row
};

// RSS_i(k) of the one-lag row regression for k = 0..K. k = 0 regresses on the
// row's own lag alone.
Eigen::VectorXd rss_profile(const MomentSet& m, int row, int K);

// argmax over k = 1..K of the padded RSS ratio; ties resolve to the smaller k.
int ratio_argmax(const Eigen::VectorXd& rss, double w_n);

// Ratio-maximization bandwidth choice, aggregated over rows (max by default).
BandwidthSelection select_bandwidth(const PanelSeries& y, const SelectOptions& opts = {});

// Same, on precomputed moments with an explicit penalty w_n.
BandwidthSelection select_bandwidth(const MomentSet& m, double w_n, const SelectOptions& opts = {});

int default_max_bandwidth(int p, int n);

}  // namespace bstar
