#include "bstar/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bstar/errors.hpp"
#include "bstar/estimate.hpp"
#include "bstar/parallel.hpp"

namespace bstar {

Eigen::VectorXd rss_profile(const MomentSet& m, int row, int K) {
  if (K < 1) throw DomainError("rss_profile: K must be at least 1");
  const int p = m.p();
  if (band_support(p, K, row).n_params() > p)
    throw DomainError("rss_profile: row " + std::to_string(row + 1) +
                      " is under-determined at K = " + std::to_string(K) + "; use a smaller K");
  Eigen::VectorXd rss(K + 1);
  for (int k = 0; k <= K; ++k) rss[k] = fit_row_full(m, row, k).rss;
  return rss;
}

int ratio_argmax(const Eigen::VectorXd& rss, double w_n) {
  if (rss.size() < 2) throw DomainError("ratio_argmax: need rss values for k = 0..K with K >= 1");
  if (!(w_n > 0.0)) throw DomainError("ratio_argmax: w_n must be positive");
  int best = 1;
  double best_ratio = (rss[0] + w_n) / (rss[1] + w_n);
  for (int k = 2; k < rss.size(); ++k) {
    const double ratio = (rss[k - 1] + w_n) / (rss[k] + w_n);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = k;
    }
  }
  return best;
}

int default_max_bandwidth(int p, int n) {
  if (n < 1) throw DomainError("default_max_bandwidth: n must be positive");
  const int by_n = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
  return std::min(by_n, max_feasible_bandwidth(p));
}

BandwidthSelection select_bandwidth(const MomentSet& m, double w_n, const SelectOptions& opts) {
  const int p = m.p();
  const int K = opts.K ? *opts.K : default_max_bandwidth(p, std::max(m.n(), 1));
  if (K < 1)
    throw DomainError("select_bandwidth: no feasible candidate bandwidth (p = " + std::to_string(p) +
                      " keeps every k under-determined)");
  if (K > max_feasible_bandwidth(p))
    throw DomainError("select_bandwidth: K = " + std::to_string(K) +
                      " under-determines interior rows; largest feasible K is " +
                      std::to_string(max_feasible_bandwidth(p)));
  if (!(w_n > 0.0)) throw DomainError("select_bandwidth: penalty must be positive");
  BandwidthSelection sel;
  sel.K = K;
  sel.w_n = w_n;
  sel.profiles.resize(p);
  parallel_for(p, resolve_threads(opts.threads), [&](int i) {
    RatioProfile prof;
    prof.row = i;
    prof.w_n = w_n;
    prof.rss = rss_profile(m, i, K);
    prof.ratios.resize(K);
    for (int k = 1; k <= K; ++k) prof.ratios[k - 1] = (prof.rss[k - 1] + w_n) / (prof.rss[k] + w_n);
    prof.k_pick = ratio_argmax(prof.rss, w_n);
    sel.profiles[i] = std::move(prof);
  });
  if (opts.median_vote) {
    std::vector<int> picks(p);
    for (int i = 0; i < p; ++i) picks[i] = sel.profiles[i].k_pick;
    std::sort(picks.begin(), picks.end());
    sel.k_hat = picks[(p - 1) / 2];
  } else {
    int best = 0;
    for (const RatioProfile& prof : sel.profiles) best = std::max(best, prof.k_pick);
    sel.k_hat = best;
  }
  return sel;
}

BandwidthSelection select_bandwidth(const PanelSeries& y, const SelectOptions& opts) {
  if (!(opts.C > 0.0)) throw DomainError("select_bandwidth: C must be positive");
  return select_bandwidth(MomentSet::from_series(y, 1), opts.C / y.n(), opts);
}

}  // namespace bstar
