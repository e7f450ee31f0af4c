#include "bstar/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "bstar/errors.hpp"
#include "bstar/linalg.hpp"
#include "bstar/parallel.hpp"

namespace bstar {

Eigen::VectorXd forecast(const FitResult& fit, const Eigen::VectorXd& y_last, int horizon) {
  if (horizon < 1) throw DomainError("forecast: horizon must be at least 1");
  if (y_last.size() != fit.p) throw DomainError("forecast: y_last must have length p");
  const Eigen::MatrixXd d = inv_i_minus(fit.a) * fit.b;
  Eigen::VectorXd y = y_last;
  for (int h = 0; h < horizon; ++h) y = d * y;
  return y;
}

double to_observation_scale(double value, double mean, bool log_scale) {
  const double shifted = value + mean;
  return log_scale ? std::exp(shifted) : shifted;
}

double LevelStat::rate() const {
  if (actual == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(hit) / static_cast<double>(actual);
}

int level_of(double value, const std::vector<double>& breaks) {
  int level = 0;
  for (double b : breaks) {
    if (value >= b)
      ++level;
    else
      break;
  }
  return level;
}

namespace {

void require_ascending(const std::vector<double>& breaks) {
  for (std::size_t i = 1; i < breaks.size(); ++i)
    if (!(breaks[i] > breaks[i - 1]))
      throw DomainError("level breaks must be strictly ascending");
}

}  // namespace

std::vector<LevelStat> level_accuracy(const std::vector<Eigen::VectorXd>& predicted,
                                      const std::vector<Eigen::VectorXd>& actual,
                                      const std::vector<double>& breaks) {
  if (breaks.empty()) throw DomainError("level_accuracy: no level breaks given");
  require_ascending(breaks);
  if (predicted.size() != actual.size())
    throw DomainError("level_accuracy: prediction and actual counts differ");
  std::vector<LevelStat> stats(breaks.size() + 1);
  for (std::size_t t = 0; t < predicted.size(); ++t) {
    if (predicted[t].size() != actual[t].size())
      throw DomainError("level_accuracy: prediction and actual lengths differ");
    for (Eigen::Index i = 0; i < predicted[t].size(); ++i) {
      const int la = level_of(actual[t][i], breaks);
      const int lp = level_of(predicted[t][i], breaks);
      ++stats[la].actual;
      if (la == lp) ++stats[la].hit;
    }
  }
  return stats;
}

namespace {

struct OriginResult {
  // Squared errors per horizon index, one entry per component.
  std::vector<Eigen::VectorXd> sq_err;
  // Observation-scale (prediction, actual) pairs when levels are requested.
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> scaled;
  std::vector<char> present;
};

}  // namespace

CvReport moving_window_cv(const PanelSeries& y, int window, const std::vector<int>& horizons,
                          const CvOptions& opts) {
  const int p = y.p();
  const int n = y.n();
  if (window < 2 || window >= n) throw DomainError("moving_window_cv: need 2 <= window < n");
  if (horizons.empty()) throw DomainError("moving_window_cv: no horizons given");
  for (int h : horizons) {
    if (h < 1) throw DomainError("moving_window_cv: horizons must be at least 1");
    if (window + h > n)
      throw DomainError("moving_window_cv: horizon " + std::to_string(h) +
                        " leaves no forecast origin inside the sample");
  }
  const bool with_levels = !opts.thresholds.empty();
  if (with_levels) {
    require_ascending(opts.thresholds);
    if (!opts.scale) throw DomainError("moving_window_cv: thresholds need scale information");
    if (opts.scale->row_means.size() != p)
      throw DomainError("moving_window_cv: scale means must have length p");
  }

  int k_hat;
  if (opts.k) {
    k_hat = *opts.k;
  } else {
    const PanelSeries head(y.data().leftCols(window), true, y.ordering());
    k_hat = select_bandwidth(head, opts.select).k_hat;
  }

  const int n_h = static_cast<int>(horizons.size());
  const int h_max = *std::max_element(horizons.begin(), horizons.end());
  const int n_origins = n - window;  // origins are columns window-1 .. n-2
  std::vector<OriginResult> results(n_origins);
  parallel_for(n_origins, resolve_threads(opts.threads), [&](int o) {
    const int t0 = window - 1 + o;
    const PanelSeries slice(y.data().middleCols(t0 - window + 1, window), true, y.ordering());
    const FitResult f = fit(slice, opts.method, k_hat, 1);
    OriginResult res;
    res.sq_err.resize(n_h);
    res.present.assign(n_h, 0);
    if (with_levels) res.scaled.resize(n_h);
    const Eigen::MatrixXd d = inv_i_minus(f.a) * f.b;
    Eigen::VectorXd pred = y.data().col(t0);
    for (int h = 1; h <= h_max && t0 + h <= n - 1; ++h) {
      pred = d * pred;
      for (int hi = 0; hi < n_h; ++hi) {
        if (horizons[hi] != h) continue;
        const Eigen::VectorXd actual = y.data().col(t0 + h);
        res.sq_err[hi] = (pred - actual).array().square();
        res.present[hi] = 1;
        if (with_levels) {
          Eigen::VectorXd pred_obs(p), actual_obs(p);
          for (int i = 0; i < p; ++i) {
            pred_obs[i] = to_observation_scale(pred[i], opts.scale->row_means[i], opts.scale->log_scale);
            actual_obs[i] =
                to_observation_scale(actual[i], opts.scale->row_means[i], opts.scale->log_scale);
          }
          res.scaled[hi] = {std::move(pred_obs), std::move(actual_obs)};
        }
      }
    }
    results[o] = std::move(res);
  });

  CvReport report;
  report.k_hat = k_hat;
  report.horizons.resize(n_h);
  for (int hi = 0; hi < n_h; ++hi) {
    CvHorizon& ch = report.horizons[hi];
    ch.h = horizons[hi];
    double sum = 0.0, sumsq = 0.0;
    long long count = 0;
    std::vector<Eigen::VectorXd> preds, actuals;
    for (const OriginResult& res : results) {
      if (!res.present[hi]) continue;
      for (Eigen::Index i = 0; i < res.sq_err[hi].size(); ++i) {
        const double e2 = res.sq_err[hi][i];
        sum += e2;
        sumsq += e2 * e2;
        ++count;
      }
      if (with_levels) {
        preds.push_back(res.scaled[hi].first);
        actuals.push_back(res.scaled[hi].second);
      }
    }
    ch.instances = count;
    ch.mspe = sum / static_cast<double>(count);
    ch.sd = count > 1 ? std::sqrt(std::max(0.0, (sumsq - sum * sum / count) / (count - 1))) : 0.0;
    if (with_levels) ch.levels = level_accuracy(preds, actuals, opts.thresholds);
  }
  return report;
}

std::vector<CvReport> select_ordering(const Eigen::MatrixXd& raw,
                                      const std::vector<OrderingCandidate>& candidates, int window,
                                      const std::vector<int>& horizons, const CvOptions& opts,
                                      bool log_scale, const std::vector<double>& thresholds) {
  if (candidates.empty()) throw DomainError("select_ordering: no candidate orderings");
  const int p = static_cast<int>(raw.rows());
  std::vector<CvReport> reports;
  reports.reserve(candidates.size());
  for (const OrderingCandidate& cand : candidates) {
    Eigen::MatrixXd arranged(p, raw.cols());
    {
      // PanelSeries validates the permutation; build it first on unpermuted
      // data to reuse that check before indexing.
      PanelSeries probe(raw, false, cand.perm);
      for (int r = 0; r < p; ++r) arranged.row(r) = raw.row(probe.ordering()[r]);
    }
    Eigen::VectorXd means = arranged.rowwise().mean();
    arranged.colwise() -= means;
    const PanelSeries series(std::move(arranged), true, cand.perm);
    CvOptions local = opts;
    if (!thresholds.empty()) {
      local.thresholds = thresholds;
      local.scale = ScaleInfo{std::move(means), log_scale};
    }
    CvReport rep = moving_window_cv(series, window, horizons, local);
    rep.label = cand.label;
    reports.push_back(std::move(rep));
  }
  std::stable_sort(reports.begin(), reports.end(), [](const CvReport& a, const CvReport& b) {
    return a.horizons.front().mspe < b.horizons.front().mspe;
  });
  return reports;
}

}  // namespace bstar
