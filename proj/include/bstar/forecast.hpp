#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bstar/bandwidth.hpp"
#include "bstar/estimate.hpp"

namespace bstar {

// h-step-ahead point forecast from the last observation: D^h y with
// D = (I - A)^{-1} B.
Eigen::VectorXd forecast(const FitResult& fit, const Eigen::VectorXd& y_last, int horizon);

// Mapping from the modelling scale back to the observation scale: per-series
// means are added back, then exp is applied when the data was log transformed.
struct ScaleInfo {
  Eigen::VectorXd row_means;
  bool log_scale = false;
};

double to_observation_scale(double value, double mean, bool log_scale);

struct LevelStat {
  long long actual = 0;  // instances whose actual value fell in this level
  long long hit = 0;     // of those, how many were predicted at the same level
  double rate() const;   // hit / actual; NaN when the level never occurred
};

// Level of a value against ascending breaks: the number of breaks less than
// or equal to the value, so breaks (35, 75) give levels [.,35), [35,75), [75,.).
int level_of(double value, const std::vector<double>& breaks);

// Per-level hit rates over paired prediction/actual vectors on the
// observation scale.
std::vector<LevelStat> level_accuracy(const std::vector<Eigen::VectorXd>& predicted,
                                      const std::vector<Eigen::VectorXd>& actual,
                                      const std::vector<double>& breaks);

struct CvOptions {
  std::optional<int> k;            // fixed bandwidth; chosen on the first window when absent
  SelectOptions select;
  MethodSpec method;
  int threads = 1;
  std::vector<double> thresholds;  // observation-scale level breaks, ascending
  std::optional<ScaleInfo> scale;  // required when thresholds are given
};

struct CvHorizon {
  int h = 0;
  double mspe = 0.0;
  double sd = 0.0;  // standard deviation of squared errors across instances
  long long instances = 0;
  std::vector<LevelStat> levels;  // filled when thresholds were supplied
};

struct CvReport {
  std::string label;
  int k_hat = 0;
  std::vector<CvHorizon> horizons;
};

// Moving-window evaluation: for every origin t >= window the model is refit
// on the `window` observations ending at t and y_{t+h} is predicted from y_t.
// The bandwidth is chosen once, on the first window, and held fixed.
CvReport moving_window_cv(const PanelSeries& y, int window, const std::vector<int>& horizons,
                          const CvOptions& opts = {});

struct OrderingCandidate {
  std::string label;
  std::vector<int> perm;  // model row r holds source row perm[r]
};

// Evaluates candidate row arrangements of the raw (uncentered, already
// transformed) panel with moving_window_cv and ranks them by the MSPE of the
// first horizon. thresholds are on the observation scale; log_scale records
// whether `raw` is the log of the observations.
std::vector<CvReport> select_ordering(const Eigen::MatrixXd& raw,
                                      const std::vector<OrderingCandidate>& candidates, int window,
                                      const std::vector<int>& horizons, const CvOptions& opts = {},
                                      bool log_scale = false,
                                      const std::vector<double>& thresholds = {});

}  // namespace bstar
