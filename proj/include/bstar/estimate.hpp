#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bstar/model.hpp"
#include "bstar/moments.hpp"

namespace bstar {

enum class Method { FullYW, ReducedYW, MultiYW };

struct MethodSpec {
  Method kind = Method::FullYW;
  int r = 1;             // lag depth, MultiYW only
  std::optional<int> d;  // equations kept per row, ReducedYW only; defaults to the n^0.495 rule
};

std::string method_name(const MethodSpec& m);

// One row's estimate: stacked coefficients (spatial block then lagged block,
// both ascending), the residual criterion of the moment regression, and
// whether the design had full column rank. rank_ok false means trailing
// directions were dropped and the minimum-norm solution returned.
struct RowFit {
  int row = 0;
  int k = 0;
  Eigen::VectorXd beta;
  double rss = 0.0;
  bool rank_ok = true;
};

struct FitResult {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  int k_used = 0;
  int p = 0;
  int n = 0;
  MethodSpec method;
  std::vector<RowFit> rows;
};

// Screening count for the reduced estimator: min(p, floor(n^0.495)).
int default_reduced_count(int p, int n);

// One-lag moment regression for a row at bandwidth k.
RowFit fit_row_full(const MomentSet& m, int row, int k);

// r-lag stacked moment regression; r = 1 coincides with fit_row_full.
RowFit fit_row_multi(const MomentSet& m, int row, int k, int r);

// Screening weights of the reduced estimator: the average absolute cross
// moment between lagged component l and the row's regressors. Rows with the
// d largest weights keep their equations.
Eigen::VectorXd equation_strengths(const PanelSeries& y, int row, int k);

// Reduced estimator: solves the row regression restricted to the d equations
// with the largest strengths (ties keep the smaller index). d = p reproduces
// fit_row_full exactly.
RowFit fit_row_reduced(const MomentSet& m, const Eigen::VectorXd& strengths, int row, int k, int d);

FitResult fit_full(const PanelSeries& y, int k, int threads = 1);
FitResult fit_full(const MomentSet& m, int k, int threads = 1);
FitResult fit_multi(const MomentSet& m, int k, int r, int threads = 1);
FitResult fit_reduced(const PanelSeries& y, const MomentSet& m, int k, std::optional<int> d = {},
                      int threads = 1);

// Dispatcher: estimates with the requested method at bandwidth k, selecting
// the bandwidth first (default options) when k is absent.
FitResult fit(const PanelSeries& y, const MethodSpec& method, std::optional<int> k = {},
              int threads = 1);

}  // namespace bstar
