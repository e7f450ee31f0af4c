#include "bstar/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "bstar/bandwidth.hpp"
#include "bstar/errors.hpp"
#include "bstar/linalg.hpp"
#include "bstar/parallel.hpp"

namespace bstar {

namespace {

struct Solved {
  Eigen::VectorXd beta;
  double rss = 0.0;
  bool rank_ok = true;
};

// Least squares through a rank-revealing orthogonal decomposition. Pivots
// below kRankTolerance times the largest are treated as zero; the solve then
// degrades to the minimum-norm solution with rank_ok = false instead of
// failing, so bandwidth sweeps can probe generous k.
Solved solve_row(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, int p) {
  if (!(design.cwiseAbs().maxCoeff() > 0.0))
    throw NumericError("row regression has an all-zero design matrix");
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(kRankTolerance);
  cod.compute(design);
  Solved s;
  s.beta = cod.solve(target);
  s.rank_ok = cod.rank() == design.cols();
  s.rss = (target - design * s.beta).squaredNorm() / static_cast<double>(p);
  return s;
}

// Columns of the stacked design for one row: spatial neighbours first, then
// lagged neighbours, both ascending, matching pack_beta.
Eigen::MatrixXd gather_columns(const Eigen::Ref<const Eigen::MatrixXd>& g, const BandSupport& s) {
  Eigen::MatrixXd v(g.rows(), s.n_params());
  int c = 0;
  for (int j : s.spatial_cols) v.col(c++) = g.col(j);
  for (int j : s.lag_cols) v.col(c++) = g.col(s.p + j);
  return v;
}

Eigen::VectorXd stack_targets(const MomentSet& m, int row, int r) {
  const int p = m.p();
  Eigen::VectorXd x(static_cast<Eigen::Index>(r) * p);
  for (int j = 1; j <= r; ++j) x.segment((j - 1) * p, p) = m.cov(j).row(row).transpose();
  return x;
}

void check_row_range(const MomentSet& m, int row, int k) {
  if (row < 0 || row >= m.p()) throw DomainError("row " + std::to_string(row + 1) + " out of range");
  if (k < 0 || k >= m.p()) throw DomainError("bandwidth k must satisfy 0 <= k < p");
}

FitResult assemble(std::vector<RowFit> rows, int p, int n, int k, MethodSpec method) {
  FitResult res;
  res.a = Eigen::MatrixXd::Zero(p, p);
  res.b = Eigen::MatrixXd::Zero(p, p);
  res.k_used = k;
  res.p = p;
  res.n = n;
  res.method = method;
  for (const RowFit& rf : rows) {
    const BandSupport s = band_support(p, k, rf.row);
    auto [a_row, b_row] = unpack_beta(rf.beta, s);
    res.a.row(rf.row) = a_row.transpose();
    res.b.row(rf.row) = b_row.transpose();
  }
  res.rows = std::move(rows);
  return res;
}

template <typename RowFn>
FitResult fit_rows(const MomentSet& m, int k, MethodSpec method, int threads, RowFn&& row_fn) {
  const int p = m.p();
  std::vector<RowFit> rows(p);
  parallel_for(p, resolve_threads(threads), [&](int i) { rows[i] = row_fn(i); });
  return assemble(std::move(rows), p, m.n(), k, method);
}

}  // namespace

std::string method_name(const MethodSpec& m) {
  switch (m.kind) {
    case Method::FullYW:
      return "full-yw";
    case Method::ReducedYW:
      return "reduced-yw";
    case Method::MultiYW:
      return "multi-yw";
  }
  return "unknown";
}

int default_reduced_count(int p, int n) {
  if (p < 1 || n < 2) throw DomainError("default_reduced_count: need p >= 1 and n >= 2");
  const int by_rate = static_cast<int>(std::floor(std::pow(static_cast<double>(n), 0.495)));
  return std::min(p, by_rate);
}

RowFit fit_row_multi(const MomentSet& m, int row, int k, int r) {
  check_row_range(m, row, k);
  if (r < 1 || r > m.max_lag())
    throw DomainError("fit_row_multi: r must lie in 1.." + std::to_string(m.max_lag()));
  const int p = m.p();
  const BandSupport s = band_support(p, k, row);
  if (s.n_params() > r * p)
    throw DomainError("row " + std::to_string(row + 1) + ": under-determined at k = " +
                      std::to_string(k) + " (" + std::to_string(s.n_params()) + " coefficients, " +
                      std::to_string(r * p) + " equations)");
  const Eigen::MatrixXd design = gather_columns(m.design().topRows(r * p), s);
  const Solved sol = solve_row(design, stack_targets(m, row, r), p);
  return {row, k, sol.beta, sol.rss, sol.rank_ok};
}

RowFit fit_row_full(const MomentSet& m, int row, int k) { return fit_row_multi(m, row, k, 1); }

Eigen::VectorXd equation_strengths(const PanelSeries& y, int row, int k) {
  if (!y.centered()) throw DomainError("equation_strengths: series must be centered");
  if (y.n() < 2) throw DomainError("equation_strengths: need at least two time points");
  if (row < 0 || row >= y.p()) throw DomainError("equation_strengths: row out of range");
  const BandSupport s = band_support(y.p(), k, row);
  const Eigen::MatrixXd& data = y.data();
  const int n = y.n();
  Eigen::VectorXd regressor_mass(n - 1);
  for (int t = 1; t < n; ++t) {
    double mass = 0.0;
    for (int j : s.spatial_cols) mass += std::abs(data(j, t));
    for (int j : s.lag_cols) mass += std::abs(data(j, t - 1));
    regressor_mass[t - 1] = mass;
  }
  return (data.leftCols(n - 1).cwiseAbs() * regressor_mass) / static_cast<double>(n);
}

RowFit fit_row_reduced(const MomentSet& m, const Eigen::VectorXd& strengths, int row, int k, int d) {
  check_row_range(m, row, k);
  const int p = m.p();
  if (strengths.size() != p) throw DomainError("fit_row_reduced: strengths must have length p");
  const BandSupport s = band_support(p, k, row);
  if (d > p) throw DomainError("fit_row_reduced: d cannot exceed p");
  if (d < s.n_params())
    throw DomainError("row " + std::to_string(row + 1) + ": d = " + std::to_string(d) +
                      " is below the " + std::to_string(s.n_params()) + " coefficients at k = " +
                      std::to_string(k));
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  // Strongest first; ties keep the smaller index.
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return strengths[a] != strengths[b] ? strengths[a] > strengths[b] : a < b;
  });
  std::vector<int> keep(order.begin(), order.begin() + d);
  std::sort(keep.begin(), keep.end());
  const Eigen::MatrixXd full_design = gather_columns(m.design().topRows(p), s);
  const Eigen::VectorXd full_target = m.cov(1).row(row).transpose();
  Eigen::MatrixXd design(d, s.n_params());
  Eigen::VectorXd target(d);
  for (int idx = 0; idx < d; ++idx) {
    design.row(idx) = full_design.row(keep[idx]);
    target[idx] = full_target[keep[idx]];
  }
  const Solved sol = solve_row(design, target, p);
  return {row, k, sol.beta, sol.rss, sol.rank_ok};
}

FitResult fit_full(const MomentSet& m, int k, int threads) {
  return fit_rows(m, k, {Method::FullYW, 1, {}}, threads,
                  [&](int i) { return fit_row_full(m, i, k); });
}

FitResult fit_full(const PanelSeries& y, int k, int threads) {
  return fit_full(MomentSet::from_series(y, 1), k, threads);
}

FitResult fit_multi(const MomentSet& m, int k, int r, int threads) {
  return fit_rows(m, k, {Method::MultiYW, r, {}}, threads,
                  [&](int i) { return fit_row_multi(m, i, k, r); });
}

FitResult fit_reduced(const PanelSeries& y, const MomentSet& m, int k, std::optional<int> d,
                      int threads) {
  const int count = d ? *d : default_reduced_count(y.p(), y.n());
  FitResult res = fit_rows(m, k, {Method::ReducedYW, 1, count}, threads, [&](int i) {
    const Eigen::VectorXd strengths = equation_strengths(y, i, k);
    return fit_row_reduced(m, strengths, i, k, count);
  });
  res.n = y.n();
  return res;
}

FitResult fit(const PanelSeries& y, const MethodSpec& method, std::optional<int> k, int threads) {
  const int k_used = k ? *k : select_bandwidth(y, {}).k_hat;
  switch (method.kind) {
    case Method::FullYW:
      return fit_full(MomentSet::from_series(y, 1), k_used, threads);
    case Method::MultiYW:
      return fit_multi(MomentSet::from_series(y, method.r), k_used, method.r, threads);
    case Method::ReducedYW:
      return fit_reduced(y, MomentSet::from_series(y, 1), k_used, method.d, threads);
  }
  throw DomainError("fit: unknown method");
}

}  // namespace bstar
