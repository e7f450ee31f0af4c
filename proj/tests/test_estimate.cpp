#include <cmath>
#include <cstdint>

#include "bstar/errors.hpp"
#include "bstar/estimate.hpp"
#include "bstar/linalg.hpp"
#include "bstar/moments.hpp"
#include "bstar/simulate.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bstar;

namespace {

PanelSeries series(const Eigen::MatrixXd& y) { return PanelSeries(y, true); }

// Design matrix and target of the one-lag row regression, rebuilt by hand
// from the raw sample moments.
void row_system(const MomentSet& m, int row, int k, Eigen::MatrixXd& v, Eigen::VectorXd& z) {
  const int p = m.p();
  const BandSupport s = band_support(p, k, row);
  v.resize(p, s.n_params());
  int c = 0;
  for (int j : s.spatial_cols) v.col(c++) = m.cov(1).transpose().col(j);
  for (int j : s.lag_cols) v.col(c++) = m.cov0().col(j);
  z = m.cov(1).row(row).transpose();
}

}  // namespace

TEST_SUITE("estimate") {

TEST_CASE("screening count follows the n^0.495 rule with a cap at p") {
  CHECK(default_reduced_count(100, 2500) == 48);
  CHECK(default_reduced_count(100, 10000) == 95);
  CHECK(default_reduced_count(10, 2500) == 10);
  CHECK(default_reduced_count(5, 2) == 1);
  CHECK_THROWS_AS(default_reduced_count(0, 100), DomainError);
  CHECK_THROWS_AS(default_reduced_count(3, 1), DomainError);
}

TEST_CASE("method names") {
  CHECK(method_name({Method::FullYW, 1, {}}) == "full-yw");
  CHECK(method_name({Method::MultiYW, 3, {}}) == "multi-yw");
  CHECK(method_name({Method::ReducedYW, 1, 12}) == "reduced-yw");
}

TEST_CASE("population moments are fit exactly on identifiable rows") {
  struct Combo {
    DesignCase d;
    int p, k0;
    std::uint64_t seed;
  };
  for (Combo c : {Combo{DesignCase::TwoPoint, 6, 1, 101}, Combo{DesignCase::Uniform, 8, 1, 102},
                  Combo{DesignCase::Uniform, 12, 2, 103}}) {
    const BandedModel m = fixtures::stable_model(c.seed, c.p, c.k0, c.d);
    const MomentSet pop = MomentSet::population(m, 1);
    const FitResult fr = fit_full(pop, c.k0);
    for (int row = 0; row < c.p; ++row) {
      const RowFit& rf = fr.rows[row];
      // zero residual at the true bandwidth, identifiable rows or not
      CHECK(rf.rss <= 1e-16);
      // full rank exactly on the predicted set of rows
      CHECK(rf.rank_ok == fixtures::identifiable_row(c.p, c.k0, row));
      if (rf.rank_ok) {
        const Eigen::VectorXd truth = pack_beta(m, row);
        CHECK((rf.beta - truth).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(fixtures::max_abs_diff(fr.a.row(row), m.a().row(row)) < 1e-8);
        CHECK(fixtures::max_abs_diff(fr.b.row(row), m.b().row(row)) < 1e-8);
      }
    }
  }
}

TEST_CASE("population residual stays positive below the true bandwidth") {
  const BandedModel m = fixtures::stable_model(103, 12, 2);
  const MomentSet pop = MomentSet::population(m, 1);
  for (int row = 0; row < 12; ++row) {
    if (std::min(row, 11 - row) < 4) continue;  // edge strips can fit a narrower band
    CHECK(fit_row_full(pop, row, 1).rss > 1e-8);
    CHECK(fit_row_full(pop, row, 0).rss > 1e-8);
  }
  // widening beyond the truth keeps the residual at zero where feasible
  CHECK(fit_row_full(pop, 0, 3).rss <= 1e-16);
}

TEST_CASE("a white-noise population recovers exactly zero coefficients") {
  BandedModel noise(0, Eigen::MatrixXd::Zero(5, 5), Eigen::MatrixXd::Zero(5, 5));
  const MomentSet pop = MomentSet::population(noise, 1);
  const RowFit rf = fit_row_full(pop, 2, 1);
  // the lag-1 target is identically zero, so the minimum-norm answer is zero
  CHECK(rf.beta.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(rf.rss <= 1e-30);
  CHECK_FALSE(rf.rank_ok);  // spatial columns vanish with the lag moment
}

TEST_CASE("under-determined rows are refused with a row-labelled message") {
  const BandedModel m = fixtures::stable_model(7, 8, 2);
  const MomentSet pop = MomentSet::population(m, 1);
  CHECK_THROWS_AS(fit_row_full(pop, 3, 2), DomainError);  // 9 coefficients, 8 equations
  CHECK_NOTHROW(fit_row_full(pop, 0, 2));
  CHECK_NOTHROW(fit_row_full(pop, 1, 2));
  CHECK_THROWS_WITH_AS(fit_row_full(pop, 4, 2),
                       "row 5: under-determined at k = 2 (9 coefficients, 8 equations)",
                       DomainError);
}

TEST_CASE("lag-depth one coincides with the plain estimator") {
  SplitMix64 rng(2024);
  for (int rep = 0; rep < 20; ++rep) {
    const int p = 4 + static_cast<int>(rng.pick(9));
    const int n = 20 + static_cast<int>(rng.pick(41));
    const int kmax = std::min(max_feasible_bandwidth(p), 2);
    const int k = kmax >= 1 ? 1 + static_cast<int>(rng.pick(kmax)) : 0;
    const Eigen::MatrixXd y = fixtures::white_noise(rng.seed() + rep, p, n);
    const MomentSet ms = MomentSet::from_series(series(y), 2);
    const FitResult one = fit_multi(ms, k, 1);
    const FitResult full = fit_full(ms, k);
    CHECK(fixtures::max_abs_diff(one.a, full.a) <= 1e-14);
    CHECK(fixtures::max_abs_diff(one.b, full.b) <= 1e-14);
  }
}

TEST_CASE("keeping every equation reduces the screened estimator to the full one") {
  const BandedModel mod = fixtures::stable_model(55, 9, 1);
  PanelSeries y = simulate(mod, 300, 200, 66);
  const MomentSet ms = MomentSet::from_series(y, 1);
  const FitResult red = fit_reduced(y, ms, 1, 9);
  const FitResult full = fit_full(ms, 1);
  CHECK(fixtures::max_abs_diff(red.a, full.a) <= 1e-14);
  CHECK(fixtures::max_abs_diff(red.b, full.b) <= 1e-14);

  // the default count is capped at p here, so it picks the same solution
  const FitResult def = fit_reduced(y, ms, 1);
  CHECK(fixtures::max_abs_diff(def.a, full.a) <= 1e-14);
  CHECK(def.method.d.has_value());
  CHECK(*def.method.d == 9);
}

TEST_CASE("screened solve drops the weakest equations and respects tie order") {
  const BandedModel mod = fixtures::stable_model(56, 8, 1);
  PanelSeries y = simulate(mod, 240, 200, 67);
  const MomentSet ms = MomentSet::from_series(y, 1);
  const int row = 4, k = 1;
  const Eigen::VectorXd s = equation_strengths(y, row, k);

  // forcing d = p keeps everything regardless of the ordering
  CHECK((fit_row_reduced(ms, s, row, k, 8).beta - fit_row_full(ms, row, k).beta)
            .cwiseAbs()
            .maxCoeff() <= 1e-14);

  // a tie across the cut resolves toward the smaller index: with d = 5 the
  // last slot is contested between equations 4 and 5
  Eigen::VectorXd tied = Eigen::VectorXd::Zero(8);
  for (int i = 0; i < 4; ++i) tied[i] = 9.0 - i;
  tied[4] = 1.0;
  tied[5] = 1.0;
  Eigen::VectorXd forced = tied;
  forced[4] = 2.0;  // breaks the tie explicitly in favour of equation 4
  const Eigen::VectorXd beta_tied = fit_row_reduced(ms, tied, row, k, 5).beta;
  const Eigen::VectorXd beta_forced = fit_row_reduced(ms, forced, row, k, 5).beta;
  CHECK((beta_tied - beta_forced).cwiseAbs().maxCoeff() <= 1e-14);

  CHECK_THROWS_AS(fit_row_reduced(ms, s, row, k, 9), DomainError);   // d > p
  CHECK_THROWS_AS(fit_row_reduced(ms, s, row, k, 4), DomainError);   // d below tau = 5
  Eigen::VectorXd short_s(3);
  short_s.setZero();
  CHECK_THROWS_AS(fit_row_reduced(ms, short_s, row, k, 6), DomainError);
}

TEST_CASE("equation strengths: hand value, homogeneity, and guards") {
  Eigen::MatrixXd y(2, 2);
  y << 1.0, 2.0, 3.0, 4.0;
  const Eigen::VectorXd s = equation_strengths(series(y), 0, 1);
  // single mass term |y_{2,2}| + |y_{1,1}| + |y_{2,1}| = 8, scaled by |y_{l,1}| / n
  CHECK(s(0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(s(1) == doctest::Approx(12.0).epsilon(1e-14));

  const Eigen::MatrixXd w = fixtures::white_noise(91, 5, 40);
  const Eigen::VectorXd s1 = equation_strengths(series(w), 2, 1);
  const Eigen::VectorXd s2 = equation_strengths(series(3.0 * w), 2, 1);
  CHECK((s2 - 9.0 * s1).cwiseAbs().maxCoeff() < 1e-12 * s2.cwiseAbs().maxCoeff());

  CHECK(equation_strengths(series(Eigen::MatrixXd::Zero(4, 10)), 1, 1).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK_THROWS_AS(equation_strengths(series(w), 5, 1), DomainError);
  CHECK_THROWS_AS(equation_strengths(PanelSeries(w, false), 2, 1), DomainError);
}

TEST_CASE("row solve agrees with hand-built normal equations on sample data") {
  const Eigen::MatrixXd y = fixtures::white_noise(77, 9, 300);
  const MomentSet ms = MomentSet::from_series(series(y), 1);
  for (int row : {0, 4, 8}) {
    const RowFit rf = fit_row_full(ms, row, 1);
    REQUIRE(rf.rank_ok);
    Eigen::MatrixXd v;
    Eigen::VectorXd z;
    row_system(ms, row, 1, v, z);
    const Eigen::VectorXd ref = (v.transpose() * v).ldlt().solve(v.transpose() * z);
    CHECK((rf.beta - ref).cwiseAbs().maxCoeff() < 1e-8);
    const double rss = (z - v * rf.beta).squaredNorm() / 9.0;
    CHECK(rf.rss == doctest::Approx(rss).epsilon(1e-12));
  }
}

TEST_CASE("residuals shrink as the band widens") {
  const Eigen::MatrixXd y = fixtures::white_noise(13, 13, 200);
  const MomentSet ms = MomentSet::from_series(series(y), 1);
  for (int row : {0, 3, 6}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 3; ++k) {
      const double rss = fit_row_full(ms, row, k).rss;
      CHECK(rss <= prev + 1e-12);
      prev = rss;
    }
  }
}

TEST_CASE("a duplicated component trips the rank flag and splits the weight") {
  Eigen::MatrixXd y = fixtures::white_noise(31, 6, 400);
  y.row(2) = y.row(0);  // rows 0 and 2 of the panel are identical
  const MomentSet ms = MomentSet::from_series(series(y), 1);
  const RowFit rf = fit_row_full(ms, 1, 1);
  CHECK_FALSE(rf.rank_ok);
  CHECK(rf.beta.allFinite());
  // spatial neighbours 0 and 2 have identical design columns, so the
  // minimum-norm solution gives them identical coefficients
  CHECK(std::abs(rf.beta(0) - rf.beta(1)) < 1e-10);
  CHECK(std::abs(rf.beta(2) - rf.beta(4)) < 1e-10);

  CHECK_THROWS_AS(fit_row_full(MomentSet::from_series(series(Eigen::MatrixXd::Zero(6, 50)), 1), 1,
                               1),
                  NumericError);
}

TEST_CASE("multi-lag depth is validated against the materialized moments") {
  const Eigen::MatrixXd y = fixtures::white_noise(41, 6, 80);
  const MomentSet ms = MomentSet::from_series(series(y), 2);
  CHECK_NOTHROW(fit_row_multi(ms, 2, 1, 2));
  CHECK_THROWS_AS(fit_row_multi(ms, 2, 1, 3), DomainError);
  CHECK_THROWS_AS(fit_row_multi(ms, 2, 1, 0), DomainError);
  CHECK_THROWS_AS(fit_row_multi(ms, 6, 1, 1), DomainError);
  CHECK_THROWS_AS(fit_row_multi(ms, 2, -1, 1), DomainError);
}

TEST_CASE("stacking more lags keeps population fits exact") {
  const BandedModel m = fixtures::stable_model(61, 10, 1);
  const MomentSet pop = MomentSet::population(m, 3);
  const FitResult fr = fit_multi(pop, 1, 3);
  for (int row = 0; row < 10; ++row) {
    CHECK(fr.rows[row].rss <= 1e-16);
    if (fr.rows[row].rank_ok) {
      CHECK((fr.rows[row].beta - pack_beta(m, row)).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("assembled estimates respect the band and record their settings") {
  const BandedModel mod = fixtures::stable_model(71, 11, 2);
  PanelSeries y = simulate(mod, 500, 200, 72);
  const MomentSet ms = MomentSet::from_series(y, 1);
  const FitResult fr = fit_full(ms, 2);
  CHECK(fr.k_used == 2);
  CHECK(fr.p == 11);
  CHECK(fr.rows.size() == 11);
  CHECK(fr.method.kind == Method::FullYW);
  for (int i = 0; i < 11; ++i) {
    CHECK(fr.a(i, i) == 0.0);
    for (int j = 0; j < 11; ++j)
      if (std::abs(i - j) > 2) {
        CHECK(fr.a(i, j) == 0.0);
        CHECK(fr.b(i, j) == 0.0);
      }
    CHECK(fr.rows[i].row == i);
    CHECK(fr.rows[i].k == 2);
  }
}

TEST_CASE("the dispatcher reproduces the dedicated entry points") {
  const BandedModel mod = fixtures::stable_model(81, 9, 1);
  PanelSeries y = simulate(mod, 400, 200, 82);
  const MomentSet ms1 = MomentSet::from_series(y, 1);
  const MomentSet ms2 = MomentSet::from_series(y, 2);

  const FitResult f1 = fit(y, {Method::FullYW, 1, {}}, 1);
  CHECK(fixtures::max_abs_diff(f1.a, fit_full(ms1, 1).a) == 0.0);
  CHECK(f1.n == 400);

  const FitResult f2 = fit(y, {Method::MultiYW, 2, {}}, 1);
  CHECK(fixtures::max_abs_diff(f2.b, fit_multi(ms2, 1, 2).b) == 0.0);

  const FitResult f3 = fit(y, {Method::ReducedYW, 1, 6}, 1);
  CHECK(fixtures::max_abs_diff(f3.a, fit_reduced(y, ms1, 1, 6).a) == 0.0);

  // no bandwidth given: it is selected, and lands in the feasible range
  const FitResult f4 = fit(y, {Method::FullYW, 1, {}});
  CHECK(f4.k_used >= 1);
  CHECK(f4.k_used <= max_feasible_bandwidth(9));
}

TEST_CASE("fits are invariant to the worker count") {
  const BandedModel mod = fixtures::stable_model(83, 12, 2);
  PanelSeries y = simulate(mod, 600, 200, 84);
  const MomentSet ms = MomentSet::from_series(y, 1);
  const FitResult a = fit_full(ms, 2, 1);
  const FitResult b = fit_full(ms, 2, 4);
  CHECK(fixtures::max_abs_diff(a.a, b.a) == 0.0);
  CHECK(fixtures::max_abs_diff(a.b, b.b) == 0.0);
  const FitResult c = fit_reduced(y, ms, 2, 10, 1);
  const FitResult d = fit_reduced(y, ms, 2, 10, 3);
  CHECK(fixtures::max_abs_diff(c.a, d.a) == 0.0);
}

TEST_CASE("white-noise data keeps the own-lag fit near zero") {
  BandedModel noise(0, Eigen::MatrixXd::Zero(10, 10), Eigen::MatrixXd::Zero(10, 10));
  PanelSeries y = simulate(noise, 10000, 100, 90);
  const FitResult fr = fit_full(MomentSet::from_series(y, 1), 0);
  CHECK(fr.a.cwiseAbs().maxCoeff() == 0.0);  // no spatial terms at k = 0
  CHECK(fr.b.diagonal().cwiseAbs().maxCoeff() <= 5.0 / std::sqrt(10000.0));
}

}  // TEST_SUITE
