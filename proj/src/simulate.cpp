#include "bstar/simulate.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

#include "bstar/errors.hpp"
#include "bstar/linalg.hpp"

namespace bstar {

namespace {

double edge_draw(DesignCase design, SplitMix64& rng) {
  if (design == DesignCase::TwoPoint) return rng.coin() ? 2.0 : -2.0;
  const double magnitude = rng.uniform(1.5, 2.5);
  return rng.coin() ? magnitude : -magnitude;
}

double interior_draw(DesignCase design, SplitMix64& rng) {
  if (design == DesignCase::TwoPoint) return rng.uniform() < 0.4 ? 0.0 : rng.normal();
  return rng.uniform(-1.0, 1.0);
}

}  // namespace

void validate(const SimConfig& cfg) {
  if (cfg.p < 1) throw DomainError("SimConfig: p must be positive");
  if (cfg.k0 < 1 || cfg.k0 >= cfg.p) throw DomainError("SimConfig: need 1 <= k0 < p");
  if (cfg.n < 1) throw DomainError("SimConfig: n must be positive");
  if (cfg.burn_in < 0) throw DomainError("SimConfig: burn_in cannot be negative");
  if (!(cfg.eta_min > 0.0) || !(cfg.eta_max >= cfg.eta_min))
    throw DomainError("SimConfig: need 0 < eta_min <= eta_max");
  if (cfg.design != DesignCase::TwoPoint && cfg.design != DesignCase::Uniform)
    throw DomainError("SimConfig: unknown design case");
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> draw_coefficients(DesignCase design, int p, int k0,
                                                              std::uint64_t seed) {
  if (p < 1) throw DomainError("draw_coefficients: p must be positive");
  if (k0 < 1 || k0 >= p)
    throw DomainError("draw_coefficients: need 1 <= k0 < p (k0 = 0 leaves no band to draw)");
  SplitMix64 rng(seed);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = std::max(0, i - k0); j <= std::min(p - 1, i + k0); ++j) {
      if (j == i) continue;
      a(i, j) = std::abs(i - j) == k0 ? edge_draw(design, rng) : interior_draw(design, rng);
    }
  }
  for (int i = 0; i < p; ++i) {
    for (int j = std::max(0, i - k0); j <= std::min(p - 1, i + k0); ++j) {
      b(i, j) = std::abs(i - j) == k0 ? edge_draw(design, rng) : interior_draw(design, rng);
    }
  }
  return {std::move(a), std::move(b)};
}

void rescale_pair(Eigen::MatrixXd& a, Eigen::MatrixXd& b, double eta1, double eta2) {
  if (!(eta1 > 0.0) || !(eta2 > 0.0)) throw DomainError("rescale_pair: eta must be positive");
  const double na = op_norm(a);
  const double nb = op_norm(b);
  if (na == 0.0 || nb == 0.0) throw DomainError("rescale_pair: cannot rescale a zero matrix");
  a *= eta1 / na;
  b *= eta2 / nb;
}

void rescale_pair(Eigen::MatrixXd& a, Eigen::MatrixXd& b, std::uint64_t seed, double eta_min,
                  double eta_max) {
  if (!(eta_min > 0.0) || !(eta_max >= eta_min))
    throw DomainError("rescale_pair: need 0 < eta_min <= eta_max");
  SplitMix64 rng(seed);
  const double eta1 = rng.uniform(eta_min, eta_max);
  const double eta2 = rng.uniform(eta_min, eta_max);
  rescale_pair(a, b, eta1, eta2);
}

std::pair<BandedModel, int> draw_stable_model(const SimConfig& cfg) {
  validate(cfg);
  const SplitMix64 root(cfg.seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const std::uint64_t sub = root.substream(attempt).seed();
    auto [a, b] = draw_coefficients(cfg.design, cfg.p, cfg.k0, sub);
    rescale_pair(a, b, SplitMix64(sub).substream(1).seed(), cfg.eta_min, cfg.eta_max);
    BandedModel model(cfg.k0, std::move(a), std::move(b));
    try {
      if (check_stability(model).stable) return {std::move(model), attempt + 1};
    } catch (const NumericError&) {
      // Singular I - A counts as a rejection like an explosive reduced form.
    }
  }
  throw NumericError("draw_stable_model: no stable draw in 100 attempts");
}

PanelSeries simulate(const BandedModel& m, int n, int burn_in, std::uint64_t seed) {
  if (n < 1) throw DomainError("simulate: n must be positive");
  if (burn_in < 0) throw DomainError("simulate: burn_in cannot be negative");
  const Stability st = check_stability(m);
  if (!st.stable)
    throw NumericError("simulate: reduced form is not stable (spectral radius " +
                       std::to_string(st.spectral_radius) + ")");
  const int p = m.p();
  const Eigen::MatrixXd inv = inv_i_minus(m.a());
  const Eigen::MatrixXd d = inv * m.b();
  Eigen::MatrixXd noise_map;
  if (m.sigma_eps().isIdentity(0.0)) {
    noise_map = inv;
  } else {
    noise_map = inv * spd_sqrt(m.sigma_eps());
  }
  SplitMix64 rng(seed);
  Eigen::MatrixXd out(p, n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd z(p);
  for (int t = 0; t < burn_in + n; ++t) {
    for (int i = 0; i < p; ++i) z[i] = rng.normal();
    y = d * y + noise_map * z;
    if (t >= burn_in) out.col(t - burn_in) = y;
  }
  return PanelSeries(std::move(out), true);
}

double signal_noise_ratio(const BandedModel& m) {
  const Eigen::MatrixXd inv = inv_i_minus(m.a());
  const Eigen::MatrixXd d = inv * m.b();
  const Eigen::MatrixXd sigma_xi = inv * m.sigma_eps() * inv.transpose();
  const Eigen::MatrixXd cov0 = solve_discrete_lyapunov(d, sigma_xi);
  return cov0.trace() / sigma_xi.trace();
}

}  // namespace bstar
