#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Dense>

#include "bstar/model.hpp"
#include "bstar/rng.hpp"

namespace bstar {

// Coefficient draw designs. TwoPoint: band-edge entries are +-2 with equal
// probability, interior entries vanish with probability 0.4 and are standard
// normal otherwise. Uniform: band-edge entries are uniform on
// [-2.5,-1.5] U [1.5,2.5], interior entries uniform on [-1, 1]. The diagonal
// of A stays zero; the diagonal of B counts as interior.
enum class DesignCase { TwoPoint = 1, Uniform = 2 };

struct SimConfig {
  int p = 100;
  int k0 = 3;
  int n = 1000;
  DesignCase design = DesignCase::Uniform;
  int burn_in = 500;
  std::uint64_t seed = 0;
  double eta_min = 0.4;
  double eta_max = 0.8;
};

void validate(const SimConfig& cfg);

// Raw coefficient pair (A, B) before rescaling. Entries are drawn row-major,
// A first, then B.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> draw_coefficients(DesignCase design, int p, int k0,
                                                              std::uint64_t seed);

// A <- eta1 A / ||A||_2 and B <- eta2 B / ||B||_2 with eta1, eta2 drawn
// uniformly from [eta_min, eta_max] (in that order).
void rescale_pair(Eigen::MatrixXd& a, Eigen::MatrixXd& b, std::uint64_t seed, double eta_min = 0.4,
                  double eta_max = 0.8);
void rescale_pair(Eigen::MatrixXd& a, Eigen::MatrixXd& b, double eta1, double eta2);

// Draws and rescales coefficients until the reduced form is stable, advancing
// to substream attempt+1 on each rejection. Returns the model (unit innovation
// covariance) and the number of attempts used.
std::pair<BandedModel, int> draw_stable_model(const SimConfig& cfg);

// Simulates n observations after discarding burn_in, starting from zero.
// Innovations are i.i.d. N(0, sigma_eps), applied through the symmetric square
// root; one normal deviate is consumed per component per step, in row order.
PanelSeries simulate(const BandedModel& m, int n, int burn_in, std::uint64_t seed);

// tr Var(y_t) / tr Var((I - A)^{-1} eps_t), with Var(y_t) from the discrete
// Lyapunov equation of the reduced form.
double signal_noise_ratio(const BandedModel& m);

}  // namespace bstar
