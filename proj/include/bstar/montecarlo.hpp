#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "bstar/estimate.hpp"
#include "bstar/simulate.hpp"

namespace bstar {

// Which screening count the reduced estimator uses when it is part of an
// experiment. Full runs the unreduced estimators only; PaperRule adds the
// reduced estimator at its default d = min(p, floor(n^0.495)).
enum class DRule { Full, PaperRule };

struct ExperimentSpec {
  std::vector<std::pair<int, int>> grid;  // (p, n) cells
  int k0 = 3;                             // bandwidth of the generated models
  DesignCase design = DesignCase::Uniform;
  std::optional<int> K;  // largest candidate bandwidth; per-cell default when absent
  double C = 1.0;        // ratio penalty constant, w_n = C / n
  bool median_vote = false;
  std::vector<int> r_list{1};  // lag depths of the stacked estimator; 1 is the plain one
  DRule d_rule = DRule::Full;
  int reps = 100;
  std::uint64_t seed = 0;
  bool redraw_coefficients = false;  // fresh (A, B) every repetition when true
  int burn_in = 500;
  int threads = 0;
};

// Estimator variants an experiment evaluates, derived from r_list and d_rule.
std::vector<MethodSpec> experiment_estimators(const ExperimentSpec& spec);

// Mean and standard deviation of one statistic across repetitions.
struct ErrorStat {
  double mean = 0.0;
  double sd = 0.0;
};

struct EstimatorSummary {
  MethodSpec spec;
  ErrorStat err_a;         // operator-norm error of the spatial matrix
  ErrorStat err_b;         // operator-norm error of the dynamic matrix
  int rank_deficient = 0;  // repetitions with at least one degenerate row solve
};

struct CellSummary {
  int p = 0;
  int n = 0;
  int reps = 0;
  double freq_eq = 0.0;  // share of repetitions with k_hat == k0
  double freq_gt = 0.0;  // k_hat > k0
  double freq_lt = 0.0;  // k_hat < k0
  ErrorStat snr;         // signal-to-noise ratio of the generated panels
  double mean_attempts = 0.0;  // stable-model rejection sampling effort
  std::vector<EstimatorSummary> estimators;
  std::string error;  // nonempty when the cell could not run; other cells still do
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<CellSummary> cells;
};

// Runs every cell of the grid. Each cell derives its own random substream
// from the root seed keyed by (p, n), so results depend on neither the cell
// order nor the thread count. With redraw_coefficients unset, one coefficient
// pair is drawn per cell and held fixed while only the innovations vary.
// Every repetition selects its own bandwidth and estimates at that choice.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// One row per cell. CSV carries per-estimator error columns; the text form
// is an aligned table with mean (sd) entries.
void emit_table(const ExperimentResult& result, std::ostream& out, bool csv);

}  // namespace bstar
