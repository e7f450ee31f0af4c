#include "bstar/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "bstar/bandwidth.hpp"
#include "bstar/errors.hpp"
#include "bstar/linalg.hpp"
#include "bstar/parallel.hpp"
#include "bstar/rng.hpp"

namespace bstar {

namespace {

struct RepOutcome {
  int k_hat = 0;
  double snr = 0.0;
  int attempts = 0;
  std::vector<double> err_a;  // one entry per estimator
  std::vector<double> err_b;
  std::vector<char> rank_bad;
};

std::uint64_t cell_key(int p, int n) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(n));
}

ErrorStat accumulate(const std::vector<double>& xs) {
  ErrorStat s;
  const int m = static_cast<int>(xs.size());
  if (m == 0) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / m;
  if (m > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / (m - 1));
  }
  return s;
}

void validate(const ExperimentSpec& spec) {
  if (spec.grid.empty()) throw DomainError("experiment: empty (p, n) grid");
  if (spec.reps < 1) throw DomainError("experiment: need at least one repetition");
  if (spec.k0 < 1) throw DomainError("experiment: k0 must be at least 1");
  if (!(spec.C > 0.0)) throw DomainError("experiment: ratio constant C must be positive");
  if (spec.r_list.empty()) throw DomainError("experiment: empty lag depth list");
  for (int r : spec.r_list)
    if (r < 1) throw DomainError("experiment: lag depths must be at least 1");
  if (spec.K && *spec.K < 1) throw DomainError("experiment: K must be at least 1");
}

CellSummary run_cell(const ExperimentSpec& spec, const std::vector<MethodSpec>& methods, int p,
                     int n) {
  if (n < 8) throw DomainError("cell n = " + std::to_string(n) + " is too short");
  const int cap = max_feasible_bandwidth(p);
  if (spec.K && *spec.K > cap)
    throw DomainError("K = " + std::to_string(*spec.K) + " exceeds the feasible " +
                      std::to_string(cap) + " at p = " + std::to_string(p));

  SimConfig cfg;
  cfg.p = p;
  cfg.k0 = spec.k0;
  cfg.n = n;
  cfg.design = spec.design;
  cfg.burn_in = spec.burn_in;

  const SplitMix64 cell = SplitMix64(spec.seed).substream(cell_key(p, n));
  const SplitMix64 coef = cell.substream(1);
  const SplitMix64 innov = cell.substream(2);

  // One coefficient pair per cell unless the spec asks for fresh draws.
  std::optional<BandedModel> shared_model;
  int shared_attempts = 0;
  if (!spec.redraw_coefficients) {
    cfg.seed = coef.substream(0).seed();
    auto [m, attempts] = draw_stable_model(cfg);
    shared_model = std::move(m);
    shared_attempts = attempts;
  }

  int max_r = 1;
  for (int r : spec.r_list) max_r = std::max(max_r, r);

  SelectOptions sel;
  sel.K = spec.K;
  sel.C = spec.C;
  sel.median_vote = spec.median_vote;
  sel.threads = 1;
  const double w_n = spec.C / n;

  const int n_est = static_cast<int>(methods.size());
  std::vector<RepOutcome> outcomes(spec.reps);
  parallel_for(spec.reps, resolve_threads(spec.threads), [&](int rep) {
    RepOutcome out;
    out.err_a.assign(n_est, 0.0);
    out.err_b.assign(n_est, 0.0);
    out.rank_bad.assign(n_est, 0);

    SimConfig local = cfg;
    const BandedModel* model = nullptr;
    std::optional<BandedModel> own;
    if (shared_model) {
      model = &*shared_model;
      out.attempts = shared_attempts;
    } else {
      local.seed = coef.substream(static_cast<std::uint64_t>(rep)).seed();
      auto [m, attempts] = draw_stable_model(local);
      own = std::move(m);
      model = &*own;
      out.attempts = attempts;
    }
    out.snr = signal_noise_ratio(*model);

    const std::uint64_t noise_seed =
        innov.substream(static_cast<std::uint64_t>(rep)).seed();
    const PanelSeries y = simulate(*model, n, spec.burn_in, noise_seed);
    const MomentSet m = MomentSet::from_series(y, max_r);

    out.k_hat = select_bandwidth(m, w_n, sel).k_hat;

    for (int e = 0; e < n_est; ++e) {
      FitResult f;
      switch (methods[e].kind) {
        case Method::FullYW:
          f = fit_full(m, out.k_hat, 1);
          break;
        case Method::MultiYW:
          f = fit_multi(m, out.k_hat, methods[e].r, 1);
          break;
        case Method::ReducedYW:
          f = fit_reduced(y, m, out.k_hat, methods[e].d, 1);
          break;
      }
      out.err_a[e] = op_norm(model->a() - f.a);
      out.err_b[e] = op_norm(model->b() - f.b);
      for (const RowFit& row : f.rows)
        if (!row.rank_ok) {
          out.rank_bad[e] = 1;
          break;
        }
    }
    outcomes[rep] = std::move(out);
  });

  CellSummary cell_out;
  cell_out.p = p;
  cell_out.n = n;
  cell_out.reps = spec.reps;
  int eq = 0, gt = 0, lt = 0;
  std::vector<double> snrs;
  snrs.reserve(spec.reps);
  double attempts_sum = 0.0;
  for (const RepOutcome& out : outcomes) {
    if (out.k_hat == spec.k0)
      ++eq;
    else if (out.k_hat > spec.k0)
      ++gt;
    else
      ++lt;
    snrs.push_back(out.snr);
    attempts_sum += out.attempts;
  }
  cell_out.freq_eq = static_cast<double>(eq) / spec.reps;
  cell_out.freq_gt = static_cast<double>(gt) / spec.reps;
  cell_out.freq_lt = static_cast<double>(lt) / spec.reps;
  cell_out.snr = accumulate(snrs);
  cell_out.mean_attempts = attempts_sum / spec.reps;

  cell_out.estimators.resize(n_est);
  for (int e = 0; e < n_est; ++e) {
    std::vector<double> ea, eb;
    ea.reserve(spec.reps);
    eb.reserve(spec.reps);
    int bad = 0;
    for (const RepOutcome& out : outcomes) {
      ea.push_back(out.err_a[e]);
      eb.push_back(out.err_b[e]);
      bad += out.rank_bad[e];
    }
    cell_out.estimators[e].spec = methods[e];
    cell_out.estimators[e].err_a = accumulate(ea);
    cell_out.estimators[e].err_b = accumulate(eb);
    cell_out.estimators[e].rank_deficient = bad;
  }
  return cell_out;
}

std::string estimator_label(const MethodSpec& m) {
  std::string label = method_name(m);
  if (m.kind == Method::MultiYW) label += "(r=" + std::to_string(m.r) + ")";
  return label;
}

std::string fixed3(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", x);
  return buf;
}

}  // namespace

std::vector<MethodSpec> experiment_estimators(const ExperimentSpec& spec) {
  std::vector<MethodSpec> methods;
  for (int r : spec.r_list) {
    if (r == 1)
      methods.push_back({Method::FullYW, 1, std::nullopt});
    else
      methods.push_back({Method::MultiYW, r, std::nullopt});
  }
  if (spec.d_rule == DRule::PaperRule) methods.push_back({Method::ReducedYW, 1, std::nullopt});
  return methods;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  const std::vector<MethodSpec> methods = experiment_estimators(spec);
  ExperimentResult result;
  result.spec = spec;
  result.cells.reserve(spec.grid.size());
  for (auto [p, n] : spec.grid) {
    // A bad cell (infeasible K, too short a series, a degenerate fit) is
    // reported in place; the remaining cells still run.
    try {
      result.cells.push_back(run_cell(spec, methods, p, n));
    } catch (const DomainError& e) {
      CellSummary bad;
      bad.p = p;
      bad.n = n;
      bad.error = e.what();
      result.cells.push_back(std::move(bad));
    } catch (const NumericError& e) {
      CellSummary bad;
      bad.p = p;
      bad.n = n;
      bad.error = e.what();
      result.cells.push_back(std::move(bad));
    }
  }
  return result;
}

void emit_table(const ExperimentResult& result, std::ostream& out, bool csv) {
  const std::vector<MethodSpec> methods = experiment_estimators(result.spec);
  if (csv) {
    out << "p,n,reps,snr_mean,freq_eq,freq_gt,freq_lt";
    for (const MethodSpec& m : methods) {
      const std::string label = estimator_label(m);
      out << ',' << label << "_err_A_mean," << label << "_err_A_sd," << label << "_err_B_mean,"
          << label << "_err_B_sd," << label << "_rank_deficient";
    }
    out << ",error\n";
    for (const CellSummary& cell : result.cells) {
      char head[128];
      std::snprintf(head, sizeof(head), "%d,%d,%d,%.6f,%.6f,%.6f,%.6f", cell.p, cell.n, cell.reps,
                    cell.snr.mean, cell.freq_eq, cell.freq_gt, cell.freq_lt);
      out << head;
      for (const EstimatorSummary& es : cell.estimators) {
        char cols[160];
        std::snprintf(cols, sizeof(cols), ",%.6f,%.6f,%.6f,%.6f,%d", es.err_a.mean, es.err_a.sd,
                      es.err_b.mean, es.err_b.sd, es.rank_deficient);
        out << cols;
      }
      if (cell.error.empty()) {
        out << ",";
      } else {
        // keep the row rectangular even though the stats never ran
        for (std::size_t e = cell.estimators.size(); e < methods.size(); ++e) out << ",,,,,";
        std::string quoted = cell.error;
        for (char& ch : quoted)
          if (ch == ',' || ch == '\n') ch = ';';
        out << ',' << quoted;
      }
      out << '\n';
    }
    return;
  }

  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header{"p", "n", "SNR", "k=k0", "k>k0", "k<k0"};
  for (const MethodSpec& m : methods) {
    header.push_back(estimator_label(m) + " |A-Ah|");
    header.push_back(estimator_label(m) + " |B-Bh|");
  }
  table.push_back(std::move(header));
  for (const CellSummary& cell : result.cells) {
    std::vector<std::string> row;
    row.push_back(std::to_string(cell.p));
    row.push_back(std::to_string(cell.n));
    if (!cell.error.empty()) {
      row.push_back("skipped: " + cell.error);
      table.push_back(std::move(row));
      continue;
    }
    row.push_back(fixed3(cell.snr.mean));
    row.push_back(fixed3(cell.freq_eq));
    row.push_back(fixed3(cell.freq_gt));
    row.push_back(fixed3(cell.freq_lt));
    for (const EstimatorSummary& es : cell.estimators) {
      row.push_back(fixed3(es.err_a.mean) + " (" + fixed3(es.err_a.sd) + ")");
      row.push_back(fixed3(es.err_b.mean) + " (" + fixed3(es.err_b.sd) + ")");
    }
    table.push_back(std::move(row));
  }

  std::vector<std::size_t> widths(table[0].size(), 0);
  for (const auto& row : table)
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      out << std::string(widths[c] - row[c].size(), ' ') << row[c];
    }
    out << '\n';
  }
}

}  // namespace bstar
