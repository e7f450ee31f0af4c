// Command-line front end: simulate panels, select bandwidths, fit banded
// autoregressions, forecast, cross-validate orderings, and replicate the
// simulation tables. Exit codes: 0 success, 1 domain or parse error,
// 2 numerical error.

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bstar/bandwidth.hpp"
#include "bstar/errors.hpp"
#include "bstar/estimate.hpp"
#include "bstar/forecast.hpp"
#include "bstar/io.hpp"
#include "bstar/linalg.hpp"
#include "bstar/montecarlo.hpp"
#include "bstar/simulate.hpp"

namespace {

using namespace bstar;

void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open " + path + " for writing");
  fn(out);
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

// Shared ingestion flags: transform, centering and row arrangement.
struct IngestFlags {
  bool log = false;
  bool no_center = false;
  std::string ordering_file;
  std::string coords_file;
  std::string order_rule;

  void attach(CLI::App* cmd) {
    cmd->add_flag("--log", log, "work on the logarithm of the data");
    cmd->add_flag("--no-center", no_center, "skip subtracting per-series means");
    cmd->add_option("--ordering-file", ordering_file,
                    "file listing the row arrangement (labels or 1-based indices)");
    cmd->add_option("--coords-file", coords_file, "station coordinates csv: label,x,y");
    cmd->add_option("--order-rule", order_rule,
                    "arrangement rule: n2s, w2e, nw2se, ne2sw, dist:<label>, proj:<dx>,<dy>");
  }

  std::vector<int> resolve(const std::vector<std::string>& labels) const {
    if (!ordering_file.empty() && !order_rule.empty())
      throw DomainError("give either --ordering-file or --order-rule, not both");
    if (!ordering_file.empty()) return read_ordering_file(ordering_file, labels);
    if (!order_rule.empty()) {
      if (coords_file.empty()) throw DomainError("--order-rule needs --coords-file");
      return ordering_from_rule(order_rule, read_coordinates_csv(coords_file), labels);
    }
    return {};
  }

  IngestResult run(const std::string& path) const {
    const PanelCsv panel = read_panel_csv(path);
    return ingest(panel, log ? Transform::Log : Transform::None, !no_center, resolve(panel.labels));
  }
};

// Estimator flags shared by fit and cv.
struct MethodFlags {
  std::string method = "full";
  int r = 1;
  std::optional<int> d;

  void attach(CLI::App* cmd) {
    cmd->add_option("--method", method, "estimator: full, multi or reduced")
        ->check(CLI::IsMember({"full", "multi", "reduced"}));
    cmd->add_option("--r", r, "lag depth of the multi estimator");
    cmd->add_option("--d", d, "equations kept per row by the reduced estimator");
  }

  MethodSpec resolve() const {
    MethodSpec spec;
    if (method == "full")
      spec.kind = Method::FullYW;
    else if (method == "multi")
      spec.kind = Method::MultiYW;
    else
      spec.kind = Method::ReducedYW;
    spec.r = r;
    spec.d = d;
    return spec;
  }
};

// Bandwidth-selection flags shared by bandwidth, fit and cv.
struct SelectFlags {
  std::optional<int> K;
  double C = 1.0;
  bool median_vote = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--K", K, "largest candidate bandwidth");
    cmd->add_option("--C", C, "ratio penalty constant, w_n = C / n");
    cmd->add_flag("--median-vote", median_vote, "aggregate row picks by lower median");
  }

  SelectOptions resolve(int threads) const {
    SelectOptions opts;
    opts.K = K;
    opts.C = C;
    opts.median_vote = median_vote;
    opts.threads = threads;
    return opts;
  }
};

int run_simulate(const SimConfig& merged, const std::string& out_path,
                 const std::string& model_out) {
  validate(merged);
  auto [model, attempts] = draw_stable_model(merged);
  (void)attempts;
  const PanelSeries y = simulate(model, merged.n, merged.burn_in, merged.seed);

  PanelCsv panel;
  panel.labels.resize(merged.p);
  for (int i = 0; i < merged.p; ++i) panel.labels[i] = "y" + std::to_string(i + 1);
  panel.timestamps.resize(merged.n);
  for (int t = 0; t < merged.n; ++t) panel.timestamps[t] = std::to_string(t + 1);
  panel.values = y.data().transpose();
  with_output(out_path, [&](std::ostream& out) { write_panel_csv(out, panel); });

  if (!model_out.empty()) {
    ScaleInfo scale;
    scale.row_means = Eigen::VectorXd::Zero(merged.p);
    with_output(model_out, [&](std::ostream& out) {
      write_model(out, model.a(), model.b(), model.k0(), merged.n, "simulated", scale,
                  panel.labels, {});
    });
  }
  return 0;
}

int run_bandwidth(const IngestFlags& ingest_flags, const SelectFlags& select_flags,
                  const std::string& input, int threads, const std::string& profile_out) {
  const IngestResult data = ingest_flags.run(input);
  const BandwidthSelection sel = select_bandwidth(data.series, select_flags.resolve(threads));
  std::cout << "k_hat " << sel.k_hat << '\n';
  std::cout << "K " << sel.K << '\n';
  std::cout << "w_n " << fmt(sel.w_n) << '\n';
  if (!profile_out.empty()) {
    with_output(profile_out, [&](std::ostream& out) {
      out << "row,k,rss,ratio,k_pick\n";
      for (const RatioProfile& prof : sel.profiles) {
        for (int k = 0; k <= sel.K; ++k) {
          out << (prof.row + 1) << ',' << k << ',' << fmt(prof.rss[k]) << ',';
          if (k >= 1) out << fmt(prof.ratios[k - 1]);
          out << ',' << prof.k_pick << '\n';
        }
      }
    });
  }
  return 0;
}

int run_fit(const IngestFlags& ingest_flags, const MethodFlags& method_flags,
            const SelectFlags& select_flags, const std::string& input, std::optional<int> k,
            int threads, const std::string& out_path, const std::string& coef_out) {
  const IngestResult data = ingest_flags.run(input);
  const MethodSpec spec = method_flags.resolve();
  int k_used;
  if (k) {
    k_used = *k;
  } else {
    k_used = select_bandwidth(data.series, select_flags.resolve(threads)).k_hat;
  }
  const FitResult f = fit(data.series, spec, k_used, threads);
  with_output(out_path, [&](std::ostream& out) {
    write_model(out, f, data.scale, data.labels, data.series.ordering());
  });
  if (!coef_out.empty()) {
    with_output(coef_out, [&](std::ostream& out) {
      out << "i,j,a,b\n";
      for (int i = 0; i < f.p; ++i) {
        const int lo = std::max(0, i - f.k_used);
        const int hi = std::min(f.p - 1, i + f.k_used);
        for (int j = lo; j <= hi; ++j)
          out << (i + 1) << ',' << (j + 1) << ',' << fmt(f.a(i, j)) << ',' << fmt(f.b(i, j))
              << '\n';
      }
    });
  }
  return 0;
}

int run_forecast(const std::string& model_path, const std::string& input,
                 const std::string& horizons_text, bool invert,
                 const std::string& thresholds_text, const std::string& out_path) {
  const ModelFile model = read_model(model_path);
  const PanelCsv panel = read_panel_csv(input);
  const std::vector<int> horizons = parse_int_list(horizons_text);
  if (horizons.empty()) throw DomainError("no horizons given");
  for (int h : horizons)
    if (h < 1) throw DomainError("horizons must be at least 1");
  const std::vector<double> thresholds =
      thresholds_text.empty() ? std::vector<double>{} : parse_double_list(thresholds_text);

  // Arrange the panel columns to the model rows: by label when the model
  // carries labels, otherwise by the stored ordering over equally many
  // columns.
  const int p = model.p;
  std::vector<int> cols(p);
  std::vector<std::string> labels(p);
  if (!model.labels.empty()) {
    std::vector<int> index(p, -1);
    for (int c = 0; c < static_cast<int>(panel.labels.size()); ++c)
      for (int r = 0; r < p; ++r)
        if (panel.labels[c] == model.labels[r]) index[r] = c;
    for (int r = 0; r < p; ++r) {
      if (index[r] < 0)
        throw DomainError("input lacks column '" + model.labels[r] + "' required by the model");
      cols[r] = index[r];
      labels[r] = model.labels[r];
    }
  } else {
    if (static_cast<int>(panel.labels.size()) != p)
      throw DomainError("input has " + std::to_string(panel.labels.size()) +
                        " data columns, the model needs " + std::to_string(p));
    for (int r = 0; r < p; ++r) {
      cols[r] = model.ordering.empty() ? r : model.ordering[r];
      labels[r] = panel.labels[cols[r]];
    }
  }

  const int n = static_cast<int>(panel.values.rows());
  Eigen::VectorXd origin(p);
  for (int r = 0; r < p; ++r) {
    double v = panel.values(n - 1, cols[r]);
    if (model.log_scale) {
      if (!(v > 0.0))
        throw DomainError("log transform requires positive values; column '" + labels[r] +
                          "' ends at " + fmt(v));
      v = std::log(v);
    }
    origin[r] = v - model.means[r];
  }

  FitResult f;
  f.a = model.a;
  f.b = model.b;
  f.k_used = model.k;
  f.p = p;
  f.n = model.n;

  with_output(out_path, [&](std::ostream& out) {
    if (thresholds.empty()) {
      out << "h";
      for (const std::string& label : labels) out << ',' << label;
      out << '\n';
      for (int h : horizons) {
        const Eigen::VectorXd pred = forecast(f, origin, h);
        out << h;
        for (int r = 0; r < p; ++r) {
          const double v =
              invert ? to_observation_scale(pred[r], model.means[r], model.log_scale) : pred[r];
          out << ',' << fmt(v);
        }
        out << '\n';
      }
    } else {
      out << "h,label,prediction,level\n";
      for (int h : horizons) {
        const Eigen::VectorXd pred = forecast(f, origin, h);
        for (int r = 0; r < p; ++r) {
          const double obs = to_observation_scale(pred[r], model.means[r], model.log_scale);
          const double shown = invert ? obs : pred[r];
          out << h << ',' << labels[r] << ',' << fmt(shown) << ',' << level_of(obs, thresholds)
              << '\n';
        }
      }
    }
  });
  return 0;
}

int run_cv(const IngestFlags& ingest_flags, const MethodFlags& method_flags,
           const SelectFlags& select_flags, const std::string& input, int window,
           const std::string& horizons_text, std::optional<int> k,
           const std::string& thresholds_text, const std::vector<std::string>& rules,
           const std::vector<std::string>& ordering_files, int threads,
           const std::string& out_path, const std::string& levels_out) {
  const PanelCsv panel = read_panel_csv(input);
  const std::vector<int> horizons = parse_int_list(horizons_text);
  const std::vector<double> thresholds =
      thresholds_text.empty() ? std::vector<double>{} : parse_double_list(thresholds_text);

  Eigen::MatrixXd raw = panel.values.transpose();
  if (ingest_flags.log) {
    for (int i = 0; i < raw.rows(); ++i)
      for (int t = 0; t < raw.cols(); ++t) {
        if (!(raw(i, t) > 0.0))
          throw DomainError("log transform requires positive values; column '" + panel.labels[i] +
                            "' has " + fmt(raw(i, t)) + " at time row " + std::to_string(t + 1));
        raw(i, t) = std::log(raw(i, t));
      }
  }

  std::vector<OrderingCandidate> candidates;
  if (!rules.empty()) {
    if (ingest_flags.coords_file.empty()) throw DomainError("--order-rule needs --coords-file");
    const Coordinates coords = read_coordinates_csv(ingest_flags.coords_file);
    for (const std::string& rule : rules)
      candidates.push_back({rule, ordering_from_rule(rule, coords, panel.labels)});
  }
  for (const std::string& path : ordering_files)
    candidates.push_back({path, read_ordering_file(path, panel.labels)});
  if (candidates.empty()) {
    std::vector<int> identity(panel.labels.size());
    for (int i = 0; i < static_cast<int>(identity.size()); ++i) identity[i] = i;
    candidates.push_back({"as-given", std::move(identity)});
  }

  CvOptions opts;
  opts.k = k;
  opts.select = select_flags.resolve(1);
  opts.method = method_flags.resolve();
  opts.threads = threads;
  const std::vector<CvReport> reports =
      select_ordering(raw, candidates, window, horizons, opts, ingest_flags.log, thresholds);

  with_output(out_path, [&](std::ostream& out) {
    out << "label,k_hat,h,mspe,sd,instances\n";
    for (const CvReport& report : reports)
      for (const CvHorizon& horizon : report.horizons)
        out << report.label << ',' << report.k_hat << ',' << horizon.h << ','
            << fmt(horizon.mspe) << ',' << fmt(horizon.sd) << ',' << horizon.instances << '\n';
  });
  if (!thresholds.empty() && !levels_out.empty()) {
    with_output(levels_out, [&](std::ostream& out) {
      out << "label,h,level,actual,hit,rate\n";
      for (const CvReport& report : reports)
        for (const CvHorizon& horizon : report.horizons)
          for (std::size_t level = 0; level < horizon.levels.size(); ++level) {
            const LevelStat& stat = horizon.levels[level];
            out << report.label << ',' << horizon.h << ',' << level << ',' << stat.actual << ','
                << stat.hit << ',' << fmt(stat.rate()) << '\n';
          }
    });
  }
  return 0;
}

int run_replicate(const ExperimentSpec& spec, bool csv, const std::string& out_path) {
  const ExperimentResult result = run_experiment(spec);
  with_output(out_path, [&](std::ostream& out) { emit_table(result, out, csv); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"banded spatio-temporal autoregressions"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads; 0 means machine parallelism")
      ->capture_default_str();

  // simulate
  CLI::App* sim = app.add_subcommand("simulate", "draw a model and write a simulated panel csv");
  SimConfig sim_cfg;
  std::string sim_case = "uniform";
  std::string sim_config_path, sim_out = "-", sim_model_out;
  sim->add_option("--p", sim_cfg.p, "series count")->capture_default_str();
  sim->add_option("--k0", sim_cfg.k0, "true bandwidth")->capture_default_str();
  sim->add_option("--n", sim_cfg.n, "series length")->capture_default_str();
  sim->add_option("--case", sim_case, "coefficient design: 1|two-point or 2|uniform")
      ->capture_default_str();
  sim->add_option("--burn-in", sim_cfg.burn_in, "discarded leading steps")->capture_default_str();
  sim->add_option("--seed", sim_cfg.seed, "random seed")->capture_default_str();
  sim->add_option("--eta-min", sim_cfg.eta_min, "lower rescale bound")->capture_default_str();
  sim->add_option("--eta-max", sim_cfg.eta_max, "upper rescale bound")->capture_default_str();
  sim->add_option("--config", sim_config_path, "key = value file with the same settings");
  sim->add_option("--out,-o", sim_out, "output csv path, - for stdout")->capture_default_str();
  sim->add_option("--model-out", sim_model_out, "also write the generating model");

  // bandwidth
  CLI::App* bw = app.add_subcommand("bandwidth", "select the bandwidth of a panel csv");
  std::string bw_input, bw_profile_out;
  IngestFlags bw_ingest;
  SelectFlags bw_select;
  bw->add_option("input", bw_input, "panel csv")->required();
  bw_ingest.attach(bw);
  bw_select.attach(bw);
  bw->add_option("--profile-out", bw_profile_out, "write per-row rss and ratio profiles as csv");

  // fit
  CLI::App* fit_cmd = app.add_subcommand("fit", "estimate banded coefficients from a panel csv");
  std::string fit_input, fit_out = "-", fit_coef_out;
  std::optional<int> fit_k;
  IngestFlags fit_ingest;
  MethodFlags fit_method;
  SelectFlags fit_select;
  fit_cmd->add_option("input", fit_input, "panel csv")->required();
  fit_ingest.attach(fit_cmd);
  fit_method.attach(fit_cmd);
  fit_select.attach(fit_cmd);
  fit_cmd->add_option("--k", fit_k, "bandwidth; selected from the data when absent");
  fit_cmd->add_option("--out,-o", fit_out, "model file path, - for stdout")->capture_default_str();
  fit_cmd->add_option("--coef-out", fit_coef_out, "also write coefficients as csv (i,j,a,b)");

  // forecast
  CLI::App* fc = app.add_subcommand("forecast", "predict ahead from a fitted model file");
  std::string fc_model, fc_input, fc_horizons = "1", fc_thresholds, fc_out = "-";
  bool fc_invert = false;
  fc->add_option("model", fc_model, "model file written by fit")->required();
  fc->add_option("input", fc_input, "panel csv ending at the forecast origin")->required();
  fc->add_option("--horizons", fc_horizons, "comma-separated steps ahead")->capture_default_str();
  fc->add_flag("--invert", fc_invert, "report on the observation scale");
  fc->add_option("--thresholds", fc_thresholds,
                 "ascending level breaks; switches to the long format with a level column");
  fc->add_option("--out,-o", fc_out, "output csv path, - for stdout")->capture_default_str();

  // cv
  CLI::App* cv = app.add_subcommand("cv", "moving-window comparison of row arrangements");
  std::string cv_input, cv_horizons = "1,2", cv_thresholds, cv_out = "-", cv_levels_out;
  int cv_window = 0;
  std::optional<int> cv_k;
  std::vector<std::string> cv_rules, cv_ordering_files;
  IngestFlags cv_ingest;
  MethodFlags cv_method;
  SelectFlags cv_select;
  cv->add_option("input", cv_input, "panel csv")->required();
  cv->add_option("--window", cv_window, "moving window length")->required();
  cv->add_option("--horizons", cv_horizons, "comma-separated steps ahead")->capture_default_str();
  cv->add_option("--k", cv_k, "fixed bandwidth; chosen on the first window when absent");
  cv->add_flag("--log", cv_ingest.log, "work on the logarithm of the data");
  cv->add_option("--coords-file", cv_ingest.coords_file, "station coordinates csv: label,x,y");
  cv->add_option("--order-rule", cv_rules,
                 "candidate arrangement rule (repeatable): n2s, w2e, nw2se, ne2sw, dist:<label>, "
                 "proj:<dx>,<dy>");
  cv->add_option("--ordering-file", cv_ordering_files,
                 "candidate arrangement file (repeatable)");
  cv_method.attach(cv);
  cv_select.attach(cv);
  cv->add_option("--thresholds", cv_thresholds, "ascending observation-scale level breaks");
  cv->add_option("--out,-o", cv_out, "report csv path, - for stdout")->capture_default_str();
  cv->add_option("--levels-out", cv_levels_out, "per-level hit rate csv");

  // replicate
  CLI::App* rep = app.add_subcommand("replicate", "run a simulation experiment grid");
  ExperimentSpec rep_spec;
  std::string rep_config_path, rep_grid, rep_case, rep_r_list, rep_d_rule, rep_out = "-";
  std::optional<int> rep_K;
  std::optional<std::uint64_t> rep_seed;
  std::optional<int> rep_k0, rep_reps, rep_burn_in;
  std::optional<double> rep_C;
  bool rep_csv = false, rep_redraw = false, rep_median = false;
  rep->add_option("--config", rep_config_path, "key = value experiment file");
  rep->add_option("--grid", rep_grid, "cells as PxN tokens, e.g. '100x2000, 50x1000'");
  rep->add_option("--k0", rep_k0, "true bandwidth");
  rep->add_option("--case", rep_case, "coefficient design: 1|two-point or 2|uniform");
  rep->add_option("--K", rep_K, "largest candidate bandwidth");
  rep->add_option("--C", rep_C, "ratio penalty constant");
  rep->add_option("--r-list", rep_r_list, "lag depths, e.g. '1,2,3'");
  rep->add_option("--d-rule", rep_d_rule, "full or screened")
      ->check(CLI::IsMember({"full", "screened", "paper"}));
  rep->add_option("--reps", rep_reps, "repetitions per cell");
  rep->add_option("--seed", rep_seed, "root seed");
  rep->add_flag("--redraw", rep_redraw, "fresh coefficients every repetition");
  rep->add_flag("--median-vote", rep_median, "aggregate row bandwidth picks by lower median");
  rep->add_option("--burn-in", rep_burn_in, "discarded leading steps");
  rep->add_flag("--csv", rep_csv, "emit csv instead of the aligned table");
  rep->add_option("--out,-o", rep_out, "output path, - for stdout")->capture_default_str();

  // let --threads appear after the subcommand name as well
  for (CLI::App* sub : {sim, bw, fit_cmd, fc, cv, rep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[cli]: " << e.what() << '\n';
    std::cerr << app.help();
    return 1;
  }

  try {
    if (app.got_subcommand(sim)) {
      SimConfig merged;
      if (!sim_config_path.empty()) apply_config(merged, read_config(sim_config_path));
      // flags win over the config file
      if (sim->count("--p")) merged.p = sim_cfg.p;
      if (sim->count("--k0")) merged.k0 = sim_cfg.k0;
      if (sim->count("--n")) merged.n = sim_cfg.n;
      if (sim->count("--case") || sim_config_path.empty())
        merged.design = parse_design(sim_case, "--case");
      if (sim->count("--burn-in")) merged.burn_in = sim_cfg.burn_in;
      if (sim->count("--seed")) merged.seed = sim_cfg.seed;
      if (sim->count("--eta-min")) merged.eta_min = sim_cfg.eta_min;
      if (sim->count("--eta-max")) merged.eta_max = sim_cfg.eta_max;
      return run_simulate(merged, sim_out, sim_model_out);
    }
    if (app.got_subcommand(bw))
      return run_bandwidth(bw_ingest, bw_select, bw_input, threads, bw_profile_out);
    if (app.got_subcommand(fit_cmd))
      return run_fit(fit_ingest, fit_method, fit_select, fit_input, fit_k, threads, fit_out,
                     fit_coef_out);
    if (app.got_subcommand(fc))
      return run_forecast(fc_model, fc_input, fc_horizons, fc_invert, fc_thresholds, fc_out);
    if (app.got_subcommand(cv))
      return run_cv(cv_ingest, cv_method, cv_select, cv_input, cv_window, cv_horizons, cv_k,
                    cv_thresholds, cv_rules, cv_ordering_files, threads, cv_out, cv_levels_out);
    if (app.got_subcommand(rep)) {
      ExperimentSpec spec;
      if (!rep_config_path.empty()) apply_config(spec, read_config(rep_config_path));
      if (!rep_grid.empty()) spec.grid = parse_grid(rep_grid);
      if (rep_k0) spec.k0 = *rep_k0;
      if (!rep_case.empty()) spec.design = parse_design(rep_case, "--case");
      if (rep_K) spec.K = rep_K;
      if (rep_C) spec.C = *rep_C;
      if (!rep_r_list.empty()) spec.r_list = parse_int_list(rep_r_list);
      if (!rep_d_rule.empty()) spec.d_rule = rep_d_rule == "full" ? DRule::Full : DRule::PaperRule;
      if (rep_reps) spec.reps = *rep_reps;
      if (rep_seed) spec.seed = *rep_seed;
      if (rep->count("--redraw")) spec.redraw_coefficients = rep_redraw;
      if (rep->count("--median-vote")) spec.median_vote = rep_median;
      if (rep_burn_in) spec.burn_in = *rep_burn_in;
      spec.threads = threads;
      if (spec.grid.empty()) throw DomainError("replicate needs --grid or a config with one");
      return run_replicate(spec, rep_csv, rep_out);
    }
  } catch (const DomainError& e) {
    std::cerr << "error[domain]: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "error[numeric]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
