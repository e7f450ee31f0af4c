#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bstar/estimate.hpp"
#include "bstar/forecast.hpp"
#include "bstar/model.hpp"
#include "bstar/montecarlo.hpp"
#include "bstar/simulate.hpp"

namespace bstar {

// Panel data as stored on disk: one row per time point, one column per
// location. A leading column whose header is t, time, date or timestamp
// (case-insensitive) is carried along verbatim and ignored by the math.
// Missing or non-numeric cells are hard errors reported with their
// coordinates.
struct PanelCsv {
  std::vector<std::string> labels;      // location columns, in file order
  std::string time_label = "t";         // header of the timestamp column
  std::vector<std::string> timestamps;  // empty when the file has none
  Eigen::MatrixXd values;               // time by location
};

PanelCsv read_panel_csv(std::istream& in, const std::string& origin);
PanelCsv read_panel_csv(const std::string& path);
void write_panel_csv(std::ostream& out, const PanelCsv& panel);
void write_panel_csv(const std::string& path, const PanelCsv& panel);

// Station coordinates: label, x (east), y (north) per row.
struct Coordinates {
  std::vector<std::string> labels;
  Eigen::MatrixXd xy;
};

Coordinates read_coordinates_csv(std::istream& in, const std::string& origin);
Coordinates read_coordinates_csv(const std::string& path);

// Row arrangements computed from coordinates. Results list source indices in
// their new order; ties keep the original order. Every data label must have
// coordinates.
std::vector<int> ordering_by_projection(const Coordinates& coords,
                                        const std::vector<std::string>& labels, double dx,
                                        double dy);
std::vector<int> ordering_by_distance(const Coordinates& coords,
                                      const std::vector<std::string>& labels,
                                      const std::string& anchor);

// Named rules: n2s, w2e, nw2se, ne2sw, dist:<label>, proj:<dx>,<dy>.
std::vector<int> ordering_from_rule(const std::string& rule, const Coordinates& coords,
                                    const std::vector<std::string>& labels);

// One entry per line, either a 1-based source index or a column label; must
// form a permutation of all columns.
std::vector<int> read_ordering_file(const std::string& path,
                                    const std::vector<std::string>& labels);

enum class Transform { None, Log };

// A panel ready for estimation: rows arranged, transformed, centered, with
// the metadata needed to map forecasts back to the observation scale.
struct IngestResult {
  PanelSeries series;
  std::vector<std::string> labels;  // in model-row order
  ScaleInfo scale;                  // per-row means; zero when center was off
};

IngestResult ingest(const PanelCsv& panel, Transform transform, bool center = true,
                    const std::vector<int>& ordering = {});
IngestResult ingest(const std::string& path, Transform transform, bool center = true,
                    const std::vector<int>& ordering = {});

// Fitted model persisted as text: a small key/value header followed by one
// `coef i j a_ij b_ij` line (1-based) per within-band pair.
struct ModelFile {
  int p = 0;
  int k = 0;
  int n = 0;  // sample size behind the fit; 0 when unknown
  std::string method;
  bool log_scale = false;
  Eigen::VectorXd means;            // zero vector when the header has none
  std::vector<std::string> labels;  // empty when the header has none
  std::vector<int> ordering;        // source indices; empty means identity
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
};

void write_model(std::ostream& out, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int k,
                 int n, const std::string& method, const ScaleInfo& scale,
                 const std::vector<std::string>& labels = {},
                 const std::vector<int>& ordering = {});
void write_model(std::ostream& out, const FitResult& fit, const ScaleInfo& scale,
                 const std::vector<std::string>& labels = {},
                 const std::vector<int>& ordering = {});
void write_model(const std::string& path, const FitResult& fit, const ScaleInfo& scale,
                 const std::vector<std::string>& labels = {},
                 const std::vector<int>& ordering = {});
ModelFile read_model(std::istream& in, const std::string& origin);
ModelFile read_model(const std::string& path);

// The design-case labels accepted on the command line and in config files.
DesignCase parse_design(const std::string& text, const std::string& where = "design");

// key = value configuration files; '#' starts a comment, blank lines are
// skipped, later occurrences of a key win.
std::map<std::string, std::string> read_config(std::istream& in, const std::string& origin);
std::map<std::string, std::string> read_config(const std::string& path);

// Fills cfg/spec from config keys; unknown keys are errors. Keys mirror the
// field names (p, k0, n, case, burn_in, seed, eta_min, eta_max; grid, K, C,
// r_list, d_rule, reps, redraw_coefficients, median_vote, threads).
void apply_config(SimConfig& cfg, const std::map<std::string, std::string>& kv);
void apply_config(ExperimentSpec& spec, const std::map<std::string, std::string>& kv);

// Comma or whitespace separated lists; the grid uses PxN tokens, e.g.
// "100x2000, 50x1000".
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);
std::vector<std::pair<int, int>> parse_grid(const std::string& text);

}  // namespace bstar
