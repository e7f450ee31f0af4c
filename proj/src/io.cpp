#include "bstar/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "bstar/errors.hpp"

namespace bstar {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      cur += c;
    } else if (c == ',' && !quoted) {
      fields.push_back(unquote(trim(cur)));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(unquote(trim(cur)));
  return fields;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

double parse_double(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  if (t.empty()) throw DomainError(where + ": empty numeric field");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw DomainError(where + ": cannot parse '" + t + "' as a number");
  return v;
}

long long parse_int(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  if (t.empty()) throw DomainError(where + ": empty integer field");
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size())
    throw DomainError(where + ": cannot parse '" + t + "' as an integer");
  return v;
}

std::uint64_t parse_uint64(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  if (t.empty() || t[0] == '-') throw DomainError(where + ": cannot parse '" + t + "' as a seed");
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size())
    throw DomainError(where + ": cannot parse '" + t + "' as a seed");
  return v;
}

bool parse_bool(const std::string& text, const std::string& where) {
  const std::string t = lower(trim(text));
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw DomainError(where + ": cannot parse '" + text + "' as a boolean");
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open " + path + " for writing");
  return out;
}

bool is_time_header(const std::string& label) {
  const std::string t = lower(label);
  return t == "t" || t == "time" || t == "date" || t == "timestamp";
}

std::unordered_map<std::string, int> label_index(const std::vector<std::string>& labels,
                                                 const std::string& what) {
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    if (!index.emplace(labels[i], i).second)
      throw DomainError(what + ": duplicate label '" + labels[i] + "'");
  return index;
}

void check_permutation(const std::vector<int>& perm, int p, const std::string& what) {
  if (static_cast<int>(perm.size()) != p)
    throw DomainError(what + ": has " + std::to_string(perm.size()) + " entries, expected " +
                      std::to_string(p));
  std::vector<char> seen(p, 0);
  for (int v : perm) {
    if (v < 0 || v >= p)
      throw DomainError(what + ": index " + std::to_string(v + 1) + " is out of range");
    if (seen[v]) throw DomainError(what + ": index " + std::to_string(v + 1) + " repeats");
    seen[v] = 1;
  }
}

std::vector<int> order_by_scores(const std::vector<double>& scores) {
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return scores[a] < scores[b]; });
  return idx;
}

// Scores of the data labels under the coordinates file, via a caller-supplied
// score of (x, y).
template <typename ScoreFn>
std::vector<double> coordinate_scores(const Coordinates& coords,
                                      const std::vector<std::string>& labels, ScoreFn&& score) {
  const auto index = label_index(coords.labels, "coordinates");
  std::vector<double> scores;
  scores.reserve(labels.size());
  for (const std::string& label : labels) {
    const auto it = index.find(label);
    if (it == index.end())
      throw DomainError("coordinates do not list station '" + label + "'");
    scores.push_back(score(coords.xy(it->second, 0), coords.xy(it->second, 1)));
  }
  return scores;
}

}  // namespace

DesignCase parse_design(const std::string& text, const std::string& where) {
  const std::string t = lower(trim(text));
  if (t == "1" || t == "two-point" || t == "twopoint") return DesignCase::TwoPoint;
  if (t == "2" || t == "uniform") return DesignCase::Uniform;
  throw DomainError(where + ": unknown design case '" + text + "' (use 1|two-point or 2|uniform)");
}

PanelCsv read_panel_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!next_line(in, line)) throw DomainError(origin + ": empty file");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.empty() || (header.size() == 1 && header[0].empty()))
    throw DomainError(origin + ": empty header row");

  PanelCsv panel;
  int first_data_col = 0;
  if (is_time_header(header[0])) {
    panel.time_label = header[0];
    first_data_col = 1;
  }
  const int p = static_cast<int>(header.size()) - first_data_col;
  if (p < 1) throw DomainError(origin + ": no data columns");
  panel.labels.assign(header.begin() + first_data_col, header.end());
  for (int c = 0; c < p; ++c)
    if (panel.labels[c].empty())
      throw DomainError(origin + ": column " + std::to_string(first_data_col + c + 1) +
                        " has an empty label");
  // duplicate labels would make any later lookup by name ambiguous
  label_index(panel.labels, origin);

  std::vector<Eigen::VectorXd> rows;
  int line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != p + first_data_col)
      throw DomainError(origin + ":" + std::to_string(line_no) + ": has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(p + first_data_col));
    if (first_data_col) panel.timestamps.push_back(fields[0]);
    Eigen::VectorXd row(p);
    for (int c = 0; c < p; ++c) {
      const std::string where =
          origin + ":" + std::to_string(line_no) + ": column '" + panel.labels[c] + "'";
      row[c] = parse_double(fields[first_data_col + c], where);
      if (!std::isfinite(row[c])) throw DomainError(where + ": value is not finite");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DomainError(origin + ": no data rows");

  panel.values.resize(static_cast<int>(rows.size()), p);
  for (int t = 0; t < static_cast<int>(rows.size()); ++t) panel.values.row(t) = rows[t];
  return panel;
}

PanelCsv read_panel_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_panel_csv(in, path);
}

void write_panel_csv(std::ostream& out, const PanelCsv& panel) {
  const int n = static_cast<int>(panel.values.rows());
  const int p = static_cast<int>(panel.values.cols());
  if (p != static_cast<int>(panel.labels.size()))
    throw DomainError("panel csv: " + std::to_string(panel.labels.size()) + " labels for " +
                      std::to_string(p) + " columns");
  const bool with_time = !panel.timestamps.empty();
  if (with_time && static_cast<int>(panel.timestamps.size()) != n)
    throw DomainError("panel csv: " + std::to_string(panel.timestamps.size()) +
                      " timestamps for " + std::to_string(n) + " rows");

  if (with_time) out << panel.time_label << ',';
  for (int c = 0; c < p; ++c) out << panel.labels[c] << (c + 1 < p ? "," : "");
  out << '\n';
  for (int t = 0; t < n; ++t) {
    if (with_time) out << panel.timestamps[t] << ',';
    for (int c = 0; c < p; ++c) out << fmt(panel.values(t, c)) << (c + 1 < p ? "," : "");
    out << '\n';
  }
}

void write_panel_csv(const std::string& path, const PanelCsv& panel) {
  std::ofstream out = open_output(path);
  write_panel_csv(out, panel);
}

Coordinates read_coordinates_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!next_line(in, line)) throw DomainError(origin + ": empty file");
  // header row is required: label, x, y
  Coordinates coords;
  std::vector<std::string> labels;
  std::vector<double> xs, ys;
  int line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::string where = origin + ":" + std::to_string(line_no);
    if (fields.size() < 3)
      throw DomainError(where + ": expected label, x, y");
    labels.push_back(fields[0]);
    xs.push_back(parse_double(fields[1], where + ": x"));
    ys.push_back(parse_double(fields[2], where + ": y"));
  }
  if (labels.empty()) throw DomainError(origin + ": no coordinate rows");
  coords.labels = std::move(labels);
  coords.xy.resize(static_cast<int>(xs.size()), 2);
  for (int i = 0; i < static_cast<int>(xs.size()); ++i) {
    coords.xy(i, 0) = xs[i];
    coords.xy(i, 1) = ys[i];
  }
  label_index(coords.labels, origin);
  return coords;
}

Coordinates read_coordinates_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_coordinates_csv(in, path);
}

std::vector<int> ordering_by_projection(const Coordinates& coords,
                                        const std::vector<std::string>& labels, double dx,
                                        double dy) {
  if (dx == 0.0 && dy == 0.0) throw DomainError("ordering: zero projection direction");
  return order_by_scores(
      coordinate_scores(coords, labels, [&](double x, double y) { return dx * x + dy * y; }));
}

std::vector<int> ordering_by_distance(const Coordinates& coords,
                                      const std::vector<std::string>& labels,
                                      const std::string& anchor) {
  const auto index = label_index(coords.labels, "coordinates");
  const auto it = index.find(anchor);
  if (it == index.end())
    throw DomainError("coordinates do not list anchor '" + anchor + "'");
  const double ax = coords.xy(it->second, 0);
  const double ay = coords.xy(it->second, 1);
  return order_by_scores(coordinate_scores(coords, labels, [&](double x, double y) {
    return (x - ax) * (x - ax) + (y - ay) * (y - ay);
  }));
}

std::vector<int> ordering_from_rule(const std::string& rule, const Coordinates& coords,
                                    const std::vector<std::string>& labels) {
  const std::string r = trim(rule);
  // axis conventions: x grows to the east, y grows to the north
  if (r == "n2s") return ordering_by_projection(coords, labels, 0.0, -1.0);
  if (r == "w2e") return ordering_by_projection(coords, labels, 1.0, 0.0);
  if (r == "nw2se") return ordering_by_projection(coords, labels, 1.0, -1.0);
  if (r == "ne2sw") return ordering_by_projection(coords, labels, -1.0, -1.0);
  if (r.rfind("dist:", 0) == 0) return ordering_by_distance(coords, labels, trim(r.substr(5)));
  if (r.rfind("proj:", 0) == 0) {
    const std::vector<double> dir = parse_double_list(r.substr(5));
    if (dir.size() != 2) throw DomainError("ordering rule '" + rule + "': expected proj:<dx>,<dy>");
    return ordering_by_projection(coords, labels, dir[0], dir[1]);
  }
  throw DomainError("unknown ordering rule '" + rule +
                    "' (use n2s, w2e, nw2se, ne2sw, dist:<label> or proj:<dx>,<dy>)");
}

std::vector<int> read_ordering_file(const std::string& path,
                                    const std::vector<std::string>& labels) {
  std::ifstream in = open_input(path);
  const auto index = label_index(labels, path);
  std::vector<int> perm;
  std::string line;
  while (next_line(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) {
      token = trim(token);
      if (token.empty()) continue;
      const auto it = index.find(token);
      if (it != index.end()) {
        perm.push_back(it->second);
        continue;
      }
      const long long v = parse_int(token, path);
      if (v < 1 || v > static_cast<long long>(labels.size()))
        throw DomainError(path + ": index " + token + " is out of range 1.." +
                          std::to_string(labels.size()));
      perm.push_back(static_cast<int>(v - 1));
    }
  }
  check_permutation(perm, static_cast<int>(labels.size()), path);
  return perm;
}

IngestResult ingest(const PanelCsv& panel, Transform transform, bool center,
                    const std::vector<int>& ordering) {
  const int n = static_cast<int>(panel.values.rows());
  const int p = static_cast<int>(panel.values.cols());
  std::vector<int> perm = ordering;
  if (perm.empty()) {
    perm.resize(p);
    std::iota(perm.begin(), perm.end(), 0);
  }
  check_permutation(perm, p, "ordering");

  Eigen::MatrixXd data(p, n);
  std::vector<std::string> labels(p);
  for (int r = 0; r < p; ++r) {
    data.row(r) = panel.values.col(perm[r]).transpose();
    labels[r] = panel.labels[perm[r]];
  }

  if (transform == Transform::Log) {
    for (int r = 0; r < p; ++r)
      for (int t = 0; t < n; ++t) {
        if (!(data(r, t) > 0.0))
          throw DomainError("log transform requires positive values; column '" + labels[r] +
                            "' has " + fmt(data(r, t)) + " at time row " + std::to_string(t + 1));
        data(r, t) = std::log(data(r, t));
      }
  }

  ScaleInfo scale;
  scale.log_scale = transform == Transform::Log;
  if (center) {
    scale.row_means = data.rowwise().mean();
    data.colwise() -= scale.row_means;
  } else {
    scale.row_means = Eigen::VectorXd::Zero(p);
  }
  return IngestResult{PanelSeries(std::move(data), center, std::move(perm)), std::move(labels),
                      std::move(scale)};
}

IngestResult ingest(const std::string& path, Transform transform, bool center,
                    const std::vector<int>& ordering) {
  return ingest(read_panel_csv(path), transform, center, ordering);
}

void write_model(std::ostream& out, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int k,
                 int n, const std::string& method, const ScaleInfo& scale,
                 const std::vector<std::string>& labels, const std::vector<int>& ordering) {
  const int p = static_cast<int>(a.rows());
  if (a.cols() != p || b.rows() != p || b.cols() != p)
    throw DomainError("model write: coefficient matrices must be square and equally sized");
  if (k < 0 || k >= p) throw DomainError("model write: bandwidth outside [0, p)");
  Eigen::VectorXd means = scale.row_means;
  if (means.size() == 0) means = Eigen::VectorXd::Zero(p);
  if (static_cast<int>(means.size()) != p)
    throw DomainError("model write: " + std::to_string(means.size()) + " means for p = " +
                      std::to_string(p));
  if (!labels.empty() && static_cast<int>(labels.size()) != p)
    throw DomainError("model write: " + std::to_string(labels.size()) + " labels for p = " +
                      std::to_string(p));

  out << "banded-star model\n";
  out << "p " << p << '\n';
  out << "k " << k << '\n';
  out << "n " << n << '\n';
  out << "method " << method << '\n';
  out << "transform " << (scale.log_scale ? "log" : "none") << '\n';
  out << "means";
  for (int i = 0; i < p; ++i) out << ' ' << fmt(means[i]);
  out << '\n';
  if (!labels.empty()) {
    out << "labels";
    for (const std::string& label : labels) out << '\t' << label;
    out << '\n';
  }
  if (!ordering.empty()) {
    check_permutation(ordering, p, "model write: ordering");
    out << "ordering";
    for (int v : ordering) out << ' ' << (v + 1);
    out << '\n';
  }
  for (int i = 0; i < p; ++i) {
    const int lo = std::max(0, i - k);
    const int hi = std::min(p - 1, i + k);
    for (int j = lo; j <= hi; ++j)
      out << "coef " << (i + 1) << ' ' << (j + 1) << ' ' << fmt(a(i, j)) << ' ' << fmt(b(i, j))
          << '\n';
  }
}

void write_model(std::ostream& out, const FitResult& fit, const ScaleInfo& scale,
                 const std::vector<std::string>& labels, const std::vector<int>& ordering) {
  std::string method = method_name(fit.method);
  if (fit.method.kind == Method::MultiYW) method += "(r=" + std::to_string(fit.method.r) + ")";
  if (fit.method.kind == Method::ReducedYW && fit.method.d)
    method += "(d=" + std::to_string(*fit.method.d) + ")";
  write_model(out, fit.a, fit.b, fit.k_used, fit.n, method, scale, labels, ordering);
}

void write_model(const std::string& path, const FitResult& fit, const ScaleInfo& scale,
                 const std::vector<std::string>& labels, const std::vector<int>& ordering) {
  std::ofstream out = open_output(path);
  write_model(out, fit, scale, labels, ordering);
}

ModelFile read_model(std::istream& in, const std::string& origin) {
  std::string line;
  if (!next_line(in, line) || trim(line) != "banded-star model")
    throw DomainError(origin + ": not a model file (missing 'banded-star model' header)");

  ModelFile m;
  bool have_p = false, have_k = false;
  int line_no = 1;
  auto need_p = [&](const std::string& key) {
    if (!have_p)
      throw DomainError(origin + ": '" + key + "' before 'p'");
  };
  while (next_line(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    std::istringstream ss(text);
    std::string key;
    ss >> key;
    const std::string where = origin + ":" + std::to_string(line_no);
    std::string rest;
    std::getline(ss, rest);
    rest = trim(rest);
    if (key == "p") {
      const long long v = parse_int(rest, where);
      if (v < 1) throw DomainError(where + ": p must be positive");
      m.p = static_cast<int>(v);
      m.a = Eigen::MatrixXd::Zero(m.p, m.p);
      m.b = Eigen::MatrixXd::Zero(m.p, m.p);
      m.means = Eigen::VectorXd::Zero(m.p);
      have_p = true;
    } else if (key == "k") {
      const long long v = parse_int(rest, where);
      if (v < 0) throw DomainError(where + ": k must be nonnegative");
      m.k = static_cast<int>(v);
      have_k = true;
    } else if (key == "n") {
      const long long v = parse_int(rest, where);
      if (v < 0) throw DomainError(where + ": n must be nonnegative");
      m.n = static_cast<int>(v);
    } else if (key == "method") {
      m.method = rest;
    } else if (key == "transform") {
      if (rest == "log")
        m.log_scale = true;
      else if (rest == "none")
        m.log_scale = false;
      else
        throw DomainError(where + ": unknown transform '" + rest + "'");
    } else if (key == "means") {
      need_p(key);
      const std::vector<double> vals = parse_double_list(rest);
      if (static_cast<int>(vals.size()) != m.p)
        throw DomainError(where + ": " + std::to_string(vals.size()) + " means for p = " +
                          std::to_string(m.p));
      for (int i = 0; i < m.p; ++i) m.means[i] = vals[i];
    } else if (key == "labels") {
      need_p(key);
      m.labels.clear();
      std::stringstream ls(rest);
      std::string token;
      while (std::getline(ls, token, '\t')) {
        token = trim(token);
        if (!token.empty()) m.labels.push_back(token);
      }
      if (static_cast<int>(m.labels.size()) != m.p)
        throw DomainError(where + ": " + std::to_string(m.labels.size()) + " labels for p = " +
                          std::to_string(m.p));
    } else if (key == "ordering") {
      need_p(key);
      const std::vector<int> vals = parse_int_list(rest);
      m.ordering.clear();
      for (int v : vals) m.ordering.push_back(v - 1);
      check_permutation(m.ordering, m.p, where);
    } else if (key == "coef") {
      need_p(key);
      if (!have_k) throw DomainError(where + ": 'coef' before 'k'");
      std::istringstream cs(rest);
      long long i = 0, j = 0;
      std::string sa, sb, extra;
      if (!(cs >> i >> j >> sa >> sb) || (cs >> extra))
        throw DomainError(where + ": expected 'coef i j a b'");
      if (i < 1 || i > m.p || j < 1 || j > m.p)
        throw DomainError(where + ": coefficient index out of range");
      if (std::llabs(i - j) > m.k)
        throw DomainError(where + ": coefficient (" + std::to_string(i) + ", " +
                          std::to_string(j) + ") lies outside the band of width " +
                          std::to_string(m.k));
      const double a = parse_double(sa, where);
      const double b = parse_double(sb, where);
      if (i == j && a != 0.0)
        throw DomainError(where + ": diagonal entry of the spatial matrix must be zero");
      m.a(i - 1, j - 1) = a;
      m.b(i - 1, j - 1) = b;
    } else {
      throw DomainError(where + ": unknown model key '" + key + "'");
    }
  }
  if (!have_p || !have_k) throw DomainError(origin + ": model file lacks p or k");
  return m;
}

ModelFile read_model(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_model(in, path);
}

std::map<std::string, std::string> read_config(std::istream& in, const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw DomainError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(text.substr(0, eq));
    if (key.empty())
      throw DomainError(origin + ":" + std::to_string(line_no) + ": empty key");
    kv[key] = trim(text.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_config(in, path);
}

void apply_config(SimConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    const std::string where = "simulate config key '" + key + "'";
    if (key == "p")
      cfg.p = static_cast<int>(parse_int(value, where));
    else if (key == "k0")
      cfg.k0 = static_cast<int>(parse_int(value, where));
    else if (key == "n")
      cfg.n = static_cast<int>(parse_int(value, where));
    else if (key == "case" || key == "design")
      cfg.design = parse_design(value, where);
    else if (key == "burn_in")
      cfg.burn_in = static_cast<int>(parse_int(value, where));
    else if (key == "seed")
      cfg.seed = parse_uint64(value, where);
    else if (key == "eta_min")
      cfg.eta_min = parse_double(value, where);
    else if (key == "eta_max")
      cfg.eta_max = parse_double(value, where);
    else
      throw DomainError("unknown simulate config key '" + key + "'");
  }
}

void apply_config(ExperimentSpec& spec, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    const std::string where = "experiment config key '" + key + "'";
    if (key == "grid")
      spec.grid = parse_grid(value);
    else if (key == "k0")
      spec.k0 = static_cast<int>(parse_int(value, where));
    else if (key == "case" || key == "design")
      spec.design = parse_design(value, where);
    else if (key == "K")
      spec.K = static_cast<int>(parse_int(value, where));
    else if (key == "C")
      spec.C = parse_double(value, where);
    else if (key == "median_vote")
      spec.median_vote = parse_bool(value, where);
    else if (key == "r_list")
      spec.r_list = parse_int_list(value);
    else if (key == "d_rule") {
      const std::string t = lower(trim(value));
      if (t == "full")
        spec.d_rule = DRule::Full;
      else if (t == "paper" || t == "paper-rule" || t == "screened")
        spec.d_rule = DRule::PaperRule;
      else
        throw DomainError(where + ": use full or screened");
    } else if (key == "reps" || key == "replications")
      spec.reps = static_cast<int>(parse_int(value, where));
    else if (key == "seed" || key == "base_seed")
      spec.seed = parse_uint64(value, where);
    else if (key == "redraw_coefficients")
      spec.redraw_coefficients = parse_bool(value, where);
    else if (key == "burn_in")
      spec.burn_in = static_cast<int>(parse_int(value, where));
    else if (key == "threads")
      spec.threads = static_cast<int>(parse_int(value, where));
    else
      throw DomainError("unknown experiment config key '" + key + "'");
  }
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::string norm = text;
  for (char& c : norm)
    if (c == ',') c = ' ';
  std::istringstream ss(norm);
  std::string token;
  while (ss >> token) out.push_back(static_cast<int>(parse_int(token, "list entry")));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::string norm = text;
  for (char& c : norm)
    if (c == ',') c = ' ';
  std::istringstream ss(norm);
  std::string token;
  while (ss >> token) out.push_back(parse_double(token, "list entry"));
  return out;
}

std::vector<std::pair<int, int>> parse_grid(const std::string& text) {
  std::vector<std::pair<int, int>> grid;
  std::string norm = text;
  for (char& c : norm)
    if (c == ',') c = ' ';
  std::istringstream ss(norm);
  std::string token;
  while (ss >> token) {
    const std::size_t x = token.find_first_of("xX");
    if (x == std::string::npos || x == 0 || x + 1 >= token.size())
      throw DomainError("grid entry '" + token + "' is not of the form PxN");
    const long long p = parse_int(token.substr(0, x), "grid entry");
    const long long n = parse_int(token.substr(x + 1), "grid entry");
    if (p < 1 || n < 1) throw DomainError("grid entry '" + token + "' must be positive");
    grid.emplace_back(static_cast<int>(p), static_cast<int>(n));
  }
  if (grid.empty()) throw DomainError("empty grid");
  return grid;
}

}  // namespace bstar
