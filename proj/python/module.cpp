#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>

#include "bstar/bandwidth.hpp"
#include "bstar/errors.hpp"
#include "bstar/estimate.hpp"
#include "bstar/forecast.hpp"
#include "bstar/simulate.hpp"

namespace py = pybind11;

namespace {

using namespace bstar;

PanelSeries make_series(Eigen::MatrixXd y, bool center) {
  if (center) {
    const Eigen::VectorXd means = y.rowwise().mean();
    y.colwise() -= means;
    return PanelSeries(std::move(y), true);
  }
  return PanelSeries(std::move(y), false);
}

MethodSpec make_method(const std::string& method, int r, std::optional<int> d) {
  MethodSpec spec;
  if (method == "full")
    spec.kind = Method::FullYW;
  else if (method == "multi")
    spec.kind = Method::MultiYW;
  else if (method == "reduced")
    spec.kind = Method::ReducedYW;
  else
    throw DomainError("unknown method '" + method + "' (use full, multi or reduced)");
  spec.r = r;
  spec.d = d;
  return spec;
}

DesignCase make_design(int design_case) {
  if (design_case == 1) return DesignCase::TwoPoint;
  if (design_case == 2) return DesignCase::Uniform;
  throw DomainError("case must be 1 (two-point) or 2 (uniform)");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "banded spatio-temporal autoregressions";

  m.def(
      "simulate",
      [](int p, int k0, int n, int design_case, std::uint64_t seed, int burn_in, double eta_min,
         double eta_max) {
        SimConfig cfg;
        cfg.p = p;
        cfg.k0 = k0;
        cfg.n = n;
        cfg.design = make_design(design_case);
        cfg.seed = seed;
        cfg.burn_in = burn_in;
        cfg.eta_min = eta_min;
        cfg.eta_max = eta_max;
        validate(cfg);
        auto [model, attempts] = draw_stable_model(cfg);
        (void)attempts;
        const PanelSeries y = simulate(model, n, burn_in, seed);
        return py::make_tuple(y.data(), model.a(), model.b());
      },
      py::arg("p") = 100, py::arg("k0") = 3, py::arg("n") = 1000, py::arg("case") = 2,
      py::arg("seed") = 0, py::arg("burn_in") = 500, py::arg("eta_min") = 0.4,
      py::arg("eta_max") = 0.8,
      "Draw a stable banded model and simulate a panel.\n"
      "Returns (y, a, b): y is p x n with one column per time point.");

  m.def(
      "select_bandwidth",
      [](Eigen::MatrixXd y, std::optional<int> K, double C, bool median_vote, bool center,
         int threads) {
        const PanelSeries s = make_series(std::move(y), center);
        SelectOptions opts;
        opts.K = K;
        opts.C = C;
        opts.median_vote = median_vote;
        opts.threads = threads;
        const BandwidthSelection sel = select_bandwidth(s, opts);
        py::dict out;
        out["k_hat"] = sel.k_hat;
        out["K"] = sel.K;
        out["w_n"] = sel.w_n;
        std::vector<int> picks;
        picks.reserve(sel.profiles.size());
        for (const RatioProfile& prof : sel.profiles) picks.push_back(prof.k_pick);
        out["row_picks"] = picks;
        return out;
      },
      py::arg("y"), py::arg("K") = std::nullopt, py::arg("C") = 1.0,
      py::arg("median_vote") = false, py::arg("center") = true, py::arg("threads") = 1,
      "Ratio-criterion bandwidth choice for a p x n panel.");

  m.def(
      "fit",
      [](Eigen::MatrixXd y, const std::string& method, std::optional<int> k, int r,
         std::optional<int> d, bool center, int threads) {
        const PanelSeries s = make_series(std::move(y), center);
        const FitResult f = fit(s, make_method(method, r, d), k, threads);
        py::dict out;
        out["a"] = f.a;
        out["b"] = f.b;
        out["k"] = f.k_used;
        out["method"] = method_name(f.method);
        return out;
      },
      py::arg("y"), py::arg("method") = "full", py::arg("k") = std::nullopt, py::arg("r") = 1,
      py::arg("d") = std::nullopt, py::arg("center") = true, py::arg("threads") = 1,
      "Estimate banded coefficients from a p x n panel; selects the bandwidth "
      "when k is absent.");

  m.def(
      "forecast",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& y_last,
         int h) {
        FitResult f;
        f.a = a;
        f.b = b;
        f.p = static_cast<int>(a.rows());
        return forecast(f, y_last, h);
      },
      py::arg("a"), py::arg("b"), py::arg("y_last"), py::arg("h") = 1,
      "h-step-ahead point forecast from the last observation.");

  m.attr("__version__") = "0.1.0";
}
