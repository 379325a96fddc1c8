#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sirspline/bootstrap.hpp"
#include "sirspline/error.hpp"
#include "sirspline/io.hpp"
#include "sirspline/metrics.hpp"
#include "sirspline/pipeline.hpp"

namespace py = pybind11;
using namespace sirspline;

namespace {

PipelineOptions options(int degree, const std::string& family, int window, int max_knots,
                        int steps, int mc_paths, std::uint64_t seed) {
  PipelineOptions o;
  o.degree = degree;
  o.window = window;
  o.likelihood.family = parse_family(family);
  o.likelihood.steps_k = steps;
  o.likelihood.mc_paths_B = mc_paths;
  o.likelihood.seed = seed;
  o.selection.max_knots = max_knots;
  return o;
}

std::vector<std::int64_t> column(const EpidemicPath& p, std::int64_t CountState::*field) {
  std::vector<std::int64_t> out;
  for (const auto& x : p.states) out.push_back(x.*field);
  return out;
}

}  // namespace

PYBIND11_MODULE(_sirspline, m) {
  m.doc() = "Spline estimation of a time-varying SIR infection rate";
  py::register_exception<Error>(m, "SirsplineError", PyExc_ValueError);

  py::class_<KnotVector>(m, "KnotVector")
      .def(py::init<double, double, std::vector<double>, int>(), py::arg("lo"), py::arg("hi"),
           py::arg("interior"), py::arg("degree"))
      .def_property_readonly("lo", &KnotVector::lo)
      .def_property_readonly("hi", &KnotVector::hi)
      .def_property_readonly("degree", &KnotVector::degree)
      .def_property_readonly("interior", &KnotVector::interior)
      .def_property_readonly("num_basis", &KnotVector::num_basis)
      .def("basis", [](const KnotVector& k, double t) { return basis_dense(k, t); }, py::arg("t"));

  py::class_<SplineModel>(m, "SplineModel")
      .def(py::init<KnotVector, std::vector<double>>(), py::arg("knots"), py::arg("coefficients"))
      .def_property_readonly("knots", &SplineModel::knots)
      .def_property_readonly("coefficients", &SplineModel::coefficients)
      .def("__call__", &SplineModel::operator(), py::arg("t"))
      .def("evaluate", [](const SplineModel& s, std::vector<double> t) { return evaluate(s, t); });

  py::class_<EpidemicPath>(m, "EpidemicPath")
      .def_readonly("times", &EpidemicPath::times)
      .def_readonly("population", &EpidemicPath::population)
      .def_property_readonly("S", [](const EpidemicPath& p) { return column(p, &CountState::s); })
      .def_property_readonly("I", [](const EpidemicPath& p) { return column(p, &CountState::i); })
      .def("__len__", &EpidemicPath::size);

  m.def("make_path",
        [](std::vector<double> times, std::vector<std::int64_t> s, std::vector<std::int64_t> i,
           std::int64_t n) {
          if (times.size() != s.size() || s.size() != i.size())
            throw ArgumentError("times, S and I must have equal length");
          EpidemicPath p;
          p.population = n;
          p.times = std::move(times);
          for (std::size_t k = 0; k < s.size(); ++k) p.states.push_back({s[k], i[k], n});
          p.horizon = p.times.empty() ? 0.0 : p.times.back();
          p.validate();
          return p;
        },
        py::arg("times"), py::arg("S"), py::arg("I"), py::arg("population"));

  m.def("simulate",
        [](int scenario, std::int64_t population, double infected_fraction, int days, double gamma,
           std::uint64_t seed, const std::string& simulator) {
          const TruthFunction truth = TruthFunction::scenario(scenario);
          const auto infected = static_cast<std::int64_t>(std::llround(infected_fraction * population));
          if (infected < 1 || infected >= population) throw ArgumentError("initial infected count out of range");
          const CountState init{population - infected, infected, population};
          const auto grid = uniform_grid(0.0, days, static_cast<std::size_t>(days));
          if (simulator == "exact")
            return sample_path_at(simulate_exact(truth.rates(gamma), init, days, seed), grid);
          if (simulator == "tau-leap") return simulate_tau_leap(truth.rates(gamma), init, grid, seed);
          throw ArgumentError("simulator must be exact or tau-leap");
        },
        py::arg("scenario") = 1, py::arg("population") = 10000, py::arg("infected_fraction") = 0.01,
        py::arg("days") = 70, py::arg("gamma") = 0.1, py::arg("seed") = 1,
        py::arg("simulator") = "exact");

  m.def("truth", [](int scenario, std::vector<double> t) { return TruthFunction::scenario(scenario).on(t); },
        py::arg("scenario"), py::arg("times"));

  m.def("read_path_csv", [](const std::string& f) { return io::read_path_csv(std::filesystem::path(f)); });
  m.def("ingest_covid_csv",
        [](const std::string& f, std::int64_t n) { return io::ingest_covid_csv(std::filesystem::path(f), n); },
        py::arg("path"), py::arg("population"));

  m.def("loglik",
        [](const EpidemicPath& p, double gamma, const SplineModel& beta, const std::string& family,
           int steps, int mc_paths, std::uint64_t seed) {
          LikelihoodConfig c;
          c.family = parse_family(family);
          c.steps_k = steps;
          c.mc_paths_B = mc_paths;
          c.seed = seed;
          return multistep_loglik(p, ParameterVector{gamma, beta}, c);
        },
        py::arg("path"), py::arg("gamma"), py::arg("beta"), py::arg("family") = "tau-leap",
        py::arg("steps") = 1, py::arg("mc_paths") = 100, py::arg("seed") = 1);

  py::class_<FitResult>(m, "FitResult")
      .def_property_readonly("gamma", [](const FitResult& f) { return f.theta_hat.gamma; })
      .def_property_readonly("beta", [](const FitResult& f) { return f.theta_hat.spline; })
      .def_readonly("loglik", &FitResult::loglik)
      .def_readonly("bic", &FitResult::bic)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("num_params", &FitResult::num_params);

  m.def("fit",
        [](const EpidemicPath& p, int degree, const std::string& family, int window, int max_knots,
           std::optional<std::vector<double>> knots, int steps, int mc_paths, std::uint64_t seed) {
          const PipelineOptions o = options(degree, family, window, max_knots, steps, mc_paths, seed);
          py::gil_scoped_release release;
          if (knots) return fit_with_knots(p, *knots, o);
          return run_pipeline(p, o).selection.fit;
        },
        py::arg("path"), py::arg("degree") = 0, py::arg("family") = "tau-leap", py::arg("window") = 4,
        py::arg("max_knots") = 10, py::arg("knots") = py::none(), py::arg("steps") = 1,
        py::arg("mc_paths") = 100, py::arg("seed") = 1);

  m.def("bootstrap_band",
        [](const EpidemicPath& p, const FitResult& fit, std::size_t replicates, double level,
           const std::string& method, bool bias_corrected, const std::string& smoothing,
           const std::string& family, std::uint64_t seed) {
          LikelihoodConfig c;
          c.family = parse_family(family);
          BootstrapOptions o;
          o.replicates = replicates;
          o.seed = seed;
          ConfidenceBand b;
          {
            py::gil_scoped_release release;
            const BootstrapEnsemble e = run_bootstrap(fit.theta_hat, p, c, o);
            b = make_band(e, parse_interval_method(method), level, bias_corrected, parse_smoothing(smoothing));
          }
          py::dict d;
          d["times"] = b.times;
          d["point"] = b.point;
          d["lower"] = b.lower;
          d["upper"] = b.upper;
          return d;
        },
        py::arg("path"), py::arg("fit"), py::arg("replicates") = 200, py::arg("level") = 0.95,
        py::arg("method") = "percentile", py::arg("bias_corrected") = true,
        py::arg("smoothing") = "minmax", py::arg("family") = "tau-leap", py::arg("seed") = 1);

  m.def("imse",
        [](std::vector<double> estimate, int scenario, std::vector<double> grid) {
          return imse(estimate, TruthFunction::scenario(scenario), grid);
        },
        py::arg("estimate"), py::arg("scenario"), py::arg("grid"));
}
