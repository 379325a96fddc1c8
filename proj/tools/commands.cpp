#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "simstudy.hpp"
#include "sirspline/bootstrap.hpp"
#include "sirspline/error.hpp"
#include "sirspline/io.hpp"
#include "sirspline/metrics.hpp"
#include "sirspline/parallel.hpp"
#include "sirspline/pipeline.hpp"
#include "sirspline/rng.hpp"

#ifndef SIRSPLINE_VERSION
#define SIRSPLINE_VERSION "dev"
#endif

namespace fs = std::filesystem;
using sirspline::io::json;

namespace sirspline::cli {

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return 0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[8192];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

// --- shared option groups -------------------------------------------------

struct Common {
  std::string out = "out";
  std::string config;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

struct DataInput {
  std::string data;
  std::string covid;
  std::int64_t population = 0;
};

struct FitSettings {
  int degree = 0;
  int window = 4;
  std::string family = "tau-leap";
  int steps = 1;
  int mc_paths = 100;
  int max_knots = 10;
  std::vector<double> knots;
  int multistart = 0;
  int restarts = 1;
};

void add_common(CLI::App* sub, Common& c) {
  c.workers = default_workers();
  sub->add_option("--config", c.config, "flat key = value file; flags override it");
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
  sub->add_option("--workers", c.workers, "worker threads (default: SIRSPLINE_WORKERS, else all cores)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_data(CLI::App* sub, DataInput& d) {
  auto* data = sub->add_option("--data", d.data, "path CSV with columns time,S,I,N");
  auto* covid = sub->add_option("--covid", d.covid, "CSV with date,cumulative_cases,active_cases");
  data->excludes(covid);
  sub->add_option("--population", d.population, "population size for --covid")
      ->check(CLI::PositiveNumber);
}

void add_fit(CLI::App* sub, FitSettings& f) {
  sub->add_option("--degree", f.degree, "spline degree")->check(CLI::Range(0, 5))->capture_default_str();
  sub->add_option("--window", f.window, "moving-average window (observations)")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  sub->add_option("--family", f.family, "likelihood: tau-leap or diffusion")
      ->check(CLI::IsMember({"tau-leap", "diffusion"}))
      ->capture_default_str();
  sub->add_option("--steps", f.steps, "sub-steps k per transition")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--mc-paths", f.mc_paths, "Monte Carlo paths B for k > 1")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--max-knots", f.max_knots, "largest K tried by forward selection")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_option("--knots", f.knots, "fixed interior knots (skips selection)")->delimiter(',');
  sub->add_option("--multistart", f.multistart, "extra randomized optimizer starts")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_option("--restarts", f.restarts, "optimizer restarts after convergence")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

EpidemicPath load_data(const DataInput& d) {
  if (!d.data.empty()) return io::read_path_csv(fs::path(d.data));
  if (!d.covid.empty()) {
    if (d.population <= 0) throw ArgumentError("--covid needs --population");
    return io::ingest_covid_csv(fs::path(d.covid), d.population);
  }
  throw ArgumentError("one of --data or --covid is required");
}

std::string input_file(const DataInput& d) { return d.data.empty() ? d.covid : d.data; }

PipelineOptions pipeline_options(const FitSettings& f, const Common& c) {
  PipelineOptions o;
  o.degree = f.degree;
  o.window = f.window;
  o.likelihood.family = parse_family(f.family);
  o.likelihood.steps_k = f.steps;
  o.likelihood.mc_paths_B = f.mc_paths;
  o.likelihood.seed = derive_seed(c.seed, 11);
  o.likelihood.workers = c.workers;
  o.selection.max_knots = f.max_knots;
  o.selection.fit.multistart = f.multistart;
  o.selection.fit.restarts = f.restarts;
  o.selection.fit.multistart_seed = derive_seed(c.seed, 12);
  return o;
}

// --- run bookkeeping --------------------------------------------------------

// Resolved option values of a subcommand (flags, config file or defaults).
// `out`, `config` and `workers` are left out: they do not change numbers.
std::map<std::string, std::string> resolved(const CLI::App* sub) {
  std::map<std::string, std::string> m;
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config" || name == "out" || name == "workers") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
    } else {
      value = opt->get_default_str();
      if (value.size() >= 2 && value.front() == '[' && value.back() == ']')
        value = value.substr(1, value.size() - 2);
    }
    if (value.empty()) continue;
    m[name] = value;
  }
  return m;
}

class Run {
 public:
  Run(std::string command, const Common& common, const CLI::App* sub)
      : command_(std::move(command)), out_(common.out), stage_(out_ / ".staging"), config_(resolved(sub)) {
    fs::remove_all(stage_);
    fs::create_directories(stage_);
  }

  fs::path file(const std::string& name) const { return stage_ / name; }

  void write(const std::string& name, const std::string& contents) const {
    io::write_text(file(name), contents);
  }
  void write_json(const std::string& name, const json& j) const { write(name, j.dump(2) + "\n"); }

  void input(const std::string& path) {
    if (path.empty()) return;
    inputs_[fs::path(path).filename().string()] = hex64(fnv1a_file(path));
  }

  void finish(bool ok) {
    json cfg = json::object();
    for (const auto& [k, v] : config_) cfg[k] = v;
    json manifest{{"program", "sirspline"},
                  {"version", SIRSPLINE_VERSION},
                  {"command", command_},
                  {"status", ok ? "ok" : "failed"},
                  {"config", cfg},
                  {"inputs_fnv1a", inputs_}};
    write_json("manifest.json", manifest);
    std::ostringstream ini;
    ini << "# sirspline " << command_ << " --config run.ini reproduces this run\n";
    for (const auto& [k, v] : config_) ini << k << " = " << quote(v) << "\n";
    write("run.ini", ini.str());

    const fs::path dest = ok ? out_ : out_ / "quarantine";
    if (!ok) fs::remove_all(dest);
    fs::create_directories(dest);
    for (const auto& entry : fs::directory_iterator(stage_)) {
      const fs::path target = dest / entry.path().filename();
      fs::remove_all(target);
      fs::rename(entry.path(), target);
    }
    fs::remove_all(stage_);
  }

 private:
  static std::string quote(const std::string& v) {
    if (v.find_first_of(" ,#=\"") == std::string::npos) return v;
    if (v.find(',') != std::string::npos && v.find('"') == std::string::npos) {
      // lists go out as arrays so the config reader splits them again
      std::string arr = "[";
      std::stringstream ss(v);
      std::string item;
      bool first = true;
      while (std::getline(ss, item, ',')) {
        arr += (first ? "" : ",") + item;
        first = false;
      }
      return arr + "]";
    }
    return "\"" + v + "\"";
  }

  std::string command_;
  fs::path out_;
  fs::path stage_;
  std::map<std::string, std::string> config_;
  std::map<std::string, std::string> inputs_;
};

template <class F>
int guarded(Run& run, F&& body) {
  try {
    body();
    run.finish(true);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    try {
      run.write("error.txt", std::string(e.what()) + "\n");
      run.finish(false);
    } catch (const std::exception& e2) {
      std::cerr << "error: could not quarantine outputs: " << e2.what() << "\n";
    }
    return 1;
  }
}

// --- writers -----------------------------------------------------------------

std::string path_csv(const EpidemicPath& p) {
  std::ostringstream os;
  io::write_path_csv(os, p);
  return os.str();
}

std::string series_csv(const RateSeries& s) {
  std::ostringstream os;
  io::write_rate_series_csv(os, s);
  return os.str();
}

std::string feature_csv(const FeatureCurve& c) {
  std::ostringstream os;
  io::write_feature_curve_csv(os, c);
  return os.str();
}

std::string beta_csv(const ParameterVector& theta, const std::vector<double>& grid) {
  std::ostringstream os;
  os << "time,beta,R0\n";
  const auto r0 = r0_curve(theta, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    os << io::format_double(grid[i]) << ',' << io::format_double(theta.beta(grid[i])) << ','
       << io::format_double(r0[i]) << '\n';
  return os.str();
}

std::string trace_csv(const SelectionResult& sel) {
  std::ostringstream os;
  os << "num_knots,status,loglik,bic,converged,evaluations,uniform_fallback,knots\n";
  for (const auto& s : sel.trace) {
    std::string knots;
    for (std::size_t i = 0; i < s.knots.size(); ++i) knots += (i ? " " : "") + io::format_double(s.knots[i]);
    os << s.num_knots << ',' << (s.failed ? "failed" : "ok") << ','
       << (s.failed ? "" : io::format_double(s.loglik)) << ','
       << (s.failed ? "" : io::format_double(s.bic)) << ',' << (s.converged ? 1 : 0) << ','
       << s.evaluations << ',' << (s.uniform_fallback ? 1 : 0) << ',' << knots << '\n';
  }
  return os.str();
}

struct FitOutcome {
  FitResult fit;
  std::optional<PipelineResult> pipeline;
};

FitOutcome fit_and_write(const Run& run, const EpidemicPath& path, const FitSettings& f,
                         const Common& c) {
  const PipelineOptions opts = pipeline_options(f, c);
  FitOutcome out;
  json info;
  if (!f.knots.empty()) {
    out.fit = fit_with_knots(path, f.knots, opts);
    run.write("rates.csv", series_csv(moving_average_rates(path, f.window)));
    info["selection"] = "fixed";
  } else {
    out.pipeline = run_pipeline(path, opts);
    out.fit = out.pipeline->fit();
    run.write("rates.csv", series_csv(out.pipeline->series));
    run.write("feature.csv", feature_csv(out.pipeline->curve));
    run.write("bic_trace.csv", trace_csv(out.pipeline->selection));
    info["selection"] = "forward-bic";
    info["num_knots"] = out.pipeline->selection.num_knots;
  }
  info["fit"] = io::to_json(out.fit);
  info["family"] = f.family;
  info["steps"] = f.steps;
  info["transitions"] = path.size() - 1;
  run.write_json("fit.json", info);
  run.write("beta.csv", beta_csv(out.fit.theta_hat, path.times));
  return out;
}

// --- commands ------------------------------------------------------------------

struct SimulateArgs {
  Common common;
  int scenario = 1;
  std::int64_t population = 10000;
  double infected_fraction = 0.01;
  int days = 70;
  double gamma = 0.1;
  std::string simulator = "exact";
};

int cmd_simulate(const CLI::App* sub, const SimulateArgs& a) {
  Run run("simulate", a.common, sub);
  return guarded(run, [&] {
    const TruthFunction truth = TruthFunction::scenario(a.scenario);
    const std::int64_t infected =
        static_cast<std::int64_t>(std::llround(a.infected_fraction * static_cast<double>(a.population)));
    if (infected < 1 || infected >= a.population) throw ArgumentError("initial infected count out of range");
    const CountState init{a.population - infected, infected, a.population};
    const std::vector<double> grid = uniform_grid(0.0, a.days, static_cast<std::size_t>(a.days));
    EpidemicPath observed;
    if (a.simulator == "exact") {
      observed = sample_path_at(simulate_exact(truth.rates(a.gamma), init, a.days, a.common.seed), grid);
    } else {
      observed = simulate_tau_leap(truth.rates(a.gamma), init, grid, a.common.seed);
    }
    run.write("path.csv", path_csv(observed));
    std::ostringstream os;
    os << "time,beta\n";
    for (double t : grid) os << io::format_double(t) << ',' << io::format_double(truth(t)) << '\n';
    run.write("truth.csv", os.str());
  });
}

struct RatesArgs {
  Common common;
  DataInput data;
  int window = 4;
  int degree = 0;
};

int cmd_rates(const CLI::App* sub, const RatesArgs& a) {
  Run run("rates", a.common, sub);
  run.input(input_file(a.data));
  return guarded(run, [&] {
    const EpidemicPath path = load_data(a.data);
    const RateSeries series = moving_average_rates(path, a.window);
    run.write("rates.csv", series_csv(series));
    run.write("feature.csv", feature_csv(feature_curve_from_series(series, a.degree)));
    const auto ladder = finite_difference_ladder(series, a.degree + 1);
    run.write("derivative.csv", series_csv(ladder.back()));
  });
}

struct FitArgs {
  Common common;
  DataInput data;
  FitSettings fit;
};

int cmd_fit(const CLI::App* sub, const FitArgs& a) {
  Run run("fit", a.common, sub);
  run.input(input_file(a.data));
  return guarded(run, [&] {
    const EpidemicPath path = load_data(a.data);
    fit_and_write(run, path, a.fit, a.common);
  });
}

struct BootstrapArgs {
  Common common;
  DataInput data;
  FitSettings fit;
  std::size_t replicates = 200;
  double alpha = 0.05;
  std::string simulator = "tau-leap";
  bool save_curves = false;
};

int cmd_bootstrap(const CLI::App* sub, const BootstrapArgs& a) {
  Run run("bootstrap", a.common, sub);
  run.input(input_file(a.data));
  return guarded(run, [&] {
    const EpidemicPath path = load_data(a.data);
    const FitOutcome fitted = fit_and_write(run, path, a.fit, a.common);
    const PipelineOptions popts = pipeline_options(a.fit, a.common);
    BootstrapOptions bopts;
    bopts.replicates = a.replicates;
    bopts.seed = derive_seed(a.common.seed, 21);
    bopts.simulator = a.simulator == "exact" ? BootstrapSimulator::exact : BootstrapSimulator::tau_leap;
    bopts.workers = a.common.workers;
    bopts.fit = popts.selection.fit;
    const BootstrapEnsemble ens = run_bootstrap(fitted.fit.theta_hat, path, popts.likelihood, bopts);
    if (ens.size() < 2) throw SelectionError("bootstrap produced fewer than 2 usable curves");

    json bands = json::array();
    for (IntervalMethod m : {IntervalMethod::pivotal, IntervalMethod::normal, IntervalMethod::percentile})
      for (bool bc : {false, true})
        for (Smoothing sm : {Smoothing::none, Smoothing::weighted, Smoothing::sample, Smoothing::minmax}) {
          const ConfidenceBand b = make_band(ens, m, 1.0 - a.alpha, bc, sm);
          const std::string stem =
              "band_" + to_string(m) + (bc ? "_bc" : "") + "_" + to_string(sm);
          std::ostringstream os;
          io::write_band_csv(os, b);
          run.write(stem + ".csv", os.str());
          run.write_json(stem + ".json", io::band_metadata(b));
          bands.push_back(stem);
        }
    if (a.save_curves) {
      std::ostringstream os;
      os << "replicate";
      for (double t : ens.times) os << ",t" << io::format_double(t);
      os << '\n';
      for (std::size_t b = 0; b < ens.size(); ++b) {
        os << b;
        for (double v : ens.curves[b]) os << ',' << io::format_double(v);
        os << '\n';
      }
      run.write("curves.csv", os.str());
    }
    run.write_json("bootstrap.json", json{{"requested", ens.requested},
                                          {"accepted", ens.size()},
                                          {"attempts", ens.attempts},
                                          {"discarded_extinct", ens.discarded},
                                          {"failed_fits", ens.failed_fits},
                                          {"shortfall", ens.shortfall},
                                          {"level", 1.0 - a.alpha},
                                          {"bands", bands}});
    if (ens.shortfall)
      std::cerr << "warning: only " << ens.size() << " of " << ens.requested
                << " bootstrap replicates were usable\n";
  });
}

struct SimstudyArgs {
  Common common;
  std::vector<int> scenarios{1};
  std::size_t replicates = 20;
  std::int64_t population = 10000;
  double infected_fraction = 0.01;
  int days = 70;
  double gamma = 0.1;
  int window = 4;
  int max_knots = 10;
  std::vector<int> degrees{0, 3};
  std::vector<std::string> families{"tau-leap", "diffusion"};
  std::size_t bootstrap = 0;
  double alpha = 0.05;
};

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return sample_quantile(std::move(v), 0.5);
}

int cmd_simstudy(const CLI::App* sub, const SimstudyArgs& a) {
  Run run("simstudy", a.common, sub);
  return guarded(run, [&] {
    StudySettings st;
    st.population = a.population;
    st.infected_fraction = a.infected_fraction;
    st.days = a.days;
    st.gamma = a.gamma;
    st.window = a.window;
    st.max_knots = a.max_knots;
    st.degrees = a.degrees;
    st.families.clear();
    for (const auto& f : a.families) st.families.push_back(parse_family(f));
    st.bootstrap_replicates = a.bootstrap;
    st.level = 1.0 - a.alpha;
    for (int s : a.scenarios) TruthFunction::scenario(s);  // reject unknown ids before any work

    struct Job {
      int scenario;
      std::size_t replicate;
    };
    std::vector<Job> jobs;
    for (int s : a.scenarios)
      for (std::size_t r = 0; r < a.replicates; ++r) jobs.push_back({s, r});
    std::vector<ReplicateResult> results(jobs.size());
    parallel_for(jobs.size(), a.common.workers, [&](std::size_t i) {
      results[i] = run_replicate(jobs[i].scenario, jobs[i].replicate, a.common.seed, st);
    });

    // single collector, job order
    std::ostringstream imse_csv, failures;
    imse_csv << "scenario,replicate,degree,family,status,num_knots,bic,imse,redraws\n";
    failures << "scenario,replicate,stage,message\n";
    auto clean = [](std::string s) {
      std::replace(s.begin(), s.end(), ',', ';');
      std::replace(s.begin(), s.end(), '\n', ' ');
      return s;
    };
    std::map<std::string, std::vector<double>> imse_by_cell;
    std::map<std::string, std::size_t> failures_by_stage;
    // coverage accumulators keyed by scenario/degree/method/bc/smoothing
    struct Cov {
      std::vector<double> hits;
      std::size_t n = 0;
    };
    std::map<std::tuple<int, int, int, int, int>, Cov> cov;
    std::vector<double> grid = uniform_grid(0.0, a.days, static_cast<std::size_t>(a.days));

    for (const ReplicateResult& r : results) {
      if (!r.simulated) {
        failures << r.scenario << ',' << r.replicate << ",simulate," << clean(r.error) << '\n';
        ++failures_by_stage["simulate"];
        continue;
      }
      for (const FitRecord& f : r.fits) {
        imse_csv << r.scenario << ',' << r.replicate << ',' << f.degree << ',' << to_string(f.family) << ','
                 << (f.ok ? "ok" : "failed") << ',' << f.num_knots << ','
                 << (f.ok ? io::format_double(f.bic) : "") << ','
                 << (f.ok ? io::format_double(f.imse) : "") << ',' << r.redraws << '\n';
        if (f.ok) {
          imse_by_cell["scenario" + std::to_string(r.scenario) + "/d" + std::to_string(f.degree) + "/" +
                       to_string(f.family)]
              .push_back(f.imse);
        } else {
          failures << r.scenario << ',' << r.replicate << ",fit d=" << f.degree << ' ' << to_string(f.family)
                   << ',' << clean(f.error) << '\n';
          ++failures_by_stage["fit"];
        }
      }
      for (const auto& e : r.bootstrap_errors) {
        failures << r.scenario << ',' << r.replicate << ",bootstrap," << clean(e) << '\n';
        ++failures_by_stage["bootstrap"];
      }
      const TruthFunction truth = TruthFunction::scenario(r.scenario);
      for (const BandRecord& b : r.bands) {
        Cov& c = cov[{r.scenario, b.degree, static_cast<int>(b.method), b.bias_corrected ? 1 : 0,
                      static_cast<int>(b.smoothing)}];
        if (c.hits.empty()) c.hits.assign(b.lower.size(), 0.0);
        for (std::size_t i = 0; i < b.lower.size(); ++i) {
          const double v = truth(r.data.times[i]);
          if (b.lower[i] <= v && v <= b.upper[i]) c.hits[i] += 1.0;
        }
        ++c.n;
      }
    }
    run.write("imse.csv", imse_csv.str());
    run.write("failures.csv", failures.str());

    if (a.bootstrap > 0) {
      std::ostringstream os;
      os << "scenario,degree,method,bias_corrected,smoothing,time,coverage,replicates\n";
      for (const auto& [key, c] : cov) {
        const auto [s, d, m, bc, sm] = key;
        for (std::size_t i = 0; i < c.hits.size(); ++i)
          os << s << ',' << d << ',' << to_string(static_cast<IntervalMethod>(m)) << ',' << bc << ','
             << to_string(static_cast<Smoothing>(sm)) << ',' << io::format_double(grid[i]) << ','
             << io::format_double(c.hits[i] / static_cast<double>(c.n)) << ',' << c.n << '\n';
      }
      run.write("coverage.csv", os.str());
    }

    json medians = json::object();
    for (const auto& [cell, v] : imse_by_cell)
      medians[cell] = json{{"median_imse", median(v)}, {"fits", v.size()}};
    std::size_t redraws = 0;
    for (const auto& r : results) redraws += static_cast<std::size_t>(r.redraws);
    run.write_json("summary.json", json{{"replicates", a.replicates},
                                        {"scenarios", a.scenarios},
                                        {"imse", medians},
                                        {"failures", failures_by_stage},
                                        {"extinct_redraws", redraws}});
  });
}

// Flat config: `key = value` lines, '#' comments, lists as a,b or [a,b].
// Each key not already given on the command line becomes `--key=value`.
std::vector<std::string> expand_config(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (config.empty()) return args;
  std::ifstream in(config);
  if (!in) throw ArgumentError("cannot open config file " + config);
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ArgumentError(config + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && ((value.front() == '[' && value.back() == ']') ||
                              (value.front() == '"' && value.back() == '"')))
      value = value.substr(1, value.size() - 2);
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (!given) args.push_back(flag + "=" + value);
  }
  return args;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Spline estimation of a time-varying SIR infection rate", "sirspline"};
  app.set_version_flag("--version", SIRSPLINE_VERSION);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "simulate daily counts from a built-in scenario");
  add_common(s_sim, sim.common);
  s_sim->add_option("--scenario", sim.scenario, "scenario id 1..5")->check(CLI::Range(1, 5))->capture_default_str();
  s_sim->add_option("--population", sim.population, "N")->check(CLI::PositiveNumber)->capture_default_str();
  s_sim->add_option("--infected-fraction", sim.infected_fraction, "initial I/N")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  s_sim->add_option("--days", sim.days, "last observation day")->check(CLI::PositiveNumber)->capture_default_str();
  s_sim->add_option("--gamma", sim.gamma, "recovery rate")->check(CLI::PositiveNumber)->capture_default_str();
  s_sim->add_option("--simulator", sim.simulator, "exact or tau-leap")
      ->check(CLI::IsMember({"exact", "tau-leap"}))
      ->capture_default_str();

  RatesArgs rates;
  auto* s_rates = app.add_subcommand("rates", "moving-average rate series and knot feature curve");
  add_common(s_rates, rates.common);
  add_data(s_rates, rates.data);
  s_rates->add_option("--window", rates.window, "moving-average window")->check(CLI::Range(2, 1000))->capture_default_str();
  s_rates->add_option("--degree", rates.degree, "spline degree")->check(CLI::Range(0, 5))->capture_default_str();

  FitArgs fit;
  auto* s_fit = app.add_subcommand("fit", "select knots by BIC and fit beta(t), gamma");
  add_common(s_fit, fit.common);
  add_data(s_fit, fit.data);
  add_fit(s_fit, fit.fit);

  BootstrapArgs boot;
  auto* s_boot = app.add_subcommand("bootstrap", "fit, then parametric-bootstrap confidence bands");
  add_common(s_boot, boot.common);
  add_data(s_boot, boot.data);
  add_fit(s_boot, boot.fit);
  s_boot->add_option("--replicates", boot.replicates, "bootstrap replicates")->check(CLI::PositiveNumber)->capture_default_str();
  s_boot->add_option("--alpha", boot.alpha, "1 - confidence level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  s_boot->add_option("--simulator", boot.simulator, "tau-leap or exact")
      ->check(CLI::IsMember({"tau-leap", "exact"}))
      ->capture_default_str();
  s_boot->add_flag("--save-curves", boot.save_curves, "also write every refitted curve");

  SimstudyArgs study;
  auto* s_study = app.add_subcommand("simstudy", "replicated simulate/fit/IMSE/coverage study");
  add_common(s_study, study.common);
  s_study->add_option("--scenarios", study.scenarios, "scenario ids")->delimiter(',')->check(CLI::Range(1, 5))->capture_default_str();
  s_study->add_option("--replicates", study.replicates, "replicates per scenario")->check(CLI::PositiveNumber)->capture_default_str();
  s_study->add_option("--population", study.population, "N")->check(CLI::PositiveNumber)->capture_default_str();
  s_study->add_option("--infected-fraction", study.infected_fraction, "initial I/N")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  s_study->add_option("--days", study.days, "last observation day")->check(CLI::PositiveNumber)->capture_default_str();
  s_study->add_option("--gamma", study.gamma, "recovery rate")->check(CLI::PositiveNumber)->capture_default_str();
  s_study->add_option("--window", study.window, "moving-average window")->check(CLI::Range(2, 1000))->capture_default_str();
  s_study->add_option("--max-knots", study.max_knots, "largest K tried")->check(CLI::NonNegativeNumber)->capture_default_str();
  s_study->add_option("--degrees", study.degrees, "spline degrees")->delimiter(',')->check(CLI::Range(0, 5))->capture_default_str();
  s_study->add_option("--families", study.families, "likelihood families")
      ->delimiter(',')
      ->check(CLI::IsMember({"tau-leap", "diffusion"}))
      ->capture_default_str();
  s_study->add_option("--bootstrap", study.bootstrap, "bootstrap replicates per fit (0 = no coverage)")
      ->capture_default_str();
  s_study->add_option("--alpha", study.alpha, "1 - confidence level")->check(CLI::Range(0.0, 1.0))->capture_default_str();

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (boot.alpha <= 0.0 || boot.alpha >= 1.0 || study.alpha <= 0.0 || study.alpha >= 1.0) {
    std::cerr << "error: --alpha must lie strictly between 0 and 1\n";
    return 2;
  }

  try {
    if (*s_sim) return cmd_simulate(s_sim, sim);
    if (*s_rates) return cmd_rates(s_rates, rates);
    if (*s_fit) return cmd_fit(s_fit, fit);
    if (*s_boot) return cmd_bootstrap(s_boot, boot);
    if (*s_study) return cmd_simstudy(s_study, study);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace sirspline::cli
