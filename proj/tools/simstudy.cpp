#include "simstudy.hpp"

#include <cmath>

#include "sirspline/error.hpp"
#include "sirspline/rng.hpp"

namespace sirspline::cli {

EpidemicPath simulate_study_data(const TruthFunction& truth, const StudySettings& settings,
                                 std::uint64_t seed, int& redraws) {
  const std::int64_t infected = static_cast<std::int64_t>(
      std::llround(settings.infected_fraction * static_cast<double>(settings.population)));
  const CountState init{settings.population - infected, infected, settings.population};
  const std::vector<double> grid = uniform_grid(0.0, settings.days, settings.days);
  const RatePair rates = truth.rates(settings.gamma);
  for (redraws = 0; redraws <= settings.max_redraws; ++redraws) {
    const EpidemicPath exact =
        simulate_exact(rates, init, settings.days, derive_seed(seed, redraws));
    EpidemicPath observed = sample_path_at(exact, grid);
    bool alive = true;
    for (const auto& x : observed.states) alive = alive && x.i > 0;
    if (alive) return observed;
  }
  throw SelectionError("every simulated epidemic died out before the last observation");
}

ReplicateResult run_replicate(int scenario, std::size_t replicate, std::uint64_t master_seed,
                              const StudySettings& settings) {
  ReplicateResult out;
  out.scenario = scenario;
  out.replicate = replicate;
  const TruthFunction truth = TruthFunction::scenario(scenario);
  const std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(scenario), replicate);
  try {
    out.data = simulate_study_data(truth, settings, seed, out.redraws);
    out.simulated = true;
  } catch (const Error& e) {
    out.error = e.what();
    return out;
  }

  for (int degree : settings.degrees) {
    for (LikelihoodFamily family : settings.families) {
      FitRecord rec;
      rec.degree = degree;
      rec.family = family;
      try {
        PipelineOptions opts;
        opts.degree = degree;
        opts.window = settings.window;
        opts.likelihood.family = family;
        opts.likelihood.seed = derive_seed(seed, 1000 + degree);
        opts.selection.max_knots = settings.max_knots;
        opts.selection.fit = settings.fit;
        const PipelineResult res = run_pipeline(out.data, opts);
        rec.num_knots = res.selection.num_knots;
        rec.bic = res.fit().bic;
        rec.beta_hat = evaluate(res.fit().theta_hat.spline, out.data.times);
        rec.imse = imse(rec.beta_hat, truth, out.data.times);
        rec.fit = res.fit();
        rec.ok = true;
      } catch (const Error& e) {
        rec.error = e.what();
      }
      out.fits.push_back(std::move(rec));
    }
  }

  if (settings.bootstrap_replicates == 0) return out;
  for (const FitRecord& rec : out.fits) {
    if (!rec.ok || rec.family != settings.bootstrap_family) continue;
    try {
      LikelihoodConfig config;
      config.family = rec.family;
      BootstrapOptions bopts;
      bopts.replicates = settings.bootstrap_replicates;
      bopts.seed = derive_seed(seed, 2000 + rec.degree);
      bopts.fit = settings.fit;
      const BootstrapEnsemble ens = run_bootstrap(rec.fit->theta_hat, out.data, config, bopts);
      if (ens.size() < 2) throw SelectionError("bootstrap produced fewer than 2 curves");
      for (IntervalMethod m : {IntervalMethod::pivotal, IntervalMethod::normal, IntervalMethod::percentile})
        for (bool bc : {false, true})
          for (Smoothing sm : {Smoothing::none, Smoothing::weighted, Smoothing::sample, Smoothing::minmax}) {
            const ConfidenceBand b = make_band(ens, m, settings.level, bc, sm);
            out.bands.push_back(BandRecord{rec.degree, m, bc, sm, b.lower, b.upper});
          }
    } catch (const Error& e) {
      out.bootstrap_errors.push_back("degree " + std::to_string(rec.degree) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace sirspline::cli
