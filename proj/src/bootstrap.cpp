#include "sirspline/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "sirspline/error.hpp"
#include "sirspline/normal.hpp"
#include "sirspline/parallel.hpp"
#include "sirspline/rng.hpp"

namespace sirspline {

namespace {

bool survives(const EpidemicPath& path) {
  return std::all_of(path.states.begin(), path.states.end(),
                     [](const CountState& x) { return x.i > 0; });
}

}  // namespace

BootstrapEnsemble run_bootstrap(const ParameterVector& theta_hat, const EpidemicPath& templ,
                                const LikelihoodConfig& config,
                                const BootstrapOptions& options) {
  if (options.replicates < 1) throw ArgumentError("bootstrap needs at least one replicate");
  if (!(options.max_attempts_factor >= 1.0))
    throw ArgumentError("max_attempts_factor must be >= 1");
  templ.validate();
  if (templ.size() < 2) throw ArgumentError("template path needs at least 2 observations");

  BootstrapEnsemble ens;
  ens.times = templ.times;
  ens.estimate = evaluate(theta_hat.spline, templ.times);
  ens.requested = options.replicates;

  const KnotVector& basis = theta_hat.spline.knots();
  const RatePair rates = RatePair::from_spline(theta_hat.spline, theta_hat.gamma);
  const CountState init = templ.states.front();
  const double t0 = templ.times.front();
  std::vector<double> grid = templ.times;

  const std::size_t max_attempts = static_cast<std::size_t>(
      std::ceil(options.max_attempts_factor * static_cast<double>(options.replicates)));

  enum class Outcome { discarded, failed, kept };
  struct Attempt {
    Outcome outcome = Outcome::discarded;
    std::vector<double> curve;
  };

  auto run_attempt = [&](std::size_t a) {
    Attempt out;
    const std::uint64_t key = derive_seed(options.seed, a);
    EpidemicPath sim;
    if (options.simulator == BootstrapSimulator::tau_leap) {
      sim = simulate_tau_leap(rates, init, grid, key);
    } else {
      // The exact simulator runs on [0, T]; shift so the template starts at 0.
      std::vector<double> rel(grid.size());
      for (std::size_t k = 0; k < grid.size(); ++k) rel[k] = grid[k] - t0;
      const RatePair shifted = RatePair::from_spline(theta_hat.spline.shifted(-t0), theta_hat.gamma);
      sim = sample_path_at(simulate_exact(shifted, init, rel.back(), key), rel);
      sim.times = grid;
      sim.horizon = grid.back();
    }
    if (!survives(sim)) return out;
    try {
      const FitResult fit = fit_mle(sim, basis, config, theta_hat, options.fit);
      out.curve = evaluate(fit.theta_hat.spline, grid);
      out.outcome = Outcome::kept;
    } catch (const Error&) {
      out.outcome = Outcome::failed;
    }
    return out;
  };

  // Batches of attempts run in parallel; survivors are accepted in index order.
  std::size_t next = 0;
  while (ens.curves.size() < options.replicates && next < max_attempts) {
    const std::size_t needed = options.replicates - ens.curves.size();
    const std::size_t batch = std::min(max_attempts - next, std::max<std::size_t>(needed, options.workers));
    std::vector<Attempt> results(batch);
    parallel_for(batch, options.workers, [&](std::size_t i) { results[i] = run_attempt(next + i); });
    for (std::size_t i = 0; i < batch && ens.curves.size() < options.replicates; ++i) {
      ++ens.attempts;
      switch (results[i].outcome) {
        case Outcome::discarded: ++ens.discarded; break;
        case Outcome::failed: ++ens.failed_fits; break;
        case Outcome::kept: ens.curves.push_back(std::move(results[i].curve)); break;
      }
    }
    next += batch;
  }
  ens.shortfall = ens.curves.size() < options.replicates;
  return ens;
}

std::string to_string(IntervalMethod method) {
  switch (method) {
    case IntervalMethod::pivotal: return "pivotal";
    case IntervalMethod::normal: return "normal";
    case IntervalMethod::percentile: return "percentile";
  }
  return "?";
}

std::string to_string(Smoothing smoothing) {
  switch (smoothing) {
    case Smoothing::none: return "none";
    case Smoothing::weighted: return "weighted";
    case Smoothing::sample: return "sample";
    case Smoothing::minmax: return "minmax";
  }
  return "?";
}

IntervalMethod parse_interval_method(const std::string& name) {
  if (name == "pivotal") return IntervalMethod::pivotal;
  if (name == "normal") return IntervalMethod::normal;
  if (name == "percentile") return IntervalMethod::percentile;
  throw ArgumentError("unsupported interval method '" + name + "'");
}

Smoothing parse_smoothing(const std::string& name) {
  if (name == "none") return Smoothing::none;
  if (name == "weighted") return Smoothing::weighted;
  if (name == "sample") return Smoothing::sample;
  if (name == "minmax") return Smoothing::minmax;
  throw ArgumentError("unsupported smoothing '" + name + "'");
}

double sample_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ArgumentError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("quantile level must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<double> bootstrap_bias(const BootstrapEnsemble& ensemble) {
  if (ensemble.curves.empty()) throw ArgumentError("bootstrap ensemble is empty");
  std::vector<double> bias(ensemble.times.size(), 0.0);
  for (std::size_t t = 0; t < bias.size(); ++t) {
    double sum = 0.0;
    for (const auto& c : ensemble.curves) sum += c[t];
    bias[t] = sum / static_cast<double>(ensemble.curves.size()) - ensemble.estimate[t];
  }
  return bias;
}

namespace {

struct Interval {
  double point, lower, upper;
};

// One pointwise interval from a bootstrap sample, the estimate and the bias.
Interval interval_from(const std::vector<double>& sample, double estimate, double bias,
                       IntervalMethod method, double level, bool bias_corrected) {
  const double alpha = 1.0 - level;
  const double point = bias_corrected ? estimate - bias : estimate;
  switch (method) {
    case IntervalMethod::pivotal: {
      // Already bias-adjusted; the flag only moves the point estimate.
      return {point, 2.0 * estimate - sample_quantile(sample, 1.0 - alpha / 2.0),
              2.0 * estimate - sample_quantile(sample, alpha / 2.0)};
    }
    case IntervalMethod::normal: {
      // shifted by the first draw so a constant sample has sd exactly 0
      const double s0 = sample.front();
      double m = 0.0;
      for (double v : sample) m += v - s0;
      m /= static_cast<double>(sample.size());
      double ss = 0.0;
      for (double v : sample) ss += (v - s0 - m) * (v - s0 - m);
      const double sd = sample.size() > 1 ? std::sqrt(ss / static_cast<double>(sample.size() - 1)) : 0.0;
      const double z = normal::quantile(1.0 - alpha / 2.0);
      const double center = bias_corrected ? estimate - bias : estimate;
      return {point, center - z * sd, center + z * sd};
    }
    case IntervalMethod::percentile: {
      const double shift = bias_corrected ? 2.0 * bias : 0.0;
      return {point, sample_quantile(sample, alpha / 2.0) - shift,
              sample_quantile(sample, 1.0 - alpha / 2.0) - shift};
    }
  }
  throw ArgumentError("unsupported interval method");
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw ArgumentError("confidence level must be in (0, 1)");
}

void check_ensemble(const BootstrapEnsemble& ensemble, IntervalMethod method) {
  if (ensemble.curves.empty()) throw ArgumentError("bootstrap ensemble is empty");
  if (method != IntervalMethod::normal && ensemble.curves.size() < 2)
    throw ArgumentError("quantile intervals need at least 2 bootstrap curves");
}

}  // namespace

ConfidenceBand band(const BootstrapEnsemble& ensemble, IntervalMethod method, double level,
                    bool bias_corrected) {
  check_level(level);
  check_ensemble(ensemble, method);
  const std::vector<double> bias = bootstrap_bias(ensemble);
  ConfidenceBand out;
  out.times = ensemble.times;
  out.method = method;
  out.bias_corrected = bias_corrected;
  out.level = level;
  std::vector<double> sample(ensemble.curves.size());
  for (std::size_t t = 0; t < ensemble.times.size(); ++t) {
    for (std::size_t b = 0; b < sample.size(); ++b) sample[b] = ensemble.curves[b][t];
    const Interval iv =
        interval_from(sample, ensemble.estimate[t], bias[t], method, level, bias_corrected);
    out.point.push_back(iv.point);
    out.lower.push_back(iv.lower);
    out.upper.push_back(iv.upper);
  }
  return out;
}

ConfidenceBand smooth_weighted(const ConfidenceBand& in) {
  ConfidenceBand out = in;
  out.smoothing = Smoothing::weighted;
  const std::size_t n = in.times.size();
  for (std::size_t i = 0; i < n; ++i) {
    double wsum = 0.0, lsum = 0.0, usum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = normal::pdf(in.times[i] - in.times[j]);
      wsum += w;
      lsum += w * in.lower[j];
      usum += w * in.upper[j];
    }
    out.lower[i] = lsum / wsum;
    out.upper[i] = usum / wsum;
  }
  return out;
}

ConfidenceBand smooth_sample(const BootstrapEnsemble& ensemble, IntervalMethod method,
                             double level, bool bias_corrected) {
  check_level(level);
  check_ensemble(ensemble, method);
  const std::vector<double> bias = bootstrap_bias(ensemble);
  const std::size_t n = ensemble.times.size();
  ConfidenceBand out;
  out.times = ensemble.times;
  out.method = method;
  out.bias_corrected = bias_corrected;
  out.smoothing = Smoothing::sample;
  out.level = level;
  std::vector<double> pooled;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(i + 1, n - 1);
    pooled.clear();
    double pooled_bias = 0.0;
    for (std::size_t t = lo; t <= hi; ++t) {
      for (const auto& c : ensemble.curves) pooled.push_back(c[t]);
      pooled_bias += bias[t];
    }
    pooled_bias /= static_cast<double>(hi - lo + 1);
    const Interval iv =
        interval_from(pooled, ensemble.estimate[i], pooled_bias, method, level, bias_corrected);
    out.point.push_back(iv.point);
    out.lower.push_back(iv.lower);
    out.upper.push_back(iv.upper);
  }
  return out;
}

ConfidenceBand smooth_minmax(const ConfidenceBand& in) {
  ConfidenceBand out = in;
  out.smoothing = Smoothing::minmax;
  const std::size_t n = in.times.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(i + 1, n - 1);
    out.lower[i] = *std::min_element(in.lower.begin() + lo, in.lower.begin() + hi + 1);
    out.upper[i] = *std::max_element(in.upper.begin() + lo, in.upper.begin() + hi + 1);
  }
  return out;
}

ConfidenceBand make_band(const BootstrapEnsemble& ensemble, IntervalMethod method, double level,
                         bool bias_corrected, Smoothing smoothing) {
  switch (smoothing) {
    case Smoothing::none: return band(ensemble, method, level, bias_corrected);
    case Smoothing::weighted:
      return smooth_weighted(band(ensemble, method, level, bias_corrected));
    case Smoothing::sample: return smooth_sample(ensemble, method, level, bias_corrected);
    case Smoothing::minmax: return smooth_minmax(band(ensemble, method, level, bias_corrected));
  }
  throw ArgumentError("unsupported smoothing");
}

}  // namespace sirspline
