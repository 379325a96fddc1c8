#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sirspline/estimator.hpp"

namespace sirspline {

enum class BootstrapSimulator { tau_leap, exact };

struct BootstrapOptions {
  std::size_t replicates = 200;
  double max_attempts_factor = 10.0;
  std::uint64_t seed = 1;
  BootstrapSimulator simulator = BootstrapSimulator::tau_leap;
  unsigned workers = 1;
  FitOptions fit;
};

// Refitted curves beta*_b(t) on the observation grid and the estimate
// beta_hat(t) on the same grid.
struct BootstrapEnsemble {
  std::vector<double> times;
  std::vector<double> estimate;
  std::vector<std::vector<double>> curves;
  std::size_t attempts = 0;
  std::size_t discarded = 0;    // simulated paths with I = 0 before t_M
  std::size_t failed_fits = 0;  // survivors whose refit threw
  std::size_t requested = 0;
  bool shortfall = false;

  std::size_t size() const noexcept { return curves.size(); }
};

// Parametric bootstrap: simulate under theta_hat from the template's initial
// state on its grid, keep paths with I > 0 at every observation, refit each
// on the same basis. Attempt a is keyed by (seed, a); survivors are taken in
// attempt order so the ensemble does not depend on the worker count.
BootstrapEnsemble run_bootstrap(const ParameterVector& theta_hat, const EpidemicPath& templ,
                                const LikelihoodConfig& config,
                                const BootstrapOptions& options = {});

enum class IntervalMethod { pivotal, normal, percentile };
enum class Smoothing { none, weighted, sample, minmax };

std::string to_string(IntervalMethod method);
std::string to_string(Smoothing smoothing);
IntervalMethod parse_interval_method(const std::string& name);
Smoothing parse_smoothing(const std::string& name);

struct ConfidenceBand {
  std::vector<double> times;
  std::vector<double> point;
  std::vector<double> lower;
  std::vector<double> upper;
  IntervalMethod method = IntervalMethod::percentile;
  bool bias_corrected = false;
  Smoothing smoothing = Smoothing::none;
  double level = 0.95;
};

// Linear-interpolation sample quantile (the R type-7 rule).
double sample_quantile(std::vector<double> values, double p);

// mean_b beta*_b(t) - beta_hat(t) at each time.
std::vector<double> bootstrap_bias(const BootstrapEnsemble& ensemble);

ConfidenceBand band(const BootstrapEnsemble& ensemble, IntervalMethod method, double level,
                    bool bias_corrected);

// Normal-kernel (unit bandwidth) weighted average of the bounds over all times.
ConfidenceBand smooth_weighted(const ConfidenceBand& in);

// Interval at t_i from the pooled replicate values at t_{i-1}, t_i, t_{i+1}.
ConfidenceBand smooth_sample(const BootstrapEnsemble& ensemble, IntervalMethod method,
                             double level, bool bias_corrected);

// Min of the neighbouring lower bounds, max of the neighbouring upper bounds.
ConfidenceBand smooth_minmax(const ConfidenceBand& in);

// Convenience: band with the given smoothing applied.
ConfidenceBand make_band(const BootstrapEnsemble& ensemble, IntervalMethod method, double level,
                         bool bias_corrected, Smoothing smoothing);

}  // namespace sirspline
