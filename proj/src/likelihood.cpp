#include "sirspline/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "sirspline/error.hpp"
#include "sirspline/normal.hpp"
#include "sirspline/parallel.hpp"
#include "sirspline/rng.hpp"

namespace sirspline {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

bool ParameterVector::feasible() const noexcept {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) return false;
  for (double c : spline.coefficients())
    if (!(c >= 0.0) || !std::isfinite(c)) return false;
  return true;
}

std::string to_string(LikelihoodFamily family) {
  return family == LikelihoodFamily::tau_leap ? "tau-leap" : "diffusion";
}

LikelihoodFamily parse_family(const std::string& name) {
  if (name == "tau-leap" || name == "tauleap" || name == "tau_leap")
    return LikelihoodFamily::tau_leap;
  if (name == "diffusion") return LikelihoodFamily::diffusion;
  throw ArgumentError("unknown likelihood family '" + name + "'");
}

void LikelihoodConfig::validate() const {
  if (steps_k < 1) throw ArgumentError("steps_k must be >= 1");
  if (mc_paths_B < 1) throw ArgumentError("mc_paths_B must be >= 1");
}

DriftDiffusion drift_and_diffusion(double t, const ProportionState& z,
                                   const ParameterVector& theta, double n) {
  const SdeCoefficients c = sde_coefficients(theta.beta(t), theta.gamma, z, n);
  return {c.drift, c.sigma11(), c.sigma12(), c.sigma22()};
}

TransitionMoments moments_from(std::array<double, 2> mu, double sigma11, double sigma12,
                               double sigma22, const ProportionState& to) {
  TransitionMoments m;
  m.mu = mu;
  m.sigma11 = sigma11;
  m.sigma12 = sigma12;
  m.sigma22 = sigma22;
  m.mu1_star = sigma22 > 0 ? mu[0] + sigma12 / sigma22 * (to.j - mu[1]) : mu[0];
  m.mu2_star = sigma11 > 0 ? mu[1] + sigma12 / sigma11 * (to.s - mu[0]) : mu[1];
  m.var1_star = sigma22 > 0 ? std::max(sigma11 - sigma12 * sigma12 / sigma22, 0.0) : sigma11;
  m.var2_star = sigma11 > 0 ? std::max(sigma22 - sigma12 * sigma12 / sigma11, 0.0) : sigma22;
  return m;
}

TransitionMoments transition_moments(const ProportionState& from, const ProportionState& to,
                                     double dt, double beta, double gamma, double n) {
  const SdeCoefficients c = sde_coefficients(beta, gamma, from, n);
  TransitionMoments m = moments_from({from.s + c.drift[0] * dt, from.j + c.drift[1] * dt},
                                     c.sigma11() * dt, c.sigma12() * dt, c.sigma22() * dt, to);
  // Conditional variances straight from the factor L, free of cancellation:
  // Var[j | s] = g j dt / n and Var[s | j] = a^2 c^2 / (a^2 + c^2) dt.
  const double a2 = c.l11 * c.l11;
  const double c2 = c.l22 * c.l22;
  m.var2_star = c2 * dt;
  m.var1_star = (a2 + c2) > 0.0 ? a2 * c2 / (a2 + c2) * dt : 0.0;
  return m;
}

CensorCase classify(const ProportionState& x) noexcept {
  const bool s_out = x.s <= 0.0 || x.s >= 1.0;
  const bool j_out = x.j <= 0.0 || x.j >= 1.0;
  if (s_out && j_out) return CensorCase::both_censored;
  if (s_out) return CensorCase::s_censored;
  if (j_out) return CensorCase::j_censored;
  return CensorCase::interior;
}

namespace {

normal::Interval censor_interval(double v) {
  return v <= 0.0 ? normal::Interval{-kInf, 0.0} : normal::Interval{1.0, kInf};
}

[[noreturn]] void degenerate(std::size_t transition, const char* what) {
  std::ostringstream os;
  os << "degenerate Gaussian transition " << transition << ": " << what;
  throw DegenerateTransitionError(os.str(), transition);
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

}  // namespace

double censored_log_density(const ProportionState& to, const TransitionMoments& m,
                            std::size_t transition) {
  switch (classify(to)) {
    case CensorCase::interior: {
      if (!positive(m.sigma11) || !positive(m.var2_star))
        degenerate(transition, "zero variance in interior density");
      // phi2(x) = phi(s | mu1, s11) phi(j | E[j|s], Var[j|s])
      return normal::log_pdf(to.s, m.mu[0], m.sigma11) +
             normal::log_pdf(to.j, m.mu2_star, m.var2_star);
    }
    case CensorCase::j_censored: {
      if (!positive(m.sigma11) || !positive(m.var2_star))
        degenerate(transition, "zero variance with j censored");
      const normal::Interval iv = censor_interval(to.j);
      return normal::log_pdf(to.s, m.mu[0], m.sigma11) +
             normal::log_interval_probability(iv.lo, iv.hi, m.mu2_star, m.var2_star);
    }
    case CensorCase::s_censored: {
      if (!positive(m.sigma22) || !positive(m.var1_star))
        degenerate(transition, "zero variance with s censored");
      const normal::Interval iv = censor_interval(to.s);
      return normal::log_pdf(to.j, m.mu[1], m.sigma22) +
             normal::log_interval_probability(iv.lo, iv.hi, m.mu1_star, m.var1_star);
    }
    case CensorCase::both_censored: {
      if (!positive(m.sigma11) || !positive(m.var2_star))
        degenerate(transition, "zero variance with both coordinates censored");
      const double p =
          normal::rectangle_probability(m.mu[0], m.mu[1], m.sigma11, m.sigma12, m.sigma22,
                                        censor_interval(to.s), censor_interval(to.j));
      return p > 0.0 ? std::log(p) : kNegInf;
    }
  }
  return kNegInf;
}

double poisson_log_pmf(std::int64_t count, double rate) {
  if (count < 0) return kNegInf;
  if (rate <= 0.0) return count == 0 ? 0.0 : kNegInf;
  const double k = static_cast<double>(count);
  return k * std::log(rate) - rate - std::lgamma(k + 1.0);
}

double tauleap_transition_log_pmf(const CountState& from, const CountState& to, double dt,
                                  double beta, double gamma) {
  const std::int64_t infections = from.s - to.s;
  const std::int64_t removals = (from.s + from.i) - (to.s + to.i);
  if (infections < 0 || removals < 0) return kNegInf;
  const double n = static_cast<double>(from.n);
  const double si = static_cast<double>(from.s) * static_cast<double>(from.i) / n;
  return poisson_log_pmf(infections, dt * beta * si) +
         poisson_log_pmf(removals, dt * gamma * static_cast<double>(from.i));
}

double diffusion_transition_log_density(const ProportionState& from, const ProportionState& to,
                                        double dt, double beta, double gamma, double n,
                                        std::size_t transition) {
  return censored_log_density(to, transition_moments(from, to, dt, beta, gamma, n), transition);
}

void validate_increments(const EpidemicPath& path) {
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const CountState& a = path.states[k];
    const CountState& b = path.states[k + 1];
    if (a.s - b.s < 0 || (a.s + a.i) - (b.s + b.i) < 0) {
      std::ostringstream os;
      os << "negative S or S+I decrement at transition " << k << " (t=" << path.times[k]
         << " -> " << path.times[k + 1] << ")";
      throw DataValidityError(os.str(), k);
    }
  }
}

namespace {

void require_transitions(const EpidemicPath& path) {
  if (path.size() < 2) throw ArgumentError("likelihood needs at least 2 observations");
}

}  // namespace

double tauleap_loglik_1step(const EpidemicPath& path, const ParameterVector& theta) {
  require_transitions(path);
  validate_increments(path);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double dt = path.times[k + 1] - path.times[k];
    total += tauleap_transition_log_pmf(path.states[k], path.states[k + 1], dt,
                                        theta.beta(path.times[k]), theta.gamma);
  }
  return total;
}

double diffusion_loglik_1step(const EpidemicPath& path, const ParameterVector& theta) {
  require_transitions(path);
  const double n = static_cast<double>(path.population);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double dt = path.times[k + 1] - path.times[k];
    total += diffusion_transition_log_density(ProportionState::from_counts(path.states[k]),
                                              ProportionState::from_counts(path.states[k + 1]),
                                              dt, theta.beta(path.times[k]), theta.gamma, n, k);
  }
  return total;
}

namespace {

// log(mean(exp(v))) over finite entries, counting -inf entries as zeros.
double log_mean_exp(const std::vector<double>& v) {
  double top = kNegInf;
  for (double x : v) top = std::max(top, x);
  if (top == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - top);
  return top + std::log(acc / static_cast<double>(v.size()));
}

double tauleap_subpath_log_pmf(const EpidemicPath& path, std::size_t k,
                               const ParameterVector& theta, int steps, std::uint64_t key,
                               bool& usable) {
  const double t0 = path.times[k];
  const double h = (path.times[k + 1] - t0) / steps;
  const double n = static_cast<double>(path.population);
  CountState x = path.states[k];
  RandomStream rng(key);
  for (int r = 0; r + 1 < steps; ++r) {
    if (x.i == 0) break;
    const double beta = theta.beta(t0 + r * h);
    const double si = static_cast<double>(x.s) * static_cast<double>(x.i) / n;
    const std::int64_t infections = std::min(rng.poisson(h * beta * si), x.s);
    const std::int64_t removals =
        std::min(rng.poisson(h * theta.gamma * static_cast<double>(x.i)), x.i);
    x.s -= infections;
    x.i += infections - removals;
  }
  // An absorbed sub-path still has a well-defined (usually zero) pmf.
  usable = x.i > 0;
  const double t_last = t0 + (steps - 1) * h;
  return tauleap_transition_log_pmf(x, path.states[k + 1], h, theta.beta(t_last), theta.gamma);
}

double diffusion_subpath_log_density(const EpidemicPath& path, std::size_t k,
                                     const ParameterVector& theta, int steps, std::uint64_t key,
                                     bool& usable) {
  const double t0 = path.times[k];
  const double h = (path.times[k + 1] - t0) / steps;
  const double n = static_cast<double>(path.population);
  const double sq = std::sqrt(h);
  ProportionState z = ProportionState::from_counts(path.states[k]);
  RandomStream rng(key);
  for (int r = 0; r + 1 < steps; ++r) {
    const SdeCoefficients c = sde_coefficients(theta.beta(t0 + r * h), theta.gamma, z, n);
    const double db1 = sq * rng.normal();
    const double db2 = sq * rng.normal();
    z.s += c.drift[0] * h + c.l11 * db1;
    z.j += c.drift[1] * h - c.l11 * db1 + c.l22 * db2;
  }
  const double t_last = t0 + (steps - 1) * h;
  const ProportionState to = ProportionState::from_counts(path.states[k + 1]);
  try {
    const double v =
        diffusion_transition_log_density(z, to, h, theta.beta(t_last), theta.gamma, n, k);
    usable = true;
    return v;
  } catch (const DegenerateTransitionError&) {
    usable = false;
    return kNegInf;
  }
}

}  // namespace

double multistep_transition_loglik(const EpidemicPath& path, std::size_t transition,
                                   const ParameterVector& theta, const LikelihoodConfig& config) {
  config.validate();
  if (transition + 1 >= path.size()) throw ArgumentError("transition index out of range");
  if (config.family == LikelihoodFamily::tau_leap && path.states[transition].i == 0) {
    // Absorbed start: the transition is deterministic.
    return tauleap_transition_log_pmf(path.states[transition], path.states[transition + 1],
                                      path.times[transition + 1] - path.times[transition], 0.0,
                                      theta.gamma);
  }
  const std::size_t paths = static_cast<std::size_t>(config.mc_paths_B);
  std::vector<double> values(paths);
  std::size_t usable_count = 0;
  for (std::size_t b = 0; b < paths; ++b) {
    const std::uint64_t key = derive_seed(config.seed, transition, b);
    bool usable = false;
    values[b] = config.family == LikelihoodFamily::tau_leap
                    ? tauleap_subpath_log_pmf(path, transition, theta, config.steps_k, key, usable)
                    : diffusion_subpath_log_density(path, transition, theta, config.steps_k, key,
                                                    usable);
    if (usable) ++usable_count;
  }
  if (usable_count == 0) {
    std::ostringstream os;
    os << "all " << paths << " Monte-Carlo sub-paths of transition " << transition
       << " were absorbed or degenerate";
    throw MonteCarloDegeneracyError(os.str(), transition);
  }
  return log_mean_exp(values);
}

double multistep_loglik(const EpidemicPath& path, const ParameterVector& theta,
                        const LikelihoodConfig& config) {
  config.validate();
  if (config.steps_k == 1) {
    return config.family == LikelihoodFamily::tau_leap ? tauleap_loglik_1step(path, theta)
                                                       : diffusion_loglik_1step(path, theta);
  }
  require_transitions(path);
  if (config.family == LikelihoodFamily::tau_leap) validate_increments(path);
  std::vector<double> per_transition(path.size() - 1);
  parallel_for(per_transition.size(), config.workers, [&](std::size_t k) {
    per_transition[k] = multistep_transition_loglik(path, k, theta, config);
  });
  double total = 0.0;
  for (double v : per_transition) total += v;
  return total;
}

double neg_loglik(const EpidemicPath& path, const ParameterVector& theta,
                  const LikelihoodConfig& config) {
  if (!theta.feasible()) return kInf;
  const double ll = multistep_loglik(path, theta, config);
  if (!std::isfinite(ll)) return kInf;
  return -ll;
}

}  // namespace sirspline
