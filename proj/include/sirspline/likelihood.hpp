#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "sirspline/sir.hpp"
#include "sirspline/spline.hpp"

namespace sirspline {

// theta = (gamma, spline coefficients of beta).
struct ParameterVector {
  double gamma = 0.0;
  SplineModel spline;

  double beta(double t) const { return spline(t); }
  std::size_t size() const noexcept { return 1 + spline.coefficients().size(); }
  bool feasible() const noexcept;
};

enum class LikelihoodFamily { tau_leap, diffusion };

std::string to_string(LikelihoodFamily family);
LikelihoodFamily parse_family(const std::string& name);

struct LikelihoodConfig {
  LikelihoodFamily family = LikelihoodFamily::tau_leap;
  int steps_k = 1;        // sub-steps per observation gap
  int mc_paths_B = 100;   // Monte-Carlo sub-paths when steps_k > 1
  std::uint64_t seed = 1; // keys the sub-path streams (common random numbers)
  unsigned workers = 1;   // parallelism over transitions

  void validate() const;
};

struct DriftDiffusion {
  std::array<double, 2> drift{};
  // Sigma = L L^T (symmetric)
  double sigma11 = 0.0;
  double sigma12 = 0.0;
  double sigma22 = 0.0;
};

DriftDiffusion drift_and_diffusion(double t, const ProportionState& z,
                                   const ParameterVector& theta, double n);

// Gaussian one-step transition moments: mu = x + A dt, Sigma = Sigma(x) dt,
// plus the conditional mean/variance of each coordinate given the other one
// at the observed point `to`.
struct TransitionMoments {
  std::array<double, 2> mu{};
  double sigma11 = 0.0;
  double sigma12 = 0.0;
  double sigma22 = 0.0;
  double mu1_star = 0.0;   // E[s | j = to.j]
  double mu2_star = 0.0;   // E[j | s = to.s]
  double var1_star = 0.0;  // Var[s | j]
  double var2_star = 0.0;  // Var[j | s]
};

TransitionMoments transition_moments(const ProportionState& from, const ProportionState& to,
                                     double dt, double beta, double gamma, double n);

// Moments from explicit mean and covariance, conditioning at `to`.
TransitionMoments moments_from(std::array<double, 2> mu, double sigma11, double sigma12,
                               double sigma22, const ProportionState& to);

// Which coordinates of an observed proportion are censored (<= 0 or >= 1).
enum class CensorCase { interior, s_censored, j_censored, both_censored };
CensorCase classify(const ProportionState& x) noexcept;

// log of the one-step Euler-Maruyama transition density at `to` with the
// boundary-censoring rule. Throws DegenerateTransitionError (tagged with
// `transition`) when a needed (conditional) variance is zero.
double censored_log_density(const ProportionState& to, const TransitionMoments& m,
                            std::size_t transition = 0);

// Log Poisson pmf; rate 0 with count 0 gives 0, rate 0 with positive count -inf.
double poisson_log_pmf(std::int64_t count, double rate);

// Log pmf of one tau-leap step from `from` to `to`. Negative increments give
// -inf (impossible move) rather than an error.
double tauleap_transition_log_pmf(const CountState& from, const CountState& to, double dt,
                                  double beta, double gamma);

double diffusion_transition_log_density(const ProportionState& from, const ProportionState& to,
                                        double dt, double beta, double gamma, double n,
                                        std::size_t transition = 0);

// Closed-form 1-step log-likelihoods of X(t_2..t_M) given X(t_1).
double tauleap_loglik_1step(const EpidemicPath& path, const ParameterVector& theta);
double diffusion_loglik_1step(const EpidemicPath& path, const ParameterVector& theta);

// k-step log-likelihood: per transition, average the final one-step
// density over B simulated sub-paths of k-1 steps. k = 1 delegates to the
// closed form.
double multistep_loglik(const EpidemicPath& path, const ParameterVector& theta,
                        const LikelihoodConfig& config);

// Single-transition Monte-Carlo estimate (log of the averaged density); the
// building block of multistep_loglik, exposed for diagnostics.
double multistep_transition_loglik(const EpidemicPath& path, std::size_t transition,
                                   const ParameterVector& theta, const LikelihoodConfig& config);

// Negated log-likelihood for minimization. Infeasible theta and non-finite
// values map to +inf.
double neg_loglik(const EpidemicPath& path, const ParameterVector& theta,
                  const LikelihoodConfig& config);

// Checks the tau-leap data requirement (nonnegative S and S+I decrements).
void validate_increments(const EpidemicPath& path);

}  // namespace sirspline
