#pragma once

#include <cstdint>
#include <vector>

#include "sirspline/knots.hpp"
#include "sirspline/likelihood.hpp"
#include "sirspline/optimizer.hpp"

namespace sirspline {

struct FitOptions {
  double ftol_rel = 1e-8;
  double xtol = 1e-6;           // in log-parameter units
  int evaluations_per_param = 2000;
  int restarts = 1;
  double initial_step = 0.25;
  int multistart = 0;           // extra randomized starts around the init
  std::uint64_t multistart_seed = 7;
};

struct FitResult {
  ParameterVector theta_hat;
  double loglik = 0.0;
  bool converged = false;
  long evaluations = 0;
  double bic = 0.0;
  std::size_t num_params = 0;
};

// BIC = -2 loglik + p log(transitions).
double bic_value(double loglik, std::size_t num_params, std::size_t transitions);

// Least squares with x >= 0 (Lawson-Hanson active set). `a` is row-major
// rows x cols.
std::vector<double> nnls(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                         const std::vector<double>& b);

// Starting point: spline coefficients by nonnegative least squares on the
// rate series (floored at 1e-6; a basis function touching no series point
// takes the series mean); gamma by the global closed form sum dY / sum(dt I).
ParameterVector initial_theta(const RateSeries& series, const KnotVector& basis,
                              const EpidemicPath& path);

// Global closed-form constant recovery rate, floored at 1e-6.
double closed_form_gamma(const EpidemicPath& path);

// Maximizes the approximate likelihood over log(gamma) and log(coefficients)
// with a Nelder-Mead search followed by restarts from the incumbent.
FitResult fit_mle(const EpidemicPath& path, const KnotVector& basis,
                  const LikelihoodConfig& config, const ParameterVector& init,
                  const FitOptions& options = {});

}  // namespace sirspline
