#include "sirspline/normal.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "sirspline/error.hpp"

namespace sirspline::normal {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
}

double pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double log_pdf(double x, double mean, double variance) {
  const double z = x - mean;
  return -0.5 * z * z / variance - 0.5 * std::log(variance) - kLogSqrt2Pi;
}

double cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_cdf(double x) {
  if (x > -30.0) return std::log(cdf(x));
  // Asymptotic series of the Mills ratio.
  const double x2 = x * x;
  const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

double quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("normal quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double log_interval_probability(double lo, double hi, double mean, double variance) {
  const double sd = std::sqrt(variance);
  const double a = (lo - mean) / sd;
  const double b = (hi - mean) / sd;
  if (b <= a) return -kInf;
  if (hi == kInf) return log_cdf(-a);  // upper tail by symmetry
  if (lo == -kInf) return log_cdf(b);
  // Finite interval: work on the side away from the bulk for accuracy.
  if (a > 0.0) return log_cdf(-a) + std::log1p(-std::exp(log_cdf(-b) - log_cdf(-a)));
  return log_cdf(b) + std::log1p(-std::exp(log_cdf(a) - log_cdf(b)));
}

double rectangle_probability(double mean_x, double mean_y, double var_x, double cov_xy,
                             double var_y, Interval x_range, Interval y_range,
                             double rel_tol) {
  if (!(var_x > 0.0)) throw ArgumentError("rectangle probability needs var_x > 0");
  const double sd_x = std::sqrt(var_x);
  const double slope = cov_xy / var_x;
  const double cond_var = var_y - cov_xy * slope;
  if (!(cond_var > 0.0)) throw ArgumentError("rectangle probability needs a nonsingular covariance");
  const double cond_sd = std::sqrt(cond_var);

  // Integrate over u = (x - mean_x) / sd_x, truncated where phi(u) is below
  // double precision relative to the bulk.
  constexpr double kCut = 38.0;
  const double u_lo = std::max((x_range.lo - mean_x) / sd_x, -kCut);
  const double u_hi = std::min((x_range.hi - mean_x) / sd_x, kCut);
  if (!(u_hi > u_lo)) return 0.0;

  auto integrand = [&](double u) {
    const double cond_mean = mean_y + slope * sd_x * u;
    const double a = (y_range.lo - cond_mean) / cond_sd;
    const double b = (y_range.hi - cond_mean) / cond_sd;
    double p;
    if (y_range.hi == kInf) {
      p = cdf(-a);
    } else if (y_range.lo == -kInf) {
      p = cdf(b);
    } else {
      p = a > 0.0 ? cdf(-a) - cdf(-b) : cdf(b) - cdf(a);
    }
    return pdf(u) * p;
  };
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, u_lo, u_hi, 30,
                                                                        rel_tol, &error);
}

}  // namespace sirspline::normal
