#pragma once

#include <limits>

namespace sirspline::normal {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

double pdf(double x);
double log_pdf(double x, double mean, double variance);
// Standard normal CDF and its logarithm (accurate far into the lower tail).
double cdf(double x);
double log_cdf(double x);
// Standard normal quantile.
double quantile(double p);

// log P(lo <= X <= hi) for X ~ N(mean, variance); lo may be -inf, hi +inf.
double log_interval_probability(double lo, double hi, double mean, double variance);

struct Interval {
  double lo;
  double hi;
};

// P(X in x_range, Y in y_range) for a bivariate normal, by conditioning on X
// and integrating the conditional Y-probability with adaptive Gauss-Kronrod
// quadrature to relative tolerance `rel_tol`.
double rectangle_probability(double mean_x, double mean_y, double var_x, double cov_xy,
                             double var_y, Interval x_range, Interval y_range,
                             double rel_tol = 1e-8);

}  // namespace sirspline::normal
