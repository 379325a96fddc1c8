#pragma once

#include <vector>

#include "sirspline/sir.hpp"

namespace sirspline {

// Estimated beta at a sequence of times. `undefined[i]` marks windows whose
// exposure sum was zero; their value is reported as 0.
struct RateSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<bool> undefined;
  std::vector<double> gamma;  // per-window recovery estimate, diagnostic only

  std::size_t size() const noexcept { return times.size(); }
  bool has_undefined() const noexcept;
};

// Piecewise-linear feature function f and its running trapezoid integral F.
struct FeatureCurve {
  std::vector<double> times;
  std::vector<double> f;
  std::vector<double> F;

  double total() const noexcept { return F.empty() ? 0.0 : F.back(); }
};

// Per window of `window` consecutive observations, the closed-form
// constant-rate tau-leap MLE
//   beta = N sum dW / sum(dt S I),  gamma = sum dY / sum(dt I),
// recorded at the window midpoint (t_first + t_last) / 2.
RateSeries moving_average_rates(const EpidemicPath& path, int window);

// Levels 1..order of repeated first-difference quotients; level j+1 sits at
// the midpoints of level j's times.
std::vector<RateSeries> finite_difference_ladder(const RateSeries& series, int order);

// Feature curve from the (d+1)-th derivative level. The end points are
// u_first and u_last (the second and last times of the original series) and
// carry f = 0; interior values are |derivative|^(1/(d+1)).
FeatureCurve feature_curve(const RateSeries& derivative, int degree, double u_first,
                           double u_last);

// Whole chain series -> ladder -> feature curve.
FeatureCurve feature_curve_from_series(const RateSeries& series, int degree);

struct KnotPlacement {
  std::vector<double> knots;
  bool uniform_fallback = false;  // F was identically zero
};

// K interior knots at F^{-1}(j F_max / (K+1)), j = 1..K, inverting the
// piecewise-linear F by linear interpolation.
KnotPlacement place_knots(const FeatureCurve& curve, int num_knots);

}  // namespace sirspline
