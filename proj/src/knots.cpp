#include "sirspline/knots.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sirspline/error.hpp"

namespace sirspline {

bool RateSeries::has_undefined() const noexcept {
  return std::any_of(undefined.begin(), undefined.end(), [](bool b) { return b; });
}

RateSeries moving_average_rates(const EpidemicPath& path, int window) {
  if (window < 2) throw ArgumentError("moving-average window must be >= 2");
  const std::size_t w = static_cast<std::size_t>(window);
  if (path.size() < w) {
    std::ostringstream os;
    os << "moving-average window " << window << " needs at least " << window
       << " observations, path has " << path.size();
    throw ArgumentError(os.str());
  }
  const double n = static_cast<double>(path.population);
  RateSeries out;
  for (std::size_t first = 0; first + w <= path.size(); ++first) {
    double infections = 0.0, removals = 0.0, exposure = 0.0, infected_time = 0.0;
    for (std::size_t k = first; k + 1 < first + w; ++k) {
      const CountState& a = path.states[k];
      const CountState& b = path.states[k + 1];
      const double dt = path.times[k + 1] - path.times[k];
      infections += static_cast<double>(a.s - b.s);
      removals += static_cast<double>((a.s + a.i) - (b.s + b.i));
      exposure += dt * static_cast<double>(a.s) * static_cast<double>(a.i);
      infected_time += dt * static_cast<double>(a.i);
    }
    out.times.push_back(0.5 * (path.times[first] + path.times[first + w - 1]));
    const bool undefined = !(exposure > 0.0);
    out.undefined.push_back(undefined);
    out.values.push_back(undefined ? 0.0 : std::max(0.0, n * infections / exposure));
    out.gamma.push_back(infected_time > 0.0 ? std::max(0.0, removals / infected_time) : 0.0);
  }
  return out;
}

std::vector<RateSeries> finite_difference_ladder(const RateSeries& series, int order) {
  if (order < 1) throw ArgumentError("derivative order must be >= 1");
  if (series.size() <= static_cast<std::size_t>(order)) {
    std::ostringstream os;
    os << "series of length " << series.size() << " is too short for derivative order "
       << order;
    throw ArgumentError(os.str());
  }
  std::vector<RateSeries> levels;
  levels.reserve(order);
  const RateSeries* prev = &series;
  for (int j = 0; j < order; ++j) {
    RateSeries next;
    for (std::size_t i = 0; i + 1 < prev->size(); ++i) {
      const double dt = prev->times[i + 1] - prev->times[i];
      next.times.push_back(0.5 * (prev->times[i] + prev->times[i + 1]));
      next.values.push_back((prev->values[i + 1] - prev->values[i]) / dt);
    }
    next.undefined.assign(next.times.size(), false);
    levels.push_back(std::move(next));
    prev = &levels.back();
  }
  return levels;
}

FeatureCurve feature_curve(const RateSeries& derivative, int degree, double u_first,
                           double u_last) {
  if (derivative.size() == 0) throw ArgumentError("derivative series is empty");
  if (degree < 0) throw ArgumentError("degree must be >= 0");
  const double power = 1.0 / static_cast<double>(degree + 1);
  FeatureCurve c;
  c.times.push_back(u_first);
  c.f.push_back(0.0);
  for (std::size_t i = 1; i < derivative.size(); ++i) {
    c.times.push_back(derivative.times[i]);
    c.f.push_back(std::pow(std::abs(derivative.values[i]), power));
  }
  c.times.push_back(u_last);
  c.f.push_back(0.0);
  for (std::size_t i = 1; i < c.times.size(); ++i)
    if (!(c.times[i] > c.times[i - 1]))
      throw ArgumentError("feature curve times must be strictly increasing");
  c.F.assign(c.times.size(), 0.0);
  for (std::size_t i = 1; i < c.times.size(); ++i)
    c.F[i] = c.F[i - 1] + 0.5 * (c.f[i - 1] + c.f[i]) * (c.times[i] - c.times[i - 1]);
  return c;
}

FeatureCurve feature_curve_from_series(const RateSeries& series, int degree) {
  const auto ladder = finite_difference_ladder(series, degree + 1);
  if (series.size() < 2) throw ArgumentError("rate series too short for a feature curve");
  return feature_curve(ladder.back(), degree, series.times[1], series.times.back());
}

KnotPlacement place_knots(const FeatureCurve& curve, int num_knots) {
  if (num_knots < 0) throw ArgumentError("number of knots must be >= 0");
  KnotPlacement out;
  if (num_knots == 0) return out;
  if (curve.times.size() < 2) throw ArgumentError("feature curve needs at least 2 points");
  const double lo = curve.times.front();
  const double hi = curve.times.back();
  const double total = curve.total();
  const double k1 = static_cast<double>(num_knots + 1);

  if (!(total > 0.0)) {
    out.uniform_fallback = true;
    for (int j = 1; j <= num_knots; ++j) out.knots.push_back(lo + (hi - lo) * j / k1);
    return out;
  }

  double spacing = hi - lo;
  for (std::size_t i = 1; i < curve.times.size(); ++i)
    spacing = std::min(spacing, curve.times[i] - curve.times[i - 1]);

  for (int j = 1; j <= num_knots; ++j) {
    const double level = total * j / k1;
    const auto it = std::lower_bound(curve.F.begin(), curve.F.end(), level);
    const std::size_t i = static_cast<std::size_t>(it - curve.F.begin());  // F[i] >= level > F[i-1]
    const double frac = (level - curve.F[i - 1]) / (curve.F[i] - curve.F[i - 1]);
    out.knots.push_back(curve.times[i - 1] + frac * (curve.times[i] - curve.times[i - 1]));
  }

  // Separate coincident knots by one grid spacing, then pull back any that
  // were pushed past the end.
  const double tiny = 1e-9 * (hi - lo);
  for (std::size_t j = 1; j < out.knots.size(); ++j)
    if (out.knots[j] - out.knots[j - 1] < tiny) out.knots[j] = out.knots[j - 1] + spacing;
  const double cap = hi - tiny;
  if (out.knots.back() > cap) out.knots.back() = cap;
  for (std::size_t j = out.knots.size() - 1; j-- > 0;)
    if (out.knots[j + 1] - out.knots[j] < tiny) out.knots[j] = out.knots[j + 1] - spacing;
  for (std::size_t j = 0; j < out.knots.size(); ++j) {
    const double prev = j == 0 ? lo : out.knots[j - 1];
    if (!(out.knots[j] > prev) || !(out.knots[j] < hi))
      throw ArgumentError("too many knots for the feature curve's time range");
  }
  return out;
}

}  // namespace sirspline
