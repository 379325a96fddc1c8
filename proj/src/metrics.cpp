#include "sirspline/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "sirspline/error.hpp"

namespace sirspline {

TruthFunction::TruthFunction(std::string name, std::function<double(double)> value,
                             std::function<double(double, double)> sup)
    : name_(std::move(name)), value_(std::move(value)), sup_(std::move(sup)) {}

TruthFunction TruthFunction::constant(double beta) {
  return TruthFunction("constant", [beta](double) { return beta; },
                       [beta](double, double) { return beta; });
}

TruthFunction TruthFunction::tabulated(std::string name, std::vector<double> times,
                                       std::vector<double> values, Interpolation rule) {
  if (times.empty() || times.size() != values.size())
    throw ArgumentError("tabulated truth needs matching non-empty times and values");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw ArgumentError("tabulated times must increase");
  struct Table {
    std::vector<double> t, v;
    Interpolation rule;
  };
  auto table = std::make_shared<const Table>(Table{std::move(times), std::move(values), rule});
  auto value = [table](double t) {
    const auto& tt = table->t;
    const auto& vv = table->v;
    if (t <= tt.front()) return vv.front();
    if (t >= tt.back()) return vv.back();
    const std::size_t i =
        static_cast<std::size_t>(std::upper_bound(tt.begin(), tt.end(), t) - tt.begin()) - 1;
    if (table->rule == Interpolation::step) return vv[i];
    const double w = (t - tt[i]) / (tt[i + 1] - tt[i]);
    return vv[i] + w * (vv[i + 1] - vv[i]);
  };
  // Both rules attain their max over [a, b] at a, b or a table node inside.
  auto sup = [table, value](double a, double b) {
    double m = std::max(value(a), value(b));
    for (std::size_t i = 0; i < table->t.size(); ++i)
      if (table->t[i] > a && table->t[i] < b) m = std::max(m, table->v[i]);
    return m;
  };
  return TruthFunction(std::move(name), value, sup);
}

TruthFunction TruthFunction::scenario(int id) {
  using I = Interpolation;
  switch (id) {
    case 1: {
      TruthFunction f = constant(0.3);
      f.name_ = "sim1-constant";
      return f;
    }
    case 2:
      return tabulated("sim2-increasing", {0.0, 20.0, 45.0}, {0.15, 0.3, 0.5}, I::step);
    case 3:
      return tabulated("sim3-decreasing", {0.0, 20.0, 45.0}, {0.5, 0.3, 0.15}, I::step);
    case 4:
      return tabulated("sim4-up-down", {0.0, 20.0, 45.0}, {0.2, 0.5, 0.2}, I::step);
    case 5: {
      auto value = [](double t) { return 0.15 + 0.3 / (1.0 + std::exp(-(t - 35.0) / 6.0)); };
      // Monotone increasing: the max is at the right end.
      return TruthFunction("sim5-smooth-increasing", value,
                           [value](double, double b) { return value(b); });
    }
    default:
      throw ArgumentError("scenario id must be in 1..5");
  }
}

std::vector<double> TruthFunction::on(std::span<const double> grid) const {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(value_(t));
  return out;
}

RatePair TruthFunction::rates(double gamma) const { return RatePair{value_, sup_, gamma}; }

double imse(std::span<const double> estimate, const TruthFunction& truth,
            std::span<const double> grid) {
  if (estimate.size() != grid.size()) throw ArgumentError("estimate and grid sizes differ");
  if (grid.size() < 2) throw ArgumentError("imse needs at least 2 grid points");
  double total = 0.0;
  double prev = estimate[0] - truth(grid[0]);
  prev *= prev;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double e = estimate[i] - truth(grid[i]);
    e *= e;
    total += 0.5 * (prev + e) * (grid[i] - grid[i - 1]);
    prev = e;
  }
  return total;
}

std::vector<double> coverage(std::span<const ConfidenceBand> bands, const TruthFunction& truth) {
  if (bands.empty()) throw ArgumentError("coverage needs at least one band");
  const std::vector<double>& times = bands.front().times;
  std::vector<double> rate(times.size(), 0.0);
  for (const auto& b : bands) {
    if (b.times != times) throw ArgumentError("bands must share the same time grid");
    for (std::size_t t = 0; t < times.size(); ++t) {
      const double v = truth(times[t]);
      if (b.lower[t] <= v && v <= b.upper[t]) rate[t] += 1.0;
    }
  }
  for (double& r : rate) r /= static_cast<double>(bands.size());
  return rate;
}

std::vector<double> r0_curve(const ParameterVector& theta, std::span<const double> grid) {
  if (theta.gamma == 0.0) throw ArgumentError("R0(t) is undefined when gamma = 0");
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(theta.beta(t) / theta.gamma);
  return out;
}

}  // namespace sirspline
