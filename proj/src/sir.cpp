#include "sirspline/sir.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "sirspline/error.hpp"
#include "sirspline/rng.hpp"

namespace sirspline {

void EpidemicPath::validate() const {
  if (times.empty()) throw DataValidityError("path has no observations");
  if (times.size() != states.size())
    throw DataValidityError("path has mismatched times and states");
  if (population < 1) throw DataValidityError("population must be >= 1");
  for (std::size_t k = 0; k < times.size(); ++k) {
    const CountState& x = states[k];
    if (x.n != population || !x.valid()) {
      std::ostringstream os;
      os << "invalid state at observation " << k << ": S=" << x.s << " I=" << x.i
         << " N=" << x.n;
      throw DataValidityError(os.str(), k);
    }
    if (!std::isfinite(times[k])) throw DataValidityError("non-finite time", k);
    if (k == 0) continue;
    if (!(times[k] > times[k - 1]))
      throw DataValidityError("times must be strictly increasing", k);
  }
  if (horizon < times.back()) throw DataValidityError("horizon precedes last observation");
}

RatePair RatePair::constant(double beta, double gamma) {
  return RatePair{[beta](double) { return beta; }, [beta](double, double) { return beta; },
                  gamma};
}

RatePair RatePair::from_spline(SplineModel spline, double gamma) {
  auto shared = std::make_shared<const SplineModel>(std::move(spline));
  return RatePair{[shared](double t) { return (*shared)(t); },
                  [shared](double a, double b) { return shared->sup_bound(a, b); }, gamma};
}

SdeCoefficients sde_coefficients(double beta, double gamma, ProportionState z, double n) {
  SdeCoefficients c;
  const double infection = beta * z.s * z.j;
  const double removal = gamma * z.j;
  c.drift = {-infection, infection - removal};
  c.l11 = std::sqrt(std::max(infection, 0.0) / n);
  c.l22 = std::sqrt(std::max(removal, 0.0) / n);
  return c;
}

namespace {

void check_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw InvalidRateError("recovery rate must be finite and >= 0");
}

double checked_beta(const RatePair& rates, double t) {
  const double b = rates.beta(t);
  if (!(b >= 0.0) || !std::isfinite(b)) {
    std::ostringstream os;
    os << "infection rate " << b << " at t=" << t << " is negative or non-finite";
    throw InvalidRateError(os.str());
  }
  return b;
}

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw ArgumentError("time grid is empty");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw ArgumentError("time grid must be strictly increasing");
}

}  // namespace

EpidemicPath simulate_exact(const RatePair& rates, const CountState& init, double t_end,
                            std::uint64_t seed, const ExactOptions& options) {
  if (!init.valid()) throw ArgumentError("initial state is invalid");
  if (!(t_end > 0.0)) throw ArgumentError("t_end must be > 0");
  if (!(options.bound_window > 0.0)) throw ArgumentError("bound window must be > 0");
  check_gamma(rates.gamma);
  if (!rates.beta_sup) throw InvalidRateError("exact simulation needs a bound on beta");

  EpidemicPath path;
  path.population = init.n;
  path.horizon = t_end;
  path.times.push_back(0.0);
  path.states.push_back(init);

  RandomStream rng(derive_seed(seed, 0));
  const double n = static_cast<double>(init.n);
  CountState x = init;
  double t = 0.0;
  while (x.i > 0 && t < t_end) {
    const double window_end = std::min(t + options.bound_window, t_end);
    const double bound = rates.beta_sup(t, window_end);
    if (!(bound >= 0.0) || !std::isfinite(bound))
      throw InvalidRateError("infection-rate bound is negative or non-finite");
    const double si = static_cast<double>(x.s) * static_cast<double>(x.i) / n;
    const double removal = rates.gamma * static_cast<double>(x.i);
    const double total = bound * si + removal;
    if (total <= 0.0) {
      t = window_end;
      continue;
    }
    const double candidate = t + rng.exponential(total);
    if (candidate >= window_end) {
      // No event in the window; the exponential clock is memoryless.
      t = window_end;
      continue;
    }
    t = candidate;
    const double beta = checked_beta(rates, t);
    if (beta > bound * (1.0 + 1e-12))
      throw InvalidRateError("infection rate exceeds its declared bound");
    const double u = rng.uniform() * total;
    if (u < beta * si) {
      --x.s;
      ++x.i;
    } else if (u < beta * si + removal) {
      --x.i;
    } else {
      continue;  // thinned
    }
    path.times.push_back(t);
    path.states.push_back(x);
  }
  return path;
}

EpidemicPath simulate_tau_leap(const RatePair& rates, const CountState& init,
                               std::span<const double> grid, std::uint64_t seed) {
  check_grid(grid);
  if (!init.valid()) throw ArgumentError("initial state is invalid");
  check_gamma(rates.gamma);

  EpidemicPath path;
  path.population = init.n;
  path.horizon = grid.back();
  path.times.assign(grid.begin(), grid.end());
  path.states.reserve(grid.size());
  path.states.push_back(init);

  const double n = static_cast<double>(init.n);
  CountState x = init;
  for (std::size_t r = 0; r + 1 < grid.size(); ++r) {
    if (x.i > 0) {
      const double dt = grid[r + 1] - grid[r];
      const double beta = checked_beta(rates, grid[r]);
      RandomStream rng(derive_seed(seed, r));
      const double si = static_cast<double>(x.s) * static_cast<double>(x.i) / n;
      const std::int64_t infections = std::min(rng.poisson(dt * beta * si), x.s);
      const std::int64_t removals =
          std::min(rng.poisson(dt * rates.gamma * static_cast<double>(x.i)), x.i);
      x.s -= infections;
      x.i += infections - removals;
    }
    path.states.push_back(x);
  }
  return path;
}

std::vector<ProportionState> simulate_euler_maruyama(const RatePair& rates,
                                                     const ProportionState& init,
                                                     std::span<const double> grid, double n,
                                                     std::uint64_t seed) {
  check_grid(grid);
  if (!(n >= 1.0)) throw ArgumentError("population must be >= 1");
  check_gamma(rates.gamma);

  std::vector<ProportionState> out;
  out.reserve(grid.size());
  out.push_back(init);
  ProportionState z = init;
  for (std::size_t r = 0; r + 1 < grid.size(); ++r) {
    const double dt = grid[r + 1] - grid[r];
    const SdeCoefficients c = sde_coefficients(checked_beta(rates, grid[r]), rates.gamma, z, n);
    RandomStream rng(derive_seed(seed, r));
    const double sq = std::sqrt(dt);
    const double db1 = sq * rng.normal();
    const double db2 = sq * rng.normal();
    z.s += c.drift[0] * dt + c.l11 * db1;
    z.j += c.drift[1] * dt - c.l11 * db1 + c.l22 * db2;
    out.push_back(z);
  }
  return out;
}

EpidemicPath sample_path_at(const EpidemicPath& path, std::span<const double> times) {
  if (path.times.empty()) throw ArgumentError("cannot sample an empty path");
  EpidemicPath out;
  out.population = path.population;
  out.times.reserve(times.size());
  out.states.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (t < path.times.front() || t > path.horizon) {
      std::ostringstream os;
      os << "sample time " << t << " outside path horizon [" << path.times.front() << ", "
         << path.horizon << "]";
      throw ArgumentError(os.str());
    }
    if (k > 0 && !(t > times[k - 1]))
      throw ArgumentError("sample times must be strictly increasing");
    const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
    out.times.push_back(t);
    out.states.push_back(path.states[static_cast<std::size_t>(it - path.times.begin()) - 1]);
  }
  out.horizon = out.times.empty() ? 0.0 : out.times.back();
  return out;
}

std::vector<double> uniform_grid(double a, double b, std::size_t steps) {
  if (steps == 0 || !(b > a)) throw ArgumentError("uniform grid needs b > a and steps >= 1");
  std::vector<double> g(steps + 1);
  const double h = (b - a) / static_cast<double>(steps);
  for (std::size_t r = 0; r <= steps; ++r) g[r] = a + h * static_cast<double>(r);
  g[steps] = b;
  return g;
}

}  // namespace sirspline
