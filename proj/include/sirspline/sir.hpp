#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sirspline/spline.hpp"

namespace sirspline {

// Integer compartment counts. R = n - s - i is derived, never stored.
struct CountState {
  std::int64_t s = 0;
  std::int64_t i = 0;
  std::int64_t n = 1;

  std::int64_t removed() const noexcept { return n - s - i; }
  bool valid() const noexcept { return n >= 1 && s >= 0 && i >= 0 && s + i <= n; }
  friend bool operator==(const CountState&, const CountState&) = default;
};

// Susceptible and infected fractions. Diffusion states may leave [0,1]^2.
struct ProportionState {
  double s = 0.0;
  double j = 0.0;

  static ProportionState from_counts(const CountState& x) noexcept {
    const double n = static_cast<double>(x.n);
    return {static_cast<double>(x.s) / n, static_cast<double>(x.i) / n};
  }
  bool inside_unit_square() const noexcept { return s >= 0 && s <= 1 && j >= 0 && j <= 1; }
  friend bool operator==(const ProportionState&, const ProportionState&) = default;
};

// Observed or simulated counts at strictly increasing times. `horizon` is the
// last time the path describes; it may exceed times.back() when the state is
// constant after the last event.
struct EpidemicPath {
  std::vector<double> times;
  std::vector<CountState> states;
  std::int64_t population = 1;
  double horizon = 0.0;

  std::size_t size() const noexcept { return times.size(); }
  double end_time() const noexcept { return horizon; }

  // Throws DataValidityError naming the first violated invariant.
  void validate() const;
};

// Infection rate function and constant recovery rate.
//
// `beta_sup(a, b)` must return an upper bound of beta on [a, b]; the exact
// simulator uses it for thinning.
struct RatePair {
  std::function<double(double)> beta;
  std::function<double(double, double)> beta_sup;
  double gamma = 0.0;

  static RatePair constant(double beta, double gamma);
  static RatePair from_spline(SplineModel spline, double gamma);
};

// Drift vector and diffusion factor of the SIR diffusion in proportions.
//   A = (-b s j, b s j - g j)
//   L = n^{-1/2} [[ sqrt(b s j), 0 ], [ -sqrt(b s j), sqrt(g j) ]]
// Negative products under the square roots are clamped to 0.
struct SdeCoefficients {
  std::array<double, 2> drift{};
  double l11 = 0.0;  // sqrt(b s j / n)
  double l22 = 0.0;  // sqrt(g j / n); L21 = -l11
  // Sigma = L L^T
  double sigma11() const noexcept { return l11 * l11; }
  double sigma12() const noexcept { return -l11 * l11; }
  double sigma22() const noexcept { return l11 * l11 + l22 * l22; }
};

SdeCoefficients sde_coefficients(double beta, double gamma, ProportionState z, double n);

struct ExactOptions {
  // Length of the window over which beta is bounded for thinning.
  double bound_window = 1.0;
};

// Event-resolution simulation of the Markov SIR process by thinning. The path
// starts at time 0 and ends at t_end or at the first time I reaches 0.
EpidemicPath simulate_exact(const RatePair& rates, const CountState& init, double t_end,
                            std::uint64_t seed, const ExactOptions& options = {});

// Tau-leaping on the given grid (grid[0] is the time of `init`). Each step
// draws Poisson infections and removals with rates frozen at the left end.
// Event counts are truncated so no compartment goes negative. The random
// stream of step r is keyed by (seed, r).
EpidemicPath simulate_tau_leap(const RatePair& rates, const CountState& init,
                               std::span<const double> grid, std::uint64_t seed);

// Euler-Maruyama iterates of the SIR diffusion on the grid.
std::vector<ProportionState> simulate_euler_maruyama(const RatePair& rates,
                                                     const ProportionState& init,
                                                     std::span<const double> grid, double n,
                                                     std::uint64_t seed);

// Right-continuous sampling: the state at each time is the last state at or
// before it.
EpidemicPath sample_path_at(const EpidemicPath& path, std::span<const double> times);

// Uniform grid a, a+h, ..., b with `steps` intervals.
std::vector<double> uniform_grid(double a, double b, std::size_t steps);

}  // namespace sirspline
