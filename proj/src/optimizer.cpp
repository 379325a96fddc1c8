#include "sirspline/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sirspline/error.hpp"

namespace sirspline {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> start, const SimplexOptions& options) {
  const std::size_t n = start.size();
  if (n == 0) throw ArgumentError("nelder_mead needs at least one parameter");
  const double dim = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dim;          // expansion
  const double gamma = 0.75 - 1.0 / (2.0 * dim); // contraction
  const double delta = 1.0 - 1.0 / dim;         // shrink
  const double kInf = std::numeric_limits<double>::infinity();

  SimplexResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? v : kInf;
  };

  std::vector<std::vector<double>> simplex(n + 1, start);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto sort = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  };
  auto point = [&](double t, std::vector<double>& out) {
    const auto& worst = simplex[order[n]];
    for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (worst[k] - centroid[k]);
  };

  for (;;) {
    sort();
    const double best = values[order[0]];
    const double worst = values[order[n]];
    double spread_x = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        spread_x = std::max(spread_x, std::abs(simplex[order[i]][k] - simplex[order[0]][k]));
    const bool f_ok = std::isfinite(worst) &&
                      (worst - best) <= options.ftol_rel * (std::abs(best) + 1e-300);
    if (f_ok && spread_x <= options.xtol) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= options.max_evaluations) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[order[i]][k] / dim;

    point(-alpha, trial);
    const double f_r = eval(trial);
    const double second_worst = values[order[n - 1]];
    if (f_r < best) {
      point(-alpha * beta, trial2);
      const double f_e = eval(trial2);
      if (f_e < f_r) {
        simplex[order[n]] = trial2;
        values[order[n]] = f_e;
      } else {
        simplex[order[n]] = trial;
        values[order[n]] = f_r;
      }
      continue;
    }
    if (f_r < second_worst) {
      simplex[order[n]] = trial;
      values[order[n]] = f_r;
      continue;
    }
    // Outside or inside contraction.
    const bool outside = f_r < worst;
    point(outside ? -alpha * gamma : gamma, trial2);
    const double f_c = eval(trial2);
    if (f_c < (outside ? f_r : worst)) {
      simplex[order[n]] = trial2;
      values[order[n]] = f_c;
      continue;
    }
    const auto& anchor = simplex[order[0]];
    for (std::size_t i = 1; i <= n; ++i) {
      auto& v = simplex[order[i]];
      for (std::size_t k = 0; k < n; ++k) v[k] = anchor[k] + delta * (v[k] - anchor[k]);
      values[order[i]] = eval(v);
    }
  }
  result.x = simplex[order[0]];
  result.value = values[order[0]];
  return result;
}

}  // namespace sirspline
