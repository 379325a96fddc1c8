#include "sirspline/estimator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sirspline/error.hpp"
#include "sirspline/rng.hpp"

namespace sirspline {

namespace {
constexpr double kFloor = 1e-6;
}

double bic_value(double loglik, std::size_t num_params, std::size_t transitions) {
  return -2.0 * loglik + static_cast<double>(num_params) * std::log(static_cast<double>(transitions));
}

std::vector<double> nnls(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                         const std::vector<double>& b) {
  if (a.size() != rows * cols || b.size() != rows) throw ArgumentError("nnls: shape mismatch");
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const Matrix> A(a.data(), rows, cols);
  const Eigen::Map<const Eigen::VectorXd> y(b.data(), rows);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
  std::vector<bool> passive(cols, false);
  const double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max(1.0, y.cwiseAbs().maxCoeff());

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> idx;
    for (std::size_t j = 0; j < cols; ++j)
      if (passive[j]) idx.push_back(static_cast<Eigen::Index>(j));
    Eigen::MatrixXd sub(rows, idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(k) = A.col(idx[k]);
    const Eigen::VectorXd s_sub = sub.colPivHouseholderQr().solve(y);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(cols);
    for (std::size_t k = 0; k < idx.size(); ++k) s[idx[k]] = s_sub[k];
    return s;
  };

  for (std::size_t outer = 0; outer < 3 * cols + 10; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (y - A * x);
    double best = tol;
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j)
      if (!passive[j] && w[j] > best) {
        best = w[j];
        enter = j;
      }
    if (enter == cols) break;
    passive[enter] = true;
    for (std::size_t inner = 0; inner < 3 * cols + 10; ++inner) {
      const Eigen::VectorXd s = solve_passive();
      bool feasible = true;
      double alpha = 1.0;
      for (std::size_t j = 0; j < cols; ++j) {
        if (passive[j] && s[j] <= 0.0) {
          feasible = false;
          const double denom = x[j] - s[j];
          if (denom > 0.0) alpha = std::min(alpha, x[j] / denom);
        }
      }
      if (feasible) {
        x = s;
        break;
      }
      x += alpha * (s - x);
      for (std::size_t j = 0; j < cols; ++j)
        if (passive[j] && x[j] <= 1e-15) {
          passive[j] = false;
          x[j] = 0.0;
        }
    }
  }
  return {x.data(), x.data() + cols};
}

double closed_form_gamma(const EpidemicPath& path) {
  double removals = 0.0, infected_time = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const CountState& a = path.states[k];
    const CountState& b = path.states[k + 1];
    removals += static_cast<double>((a.s + a.i) - (b.s + b.i));
    infected_time += (path.times[k + 1] - path.times[k]) * static_cast<double>(a.i);
  }
  const double g = infected_time > 0.0 ? removals / infected_time : 0.0;
  return std::max(g, kFloor);
}

ParameterVector initial_theta(const RateSeries& series, const KnotVector& basis,
                              const EpidemicPath& path) {
  if (series.size() == 0) throw ArgumentError("rate series is empty");
  const std::size_t cols = basis.num_basis();
  std::vector<double> a, b;
  std::vector<double> touched(cols, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if ((i < series.undefined.size() && series.undefined[i]) || !basis.contains(series.times[i]))
      continue;
    const std::vector<double> row = basis_dense(basis, series.times[i]);
    for (std::size_t j = 0; j < cols; ++j) touched[j] += row[j];
    a.insert(a.end(), row.begin(), row.end());
    b.push_back(series.values[i]);
    sum += series.values[i];
  }
  const std::size_t rows = b.size();
  const double mean = rows > 0 ? sum / static_cast<double>(rows) : kFloor;
  std::vector<double> coef(cols, std::max(mean, kFloor));
  if (rows > 0) {
    const std::vector<double> x = nnls(a, rows, cols, b);
    for (std::size_t j = 0; j < cols; ++j)
      coef[j] = touched[j] > 0.0 ? std::max(x[j], kFloor) : std::max(mean, kFloor);
  }
  return ParameterVector{closed_form_gamma(path), SplineModel(basis, std::move(coef))};
}

FitResult fit_mle(const EpidemicPath& path, const KnotVector& basis,
                  const LikelihoodConfig& config, const ParameterVector& init,
                  const FitOptions& options) {
  config.validate();
  path.validate();
  if (path.size() < 2) throw ArgumentError("fit needs at least 2 observations");
  if (init.spline.coefficients().size() != basis.num_basis())
    throw ArgumentError("initial parameter does not match the basis");
  if (!basis.contains(path.times.front()) || !basis.contains(path.times[path.size() - 2]))
    throw ArgumentError("spline domain does not cover the observation times");
  if (config.family == LikelihoodFamily::tau_leap) validate_increments(path);

  const std::size_t p = 1 + basis.num_basis();
  ParameterVector work{init.gamma, SplineModel(basis, init.spline.coefficients())};
  auto objective = [&](const std::vector<double>& x) {
    work.gamma = std::exp(x[0]);
    auto& c = work.spline.mutable_coefficients();
    for (std::size_t j = 1; j < p; ++j) c[j - 1] = std::exp(x[j]);
    try {
      return neg_loglik(path, work, config);
    } catch (const DegenerateTransitionError&) {
      return std::numeric_limits<double>::infinity();
    } catch (const MonteCarloDegeneracyError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<double> x0(p);
  x0[0] = std::log(std::max(init.gamma, kFloor));
  for (std::size_t j = 1; j < p; ++j)
    x0[j] = std::log(std::max(init.spline.coefficients()[j - 1], kFloor));

  FitResult result;
  result.num_params = p;
  // the init as given, before flooring into the log domain
  double f0 = std::numeric_limits<double>::infinity();
  try {
    f0 = neg_loglik(path, init, config);
  } catch (const DegenerateTransitionError&) {
  } catch (const MonteCarloDegeneracyError&) {
  }
  result.evaluations = 1;
  if (!std::isfinite(f0))
    throw InitializationError("negative log-likelihood is not finite at the initial parameter");

  SimplexOptions simplex;
  simplex.ftol_rel = options.ftol_rel;
  simplex.xtol = options.xtol;
  simplex.max_evaluations = static_cast<long>(options.evaluations_per_param) * static_cast<long>(p);
  simplex.initial_step = options.initial_step;

  auto search = [&](std::vector<double> start) {
    SimplexResult run = nelder_mead(objective, std::move(start), simplex);
    result.evaluations += run.evaluations;
    for (int r = 0; r < options.restarts; ++r) {
      SimplexResult again = nelder_mead(objective, run.x, simplex);
      result.evaluations += again.evaluations;
      const bool converged = again.converged;
      if (again.value <= run.value) run = std::move(again);
      run.converged = converged;
    }
    return run;
  };

  SimplexResult best = search(x0);
  for (int m = 0; m < options.multistart; ++m) {
    RandomStream rng(derive_seed(options.multistart_seed, static_cast<std::uint64_t>(m)));
    std::vector<double> start = x0;
    for (double& v : start) v += 0.5 * rng.normal();
    if (!std::isfinite(objective(start))) continue;
    SimplexResult run = search(std::move(start));
    if (run.value < best.value) best = std::move(run);
  }

  objective(best.x);
  result.theta_hat = work;
  result.loglik = -best.value;
  result.converged = best.converged && std::isfinite(best.value);
  result.bic = bic_value(result.loglik, p, path.size() - 1);
  return result;
}

}  // namespace sirspline
